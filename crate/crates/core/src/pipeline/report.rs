//! Table renderings of report sections: CSV, Markdown, and per-section JSON.

use std::str::FromStr;

use serde::Serialize;

use super::{AnalysisReport, Rq1Section, Rq2Section, Rq3Section, Rq4Section};
use crate::corpus::Label;
use crate::metrics::MetricId;
use crate::stats::{CorrelationMatrix, TTestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReportFormat {
    Csv,
    Json,
    Md,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Md => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "md" | "markdown" => Ok(ReportFormat::Md),
            other => Err(format!("unknown format `{other}` (expected csv, json, or md)")),
        }
    }
}

/// A rendered file: its name relative to the output directory and its text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableFile {
    pub name: String,
    pub contents: String,
}

/// Formats a real with six significant digits, switching to exponent
/// notation for very small or very large magnitudes.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

/// A header plus rows of cells, rendered either way.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    fn markdown(&self) -> String {
        let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        let mut out = line(&self.header);
        out.push_str(&line(&vec!["---".to_string(); self.header.len()]));
        for row in &self.rows {
            out.push_str(&line(&row.iter().map(|c| if c.is_empty() { "n/a".to_string() } else { c.clone() }).collect::<Vec<_>>()));
        }
        out
    }

    fn render(&self, stem: &str, format: ReportFormat, json: &impl Serialize) -> TableFile {
        let contents = match format {
            ReportFormat::Csv => self.csv(),
            ReportFormat::Md => self.markdown(),
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(json).expect("section serializes");
                s.push('\n');
                s
            }
        };
        TableFile { name: format!("{stem}.{}", format.extension()), contents }
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// Square rho matrix with metric labels on both axes; undefined cells are empty.
pub fn heatmap_csv(matrix: &CorrelationMatrix) -> String {
    let labels: Vec<String> =
        matrix.ids.iter().map(|id| id.parse::<MetricId>().map(|m| m.label().to_string()).unwrap_or_else(|_| id.clone())).collect();
    let mut header = vec!["metric"];
    header.extend(labels.iter().map(String::as_str));
    let mut t = Table::new(&header);
    for (i, row) in matrix.entries.iter().enumerate() {
        let mut cells = vec![labels[i].clone()];
        cells.extend(row.iter().map(|c| opt_real(c.map(|r| r.rho))));
        t.rows.push(cells);
    }
    t.csv()
}

pub fn render_rq1(section: &Rq1Section, format: ReportFormat) -> Vec<TableFile> {
    let mut t = Table::new(&["metric_a", "metric_b", "group", "rho", "p_value", "p_reliable"]);
    for pair in &section.redundant_pairs {
        for g in &pair.groups {
            t.rows.push(vec![
                pair.a.label().into(),
                pair.b.label().into(),
                g.group.to_string(),
                format_real(g.rho),
                format_real(g.p_value),
                yes_no(g.p_reliable),
            ]);
        }
    }
    let mut files = vec![t.render("rq1_redundant_pairs", format, section)];
    if format == ReportFormat::Csv {
        for group in [Label::Vulnerable, Label::Neutral] {
            files.push(TableFile { name: format!("rq1_heatmap_{group}.csv"), contents: heatmap_csv(section.matrix(group)) });
        }
    }
    files
}

pub fn render_rq2(section: &Rq2Section, format: ReportFormat) -> Vec<TableFile> {
    let mut t = Table::new(&["metric", "rho", "p_value", "strength", "significant"]);
    for row in &section.rows {
        let r = row.result.as_ref();
        t.rows.push(vec![
            row.metric.label().into(),
            opt_real(r.map(|r| r.rho)),
            opt_real(r.map(|r| r.p_value)),
            r.map(|r| format!("{:?}", r.strength).to_lowercase()).unwrap_or_default(),
            r.map(|r| yes_no(r.significant)).unwrap_or_default(),
        ]);
    }
    vec![t.render("rq2_correlations", format, section)]
}

pub fn render_rq3(section: &Rq3Section, format: ReportFormat) -> Vec<TableFile> {
    let mut t = Table::new(&["metric", "discriminative", "t", "df", "p_value", "welch_t", "welch_df", "welch_p_value"]);
    let get = |r: Option<&TTestResult>, f: fn(&TTestResult) -> f64| opt_real(r.map(f));
    for row in &section.rows {
        let (p, w) = (row.paired.as_ref(), row.welch.as_ref());
        t.rows.push(vec![
            row.metric.label().into(),
            yes_no(row.discriminative),
            get(p, |r| r.t_statistic),
            get(p, |r| r.degrees_of_freedom),
            get(p, |r| r.p_value),
            get(w, |r| r.t_statistic),
            get(w, |r| r.degrees_of_freedom),
            get(w, |r| r.p_value),
        ]);
    }
    vec![t.render("rq3_paired_t", format, section)]
}

pub fn render_rq4(section: &Rq4Section, format: ReportFormat) -> Vec<TableFile> {
    let mut t = Table::new(&[
        "metric",
        "vulnerable_mean",
        "vulnerable_lower",
        "vulnerable_upper",
        "neutral_mean",
        "neutral_lower",
        "neutral_upper",
        "direction",
    ]);
    for row in &section.rows {
        let (v, n) = (&row.vulnerable, &row.neutral);
        t.rows.push(vec![
            row.metric.label().into(),
            format_real(v.mean),
            format_real(v.lower),
            format_real(v.upper),
            format_real(n.mean),
            format_real(n.lower),
            format_real(n.upper),
            row.direction.as_str().into(),
        ]);
    }
    vec![t.render("rq4_intervals", format, section)]
}

/// Every table file of a full report, in a fixed order.
pub fn render_tables(report: &AnalysisReport, formats: &[ReportFormat]) -> Vec<TableFile> {
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    let mut files = Vec::new();
    for &f in &formats {
        files.extend(render_rq1(&report.rq1, f));
        files.extend(render_rq2(&report.rq2, f));
        files.extend(render_rq3(&report.rq3, f));
        files.extend(render_rq4(&report.rq4, f));
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::testutil::{lcg, synthetic};
    use crate::pipeline::{analyze, AnalysisConfig};

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_real(0.152963412), "0.152963");
        assert_eq!(format_real(-0.0770001), "-0.0770001");
        assert_eq!(format_real(3.0), "3.00000");
        assert_eq!(format_real(1234567.8), "1.23457e6");
        assert_eq!(format_real(1.5e-9), "1.50000e-9");
        assert_eq!(format_real(0.0), "0");
        for x in [0.000123456789, 98765.4321, -2.5, 7.77e-12] {
            let back: f64 = format_real(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-6, "{x}");
        }
    }

    #[test]
    fn markdown_and_csv_shapes() {
        let labels: Vec<Label> = (0..16).map(|i| if i % 2 == 0 { Label::Vulnerable } else { Label::Neutral }).collect();
        let set = synthetic(&labels, |i, m| lcg(i, m as u64 + 3));
        let report = analyze(&set, &AnalysisConfig::default()).unwrap();
        let files = render_tables(&report, &[ReportFormat::Md, ReportFormat::Csv, ReportFormat::Csv]);
        let names: Vec<&str> = files.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "rq1_redundant_pairs.csv",
                "rq1_heatmap_vulnerable.csv",
                "rq1_heatmap_neutral.csv",
                "rq2_correlations.csv",
                "rq3_paired_t.csv",
                "rq4_intervals.csv",
                "rq1_redundant_pairs.md",
                "rq2_correlations.md",
                "rq3_paired_t.md",
                "rq4_intervals.md",
            ]
        );
        let rq2 = &files[3].contents;
        assert_eq!(rq2.lines().count(), 22);
        assert!(rq2.lines().nth(16).unwrap().starts_with("Avg. McCC,"));
        let heat = &files[1].contents;
        assert_eq!(heat.lines().count(), 22);
        assert_eq!(heat.lines().nth(1).unwrap().split(',').nth(1), Some("1.00000"));
        assert!(files[7].contents.starts_with("| metric | rho |"));
    }
}
