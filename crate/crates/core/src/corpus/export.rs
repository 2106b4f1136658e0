use std::io::{Read, Write};
use std::str::FromStr;

use super::{CorpusError, Label, LabeledContractSet, LabeledRow, VulnType};
use crate::metrics::{ContractId, ContractMetrics, MetricId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

fn csv_header() -> Vec<&'static str> {
    let mut h = vec!["file", "contract"];
    h.extend(MetricId::ALL.iter().map(|m| m.key()));
    h.extend(["label", "type"]);
    h
}

fn format_err(e: impl ToString) -> CorpusError {
    CorpusError::Format(e.to_string())
}

/// Writes the set sorted by contract id. CSV carries rows only; JSON also
/// carries counts and provenance.
pub fn export_metrics(set: &LabeledContractSet, format: ExportFormat, out: impl Write) -> Result<(), CorpusError> {
    if set.is_empty() {
        return Err(CorpusError::Format("nothing to export: the set is empty".into()));
    }
    let mut rows: Vec<&LabeledRow> = set.rows.iter().collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    match format {
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(csv_header()).map_err(format_err)?;
            for row in rows {
                let mut record = vec![row.id.file.clone(), row.id.name.clone()];
                record.extend(row.metrics.csv_fields());
                record.push(row.label.to_string());
                record.push(row.vuln_type.map(|t| t.to_string()).unwrap_or_default());
                w.write_record(&record).map_err(format_err)?;
            }
            w.flush().map_err(format_err)?;
        }
        ExportFormat::Json => {
            let sorted = LabeledContractSet::new(rows.into_iter().cloned().collect(), set.provenance.clone());
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &sorted).map_err(format_err)?;
            out.write_all(b"\n").map_err(format_err)?;
        }
    }
    Ok(())
}

pub fn import_metrics(input: impl Read, format: ExportFormat) -> Result<LabeledContractSet, CorpusError> {
    match format {
        ExportFormat::Json => {
            let set: LabeledContractSet = serde_json::from_reader(input).map_err(format_err)?;
            set.validate().map_err(CorpusError::Format)?;
            Ok(set)
        }
        ExportFormat::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let header = r.headers().map_err(format_err)?.clone();
            if header.iter().ne(csv_header()) {
                return Err(CorpusError::Format("unexpected metric table header".into()));
            }
            let mut rows = Vec::new();
            for record in r.records() {
                let record = record.map_err(format_err)?;
                let line = record.position().map_or(0, |p| p.line());
                let at = |m: String| CorpusError::Format(format!("line {line}: {m}"));
                let fields: Vec<&str> = record.iter().collect();
                let metrics = ContractMetrics::from_csv_fields(&fields[2..23]).map_err(at)?;
                let label = fields[23].parse::<Label>().map_err(at)?;
                let vuln_type = match fields[24] {
                    "" => None,
                    code => Some(code.parse::<VulnType>().map_err(at)?),
                };
                rows.push(LabeledRow { id: ContractId::new(fields[0], fields[1]), metrics, label, vuln_type });
            }
            let set = LabeledContractSet::new(rows, None);
            set.validate().map_err(CorpusError::Format)?;
            Ok(set)
        }
    }
}
