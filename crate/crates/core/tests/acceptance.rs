//! Acceptance checks, one printed line per criterion.
//!
//! Criteria 4 to 7 need the labeled public corpus: point `SCMETRICS_DATASET`
//! at a directory holding `manifest.csv` and the sources it lists. Without it
//! they report SKIP and criterion 8 stands in for them.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{synthetic_set, write_corpus, write_manifest, FixtureEntry};
use scmetrics::corpus::{export_metrics, ingest, ingest_with_jobs, load_manifest, ExportFormat, Label, LabeledContractSet};
use scmetrics::frontend::parse_source;
use scmetrics::metrics::{measure_files, ContractMetrics, MetricId};
use scmetrics::pipeline::{
    analyze, rq1_redundancy, rq2_metric_vs_vulnerability, rq3_discriminative, rq4_interval_comparison, AnalysisConfig,
    Direction,
};
use scmetrics::stats::{
    correlation_matrix, mean_confidence_interval, paired_t_test, spearman, student_t_cdf, welch_t_test,
};
use scmetrics::with_jobs;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

struct Report {
    lines: Vec<String>,
    failed: usize,
}

impl Report {
    fn record(&mut self, number: u32, title: &str, outcome: Outcome) {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        let line = format!("[{tag}] {number}. {title}: {detail}");
        println!("{line}");
        self.lines.push(line);
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

// 1

fn golden_corpus() -> Outcome {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden"));
    let mut reader = csv::Reader::from_path(dir.join("expected.csv")).unwrap();
    let expected: Vec<(String, String, ContractMetrics)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let f: Vec<&str> = r.iter().collect();
            (f[0].to_string(), f[1].to_string(), ContractMetrics::from_csv_fields(&f[2..]).unwrap())
        })
        .collect();
    let files: BTreeSet<String> = expected.iter().map(|e| e.0.clone()).collect();

    let (measured, elapsed) = timed(|| {
        let mut out = Vec::new();
        for file in &files {
            let parsed = parse_source(&fs::read_to_string(dir.join(file)).unwrap(), file).unwrap();
            out.extend(measure_files(&[parsed]).unwrap());
        }
        out
    });

    let mut wrong = Vec::new();
    for (file, name, want) in &expected {
        match measured.iter().find(|(id, _)| &id.file == file && &id.name == name) {
            Some((_, got)) => {
                for m in MetricId::ALL {
                    if (want.get(m) - got.get(m)).abs() > 1e-9 {
                        wrong.push(format!("{file}:{name} {}", m.key()));
                    }
                }
            }
            None => wrong.push(format!("{file}:{name} missing")),
        }
    }
    let ok = expected.len() >= 12 && wrong.is_empty() && elapsed < Duration::from_secs(1);
    check(
        ok,
        format!(
            "{} snippets, {} contracts, {} mismatches{} in {:.3}s (limit 1s)",
            files.len(),
            expected.len(),
            wrong.len(),
            if wrong.is_empty() { String::new() } else { format!(" [{}]", wrong.join(", ")) },
            elapsed.as_secs_f64()
        ),
    )
}

// 2

fn closed_form_rho(x: &[f64], y: &[f64]) -> f64 {
    let ranks = |v: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in order.iter().enumerate() {
            r[i] = (pos + 1) as f64;
        }
        r
    };
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn brute_force_rho(x: &[f64], y: &[f64]) -> f64 {
    let ranks = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let below = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn spearman_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ((tie_free, tied), elapsed) = timed(|| {
        let mut tie_free = 0.0f64;
        for _ in 0..1000 {
            let n = rng.random_range(3..=50);
            let mut x: Vec<f64> = (0..n).map(|i| i as f64 * 1.5 - 7.0).collect();
            let mut y: Vec<f64> = (0..n).map(|i| (i as f64).powi(2) + 0.25).collect();
            x.shuffle(&mut rng);
            y.shuffle(&mut rng);
            let rho = spearman(&x, &y).unwrap().rho;
            tie_free = tie_free.max((rho - closed_form_rho(&x, &y)).abs());
        }
        let mut tied = 0.0f64;
        let mut compared = 0;
        while compared < 1000 {
            let n = rng.random_range(3..=50);
            let levels = rng.random_range(2..=6);
            let x: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..levels))).collect();
            let y: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..levels))).collect();
            // Constant columns have no defined rho.
            if let Ok(r) = spearman(&x, &y) {
                tied = tied.max((r.rho - brute_force_rho(&x, &y)).abs());
                compared += 1;
            }
        }
        (tie_free, tied)
    });
    check(
        tie_free <= 1e-12 && tied <= 1e-10 && elapsed < Duration::from_secs(10),
        format!(
            "tie-free max |diff| {tie_free:.2e} (tol 1e-12), tied max |diff| {tied:.2e} (tol 1e-10), {:.3}s (limit 10s)",
            elapsed.as_secs_f64()
        ),
    )
}

// 3

fn student_t_accuracy() -> Outcome {
    let cauchy = (student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs();
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let t = -50.0 + 100.0 * f64::from(i) / 9_999.0;
        let df = [1.0, 2.0, 3.5, 10.0, 30.0, 117.0, 1000.0, 1e5][i as usize % 8];
        let sum = student_t_cdf(t, df).unwrap() + student_t_cdf(-t, df).unwrap();
        worst = worst.max((sum - 1.0).abs());
    }
    check(
        cauchy <= 1e-10 && worst <= 1e-10,
        format!("|cdf(1,1) - 0.75| = {cauchy:.2e}, symmetry max |diff| {worst:.2e} on 10^4 points (tol 1e-10)"),
    )
}

// 4 to 7

const PUBLISHED_RHO: [(MetricId, f64); 21] = [
    (MetricId::Sloc, 0.153),
    (MetricId::Lloc, 0.132),
    (MetricId::Cloc, -0.077),
    (MetricId::Nf, 0.123),
    (MetricId::Wmc, 0.130),
    (MetricId::Nl, 0.146),
    (MetricId::Nle, 0.144),
    (MetricId::Numpar, 0.082),
    (MetricId::Nos, 0.160),
    (MetricId::Dit, 0.099),
    (MetricId::Noa, 0.102),
    (MetricId::Nod, -0.042),
    (MetricId::Cbo, 0.182),
    (MetricId::Na, 0.170),
    (MetricId::Noi, 0.165),
    (MetricId::AvgMccc, 0.127),
    (MetricId::AvgNl, 0.121),
    (MetricId::AvgNle, 0.116),
    (MetricId::AvgNumpar, -0.037),
    (MetricId::AvgNos, 0.144),
    (MetricId::AvgNoi, 0.145),
];

fn load_dataset() -> Result<LabeledContractSet, String> {
    let dir = PathBuf::from(std::env::var_os("SCMETRICS_DATASET").ok_or("SCMETRICS_DATASET not set")?);
    let manifest = load_manifest(&dir.join("manifest.csv")).map_err(|e| e.to_string())?;
    let ingested = ingest(&manifest, &dir).map_err(|e| e.to_string())?;
    println!(
        "dataset: {} rows ({} vulnerable, {} neutral), {} diagnostics",
        ingested.set.len(),
        ingested.set.n_vulnerable,
        ingested.set.n_neutral,
        ingested.diagnostics.len()
    );
    Ok(ingested.set)
}

fn label_correlations(set: &LabeledContractSet) -> Outcome {
    let (section, elapsed) = timed(|| rq2_metric_vs_vulnerability(set, 0.05));
    let section = match section {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (metric, want) in PUBLISHED_RHO {
        match section.get(metric).copied() {
            Some(r) => {
                let diff = (r.rho - want).abs();
                worst = worst.max(diff);
                if diff > 0.05 || r.rho.signum() != want.signum() || r.p_value >= 0.05 {
                    bad.push(format!("{metric} rho {:.3} p {:.3}", r.rho, r.p_value));
                }
            }
            None => bad.push(format!("{metric} undefined")),
        }
    }
    check(
        bad.is_empty(),
        format!(
            "max |rho - published| {worst:.3} (tol 0.05), {} rows off [{}], {:.1}s",
            bad.len(),
            bad.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn discriminative_seeds(set: &LabeledContractSet) -> Outcome {
    let mut all_flagged = 0;
    let mut misses: Vec<(MetricId, u32)> = Vec::new();
    for seed in 0..100u64 {
        let section = match rq3_discriminative(set, seed, 0.05) {
            Ok(s) => s,
            Err(e) => return Outcome::Fail(format!("seed {seed}: {e}")),
        };
        let mut every = true;
        for row in &section.rows {
            if !row.discriminative {
                every = false;
                match misses.iter_mut().find(|(m, _)| *m == row.metric) {
                    Some((_, c)) => *c += 1,
                    None => misses.push((row.metric, 1)),
                }
            }
        }
        all_flagged += u32::from(every);
    }
    let detail: Vec<String> = misses.iter().map(|(m, c)| format!("{m} x{c}")).collect();
    check(all_flagged >= 95, format!("{all_flagged}/100 seeds flag all 21 metrics (need 95); misses [{}]", detail.join(", ")))
}

fn rq4_directions(set: &LabeledContractSet) -> Outcome {
    let section = match rq4_interval_comparison(set, 0.95) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let neutral: BTreeSet<MetricId> = section.with_direction(Direction::HigherInNeutral).into_iter().collect();
    let vulnerable: BTreeSet<MetricId> = section.with_direction(Direction::HigherInVulnerable).into_iter().collect();
    let want_neutral = BTreeSet::from([MetricId::AvgNumpar, MetricId::Cloc, MetricId::Nod]);
    let want_vulnerable = [
        MetricId::Sloc,
        MetricId::Lloc,
        MetricId::Nos,
        MetricId::Cbo,
        MetricId::Na,
        MetricId::Noi,
        MetricId::Wmc,
        MetricId::Nl,
        MetricId::Nle,
    ];
    let missing: Vec<String> = want_vulnerable.iter().filter(|m| !vulnerable.contains(m)).map(|m| m.to_string()).collect();
    let names = |s: &BTreeSet<MetricId>| s.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ");
    check(
        neutral == want_neutral && missing.is_empty(),
        format!("higher-in-neutral {{{}}}, missing higher-in-vulnerable [{}]", names(&neutral), missing.join(", ")),
    )
}

fn rq1_pairs(set: &LabeledContractSet) -> Outcome {
    let section = match rq1_redundancy(set, 0.9, 0.05) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let wanted = [(MetricId::Noa, MetricId::Dit), (MetricId::Noi, MetricId::AvgNoi), (MetricId::Nl, MetricId::Nle)];
    let mut detail = Vec::new();
    let mut ok = true;
    for (a, b) in wanted {
        match section.find(a, b) {
            Some(p) if p.max_abs_rho() > 0.9 => detail.push(format!("({a}, {b}) {:.3}", p.max_abs_rho())),
            _ => {
                ok = false;
                detail.push(format!("({a}, {b}) absent"));
            }
        }
    }
    check(ok, format!("{} redundant pairs; {}", section.redundant_pairs.len(), detail.join(", ")))
}

// 8

fn random_case(rng: &mut ChaCha8Rng) -> (Vec<Label>, Vec<Vec<u16>>) {
    loop {
        let n = rng.random_range(8..60);
        let labels: Vec<Label> =
            (0..n).map(|_| if rng.random_bool(0.5) { Label::Vulnerable } else { Label::Neutral }).collect();
        let v = labels.iter().filter(|l| **l == Label::Vulnerable).count();
        if v >= 3 && n - v >= 3 {
            let values = (0..n).map(|_| (0..21).map(|_| rng.random_range(0..40)).collect()).collect();
            return (labels, values);
        }
    }
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures: Vec<&str> = Vec::new();
    let mut fail = |name: &'static str| {
        if !failures.contains(&name) {
            failures.push(name);
        }
    };

    for _ in 0..40 {
        let (labels, vals) = random_case(&mut rng);
        let set = synthetic_set(&labels, |i, m| f64::from(vals[i][m as usize]));

        // Relabeling swap negates every rq2 coefficient.
        let a = rq2_metric_vs_vulnerability(&set, 0.05).unwrap();
        let b = rq2_metric_vs_vulnerability(&set.with_swapped_labels(), 0.05).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            if x.result.map(|r| -r.rho) != y.result.map(|r| r.rho) {
                fail("relabel swap");
            }
        }

        // Rank statistics ignore strictly increasing transforms.
        let moved = synthetic_set(&labels, |i, m| {
            let x = f64::from(vals[i][m as usize]);
            if (m as usize) < 15 { 5.0 * x + 2.0 } else { x.exp() }
        });
        let c = rq2_metric_vs_vulnerability(&moved, 0.05).unwrap();
        for (x, y) in a.rows.iter().zip(&c.rows) {
            if x.result.map(|r| r.rho) != y.result.map(|r| r.rho) {
                fail("monotone invariance");
            }
        }
        let cols = |s: &LabeledContractSet| -> Vec<(String, Vec<f64>)> {
            MetricId::ALL.iter().map(|&m| (m.key().to_string(), s.column(m))).collect()
        };
        let (m1, m2) = (correlation_matrix(&cols(&set)).unwrap(), correlation_matrix(&cols(&moved)).unwrap());
        for (r1, r2) in m1.entries.iter().zip(&m2.entries) {
            for (e1, e2) in r1.iter().zip(r2) {
                if e1.map(|e| e.rho) != e2.map(|e| e.rho) {
                    fail("monotone invariance");
                }
            }
        }

        // Swapping t-test arguments negates t and keeps p.
        let x: Vec<f64> = vals.iter().map(|r| f64::from(r[0]) + f64::from(r[1]) / 3.0).collect();
        let y: Vec<f64> = vals.iter().map(|r| f64::from(r[2]) * 0.7).collect();
        for (fwd, rev) in [
            (paired_t_test(&x, &y), paired_t_test(&y, &x)),
            (welch_t_test(&x[..x.len() / 2], &y), welch_t_test(&y, &x[..x.len() / 2])),
        ] {
            match (fwd, rev) {
                (Ok(f), Ok(r)) if f.t_statistic == -r.t_statistic && f.p_value == r.p_value => {}
                (Err(_), Err(_)) => {}
                _ => fail("t antisymmetry"),
            }
        }

        // Wider levels give nested intervals.
        let cis: Vec<_> = [0.8, 0.9, 0.95, 0.99].iter().map(|&l| mean_confidence_interval(&x, l).unwrap()).collect();
        if cis.windows(2).any(|w| w[1].lower > w[0].lower || w[1].upper < w[0].upper) {
            fail("CI nesting");
        }

        // Full analysis is identical at any thread count.
        let config = AnalysisConfig { seed: rng.random(), ..Default::default() };
        let one = with_jobs(Some(1), || analyze(&set, &config).unwrap().to_json()).unwrap();
        let four = with_jobs(Some(4), || analyze(&set, &config).unwrap().to_json()).unwrap();
        if one != four {
            fail("jobs determinism");
        }
    }

    for _ in 0..8 {
        let shapes: Vec<(u64, Label)> = (0..rng.random_range(2..10))
            .map(|_| (rng.random(), if rng.random_bool(0.5) { Label::Vulnerable } else { Label::Neutral }))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let entries = write_corpus(dir.path(), &shapes);
        let manifest_path = dir.path().join("manifest.csv");
        let manifest = load_manifest(&manifest_path).unwrap();
        let exports: Vec<Vec<u8>> = [Some(1), Some(4)]
            .into_iter()
            .map(|jobs| {
                let mut buf = Vec::new();
                export_metrics(&ingest_with_jobs(&manifest, dir.path(), jobs).unwrap().set, ExportFormat::Json, &mut buf)
                    .unwrap();
                buf
            })
            .collect();
        if exports[0] != exports[1] {
            fail("jobs determinism");
        }

        // Copies of every file collapse back onto the originals.
        let original = ingest(&manifest, dir.path()).unwrap();
        let mut doubled: Vec<FixtureEntry> = Vec::new();
        for e in &entries {
            doubled.push(FixtureEntry { file: e.file.clone(), contract: e.contract.clone(), label: e.label });
        }
        for e in &entries {
            let copy = format!("dup_{}", e.file);
            fs::copy(dir.path().join(&e.file), dir.path().join(&copy)).unwrap();
            doubled.push(FixtureEntry { file: copy, contract: e.contract.clone(), label: e.label });
        }
        write_manifest(dir.path(), &doubled);
        let again = ingest(&load_manifest(&manifest_path).unwrap(), dir.path()).unwrap();
        if again.set.rows != original.set.rows || again.diagnostics.len() != entries.len() {
            fail("dedupe idempotence");
        }
    }

    let all = [
        "relabel swap",
        "monotone invariance",
        "t antisymmetry",
        "CI nesting",
        "dedupe idempotence",
        "jobs determinism",
    ];
    let mut detail = String::new();
    for name in all {
        let _ = write!(detail, "{}{name} {}", if detail.is_empty() { "" } else { ", " }, if failures.contains(&name) { "FAIL" } else { "ok" });
    }
    check(failures.is_empty(), detail)
}

#[test]
fn acceptance() {
    let mut report = Report { lines: Vec::new(), failed: 0 };
    report.record(1, "golden metric corpus", golden_corpus());
    report.record(2, "Spearman oracle equivalence", spearman_oracles());
    report.record(3, "Student-t accuracy", student_t_accuracy());

    let titles = [
        (4, "published label correlations"),
        (5, "RQ3 discriminative flags over 100 seeds"),
        (6, "RQ4 directions"),
        (7, "RQ1 redundant pairs"),
    ];
    match load_dataset() {
        Ok(set) => {
            report.record(4, titles[0].1, label_correlations(&set));
            report.record(5, titles[1].1, discriminative_seeds(&set));
            report.record(6, titles[2].1, rq4_directions(&set));
            report.record(7, titles[3].1, rq1_pairs(&set));
        }
        Err(reason) => {
            for (n, title) in titles {
                report.record(n, title, Outcome::Skip(format!("dataset unavailable ({reason})")));
            }
        }
    }

    report.record(8, "dataset-independent property suites", property_suites());
    assert_eq!(report.failed, 0, "\n{}", report.lines.join("\n"));
}
