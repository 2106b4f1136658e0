//! Fixture corpora shared by integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::Path;

use scmetrics::corpus::{Label, LabeledContractSet, LabeledRow};
use scmetrics::metrics::{ContractId, ContractMetrics, MetricId};

/// A contract whose shape is driven by `shape`, so metric columns vary.
pub fn contract_source(name: &str, base: Option<&str>, shape: u64) -> String {
    let digit = |k: u32| (shape / 7u64.pow(k)) % 7;
    let mut s = String::new();
    for c in 0..digit(0) % 3 {
        s.push_str(&format!("// comment {c}\n"));
    }
    let is = base.map(|b| format!(" is {b}")).unwrap_or_default();
    s.push_str(&format!("contract {name}{is} {{\n"));
    for v in 0..digit(1) % 4 {
        s.push_str(&format!("    uint256 public s{v};\n"));
    }
    for f in 0..1 + digit(2) % 3 {
        let params: Vec<String> = (0..(digit(3) + f) % 3).map(|p| format!("uint256 p{p}")).collect();
        s.push_str(&format!("    function f{f}({}) public {{\n", params.join(", ")));
        let depth = (digit(4) + f) % 4;
        for d in 0..depth {
            let cond = if d % 2 == 0 { format!("s0 > {d} && x > 1") } else { format!("s0 < {d}") };
            s.push_str(&format!("        if ({cond}) {{\n"));
        }
        for c in 0..(digit(5) + f) % 4 {
            s.push_str(&format!("        helper{c}(s0);\n"));
        }
        for _ in 0..depth {
            s.push_str("        }\n");
        }
        s.push_str("    }\n");
    }
    s.push_str("}\n");
    s
}

pub struct FixtureEntry {
    pub file: String,
    pub contract: String,
    pub label: Label,
}

/// Writes one contract per file plus `manifest.csv`; every third contract
/// inherits from a shared `Base` in `base.sol`.
pub fn write_corpus(dir: &Path, shapes: &[(u64, Label)]) -> Vec<FixtureEntry> {
    fs::write(dir.join("base.sol"), "contract Base {\n    uint256 internal s0;\n}\n").unwrap();
    let mut entries = vec![FixtureEntry { file: "base.sol".into(), contract: "Base".into(), label: Label::Neutral }];
    for (i, (shape, label)) in shapes.iter().enumerate() {
        let name = format!("K{i}");
        let base = (i % 3 == 0).then_some("Base");
        fs::write(dir.join(format!("k{i}.sol")), contract_source(&name, base, *shape)).unwrap();
        entries.push(FixtureEntry { file: format!("k{i}.sol"), contract: name, label: *label });
    }
    write_manifest(dir, &entries);
    entries
}

pub fn write_manifest(dir: &Path, entries: &[FixtureEntry]) {
    let mut text = String::from("file,contract,label,type\n");
    for e in entries {
        text.push_str(&format!("{},{},{},\n", e.file, e.contract, e.label));
    }
    fs::write(dir.join("manifest.csv"), text).unwrap();
}

/// A labeled set built straight from metric values; row `i` gets `f(i, metric)`.
pub fn synthetic_set(labels: &[Label], f: impl Fn(usize, MetricId) -> f64) -> LabeledContractSet {
    let rows = labels
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            let fields: Vec<String> = MetricId::ALL
                .iter()
                .enumerate()
                .map(|(k, &m)| if k < 15 { (f(i, m).round().max(0.0) as u64).to_string() } else { f(i, m).max(0.0).to_string() })
                .collect();
            let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
            LabeledRow {
                id: ContractId::new(format!("s{i:05}.sol"), "S"),
                metrics: ContractMetrics::from_csv_fields(&refs).unwrap(),
                label,
                vuln_type: None,
            }
        })
        .collect();
    LabeledContractSet::new(rows, None)
}
