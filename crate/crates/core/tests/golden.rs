//! Hand-counted metric vectors for the snippets under `tests/golden`.

use std::collections::BTreeMap;
use std::path::Path;

use scmetrics::frontend::parse_source;
use scmetrics::metrics::{measure_files, ContractMetrics, MetricId};

fn golden_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden"))
}

fn expected() -> BTreeMap<(String, String), ContractMetrics> {
    let mut reader = csv::Reader::from_path(golden_dir().join("expected.csv")).unwrap();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let fields: Vec<&str> = r.iter().collect();
            ((fields[0].to_string(), fields[1].to_string()), ContractMetrics::from_csv_fields(&fields[2..]).unwrap())
        })
        .collect()
}

fn measured() -> BTreeMap<(String, String), ContractMetrics> {
    let mut out = BTreeMap::new();
    let mut files: Vec<_> = std::fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sol"))
        .collect();
    files.sort();
    for path in files {
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let parsed = parse_source(&std::fs::read_to_string(&path).unwrap(), &name).unwrap();
        assert!(parsed.diagnostics.is_empty(), "{name}: {:?}", parsed.diagnostics);
        // Each snippet is its own corpus.
        for (id, m) in measure_files(&[parsed]).unwrap() {
            out.insert((id.file, id.name), m);
        }
    }
    out
}

fn mismatches(want: &ContractMetrics, got: &ContractMetrics) -> Vec<String> {
    MetricId::ALL
        .iter()
        .filter(|&&m| (want.get(m) - got.get(m)).abs() > 1e-9)
        .map(|&m| format!("{}: want {} got {}", m.key(), want.get(m), got.get(m)))
        .collect()
}

#[test]
fn golden_vectors_match_hand_counts() {
    let want = expected();
    let got = measured();
    assert!(want.len() >= 12);
    assert_eq!(want.keys().collect::<Vec<_>>(), got.keys().collect::<Vec<_>>());
    let mut failures = Vec::new();
    for (key, w) in &want {
        let diff = mismatches(w, &got[key]);
        if !diff.is_empty() {
            failures.push(format!("{}:{}: {}", key.0, key.1, diff.join(", ")));
        }
        got[key].validate().unwrap();
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}
