use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{CorpusDiagnostic, CorpusError, CorpusManifest, DiagnosticKind, LabeledContractSet, LabeledRow};
use crate::frontend::{line_accounting, parse_source, ParsedFile, Token, TokenKind};
use crate::metrics::{contract_metrics, ContractId, InheritanceGraph};

/// A successful ingest: the labeled set plus one diagnostic per manifest
/// entry that did not become a row.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub set: LabeledContractSet,
    pub diagnostics: Vec<CorpusDiagnostic>,
}

/// Ingests on the global thread pool.
pub fn ingest(manifest: &CorpusManifest, root: &Path) -> Result<Ingested, CorpusError> {
    ingest_with_jobs(manifest, root, None)
}

/// Ingests with `jobs` worker threads (`None` for the rayon default).
/// Output does not depend on the thread count.
pub fn ingest_with_jobs(manifest: &CorpusManifest, root: &Path, jobs: Option<usize>) -> Result<Ingested, CorpusError> {
    match jobs {
        None => run(manifest, root),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CorpusError::ThreadPool(e.to_string()))?
            .install(|| run(manifest, root)),
    }
}

struct LoadedFile {
    parsed: ParsedFile,
    /// Contract name to fingerprint, first definition wins.
    fingerprints: HashMap<String, String>,
}

fn load(root: &Path, file: &str) -> Result<LoadedFile, (DiagnosticKind, String)> {
    let bytes = std::fs::read(root.join(file)).map_err(|e| (DiagnosticKind::Unreadable, format!("unreadable: {e}")))?;
    let source = String::from_utf8_lossy(&bytes);
    let parsed = parse_source(&source, file)
        .map_err(|e| (DiagnosticKind::ParseFailure, format!("parse failure: line {}: {}", e.line, e.message)))?;
    let fingerprints = contract_fingerprints(&parsed.tokens);
    Ok(LoadedFile { parsed, fingerprints })
}

fn run(manifest: &CorpusManifest, root: &Path) -> Result<Ingested, CorpusError> {
    let mut files: Vec<&str> = Vec::new();
    let mut file_index: HashMap<&str, usize> = HashMap::new();
    for e in &manifest.entries {
        file_index.entry(e.file.as_str()).or_insert_with(|| {
            files.push(e.file.as_str());
            files.len() - 1
        });
    }
    let loaded: Vec<Result<LoadedFile, (DiagnosticKind, String)>> = files.par_iter().map(|f| load(root, f)).collect();

    // Serialized merge: first occurrence of each fingerprint is canonical.
    let mut first_by_hash: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut canonical: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (fi, file) in loaded.iter().enumerate() {
        let Ok(file) = file else { continue };
        for (ci, contract) in file.parsed.unit.contracts.iter().enumerate() {
            let Some(hash) = file.fingerprints.get(&contract.name) else { continue };
            let first = *first_by_hash.entry(hash.as_str()).or_insert((fi, ci));
            canonical.insert((fi, ci), first);
        }
    }
    let mut graph_input = Vec::new();
    for (fi, file) in loaded.iter().enumerate() {
        let Ok(file) = file else { continue };
        for (ci, contract) in file.parsed.unit.contracts.iter().enumerate() {
            if canonical.get(&(fi, ci)).is_none_or(|&c| c == (fi, ci)) {
                graph_input.push((files[fi], contract));
            }
        }
    }
    let graph = InheritanceGraph::build(graph_input)?;

    let mut diagnostics = Vec::new();
    let mut pending: Vec<(usize, (usize, usize))> = Vec::new();
    let mut taken: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ei, entry) in manifest.entries.iter().enumerate() {
        let diag = |kind, reason: String| CorpusDiagnostic { file: entry.file.clone(), contract: entry.contract.clone(), kind, reason };
        let fi = file_index[entry.file.as_str()];
        let file = match &loaded[fi] {
            Ok(f) => f,
            Err((kind, reason)) => {
                diagnostics.push(diag(*kind, reason.clone()));
                continue;
            }
        };
        let Some(ci) = file.parsed.unit.contracts.iter().position(|c| c.name == entry.contract) else {
            let (kind, reason) = match file.parsed.diagnostics.first() {
                Some(d) => (DiagnosticKind::ParseFailure, format!("parse failure: line {}: {}", d.line, d.message)),
                None => (DiagnosticKind::NotFound, "contract not found in file".to_string()),
            };
            diagnostics.push(diag(kind, reason));
            continue;
        };
        let canon = canonical.get(&(fi, ci)).copied().unwrap_or((fi, ci));
        if let Some(&holder) = taken.get(&canon) {
            let other = &manifest.entries[holder];
            diagnostics.push(diag(DiagnosticKind::Duplicate, format!("duplicate of {}:{}", other.file, other.contract)));
            continue;
        }
        taken.insert(canon, ei);
        pending.push((ei, canon));
    }

    let total = manifest.entries.len();
    let duplicates = diagnostics.iter().filter(|d| d.kind == DiagnosticKind::Duplicate).count();
    let skipped = diagnostics.len() - duplicates;
    let usable = total - duplicates;
    if usable > 0 && skipped * 2 > usable {
        return Err(CorpusError::Unusable { skipped, total: usable, diagnostics });
    }

    let rows: Vec<LabeledRow> = pending
        .par_iter()
        .map(|&(ei, (fi, ci))| {
            let entry = &manifest.entries[ei];
            let file = loaded[fi].as_ref().expect("canonical file parsed");
            let contract = &file.parsed.unit.contracts[ci];
            let canon_id = ContractId::new(files[fi], &contract.name);
            let lines = line_accounting(contract, &file.parsed.tokens);
            LabeledRow {
                id: ContractId::new(&entry.file, &entry.contract),
                metrics: contract_metrics(&canon_id, contract, lines, &graph),
                label: entry.label,
                vuln_type: entry.vuln_type,
            }
        })
        .collect();

    Ok(Ingested { set: LabeledContractSet::new(rows, manifest.provenance.clone()), diagnostics })
}

/// Hashes each top-level contract's tokens with comments dropped and
/// whitespace collapsed to single spaces.
pub fn contract_fingerprints(tokens: &[Token]) -> HashMap<String, String> {
    let code: Vec<&Token> = tokens.iter().filter(|t| !t.kind.is_comment()).collect();
    let mut out = HashMap::new();
    let mut i = 0;
    while i < code.len() {
        let t = code[i];
        let opens_contract = matches!(t.text.as_str(), "contract" | "interface" | "library")
            && code.get(i + 1).is_some_and(|n| n.kind == TokenKind::Identifier);
        if !opens_contract {
            if t.is("{") {
                i = skip_group(&code, i);
            } else {
                i += 1;
            }
            continue;
        }
        let start = if i > 0 && code[i - 1].is("abstract") { i - 1 } else { i };
        let name = code[i + 1].text.clone();
        let mut j = i;
        while j < code.len() && !code[j].is("{") {
            j += 1;
        }
        let end = skip_group(&code, j).min(code.len());
        let mut hasher = Sha256::new();
        for (k, tok) in code[start..end].iter().enumerate() {
            if k > 0 {
                hasher.update(b" ");
            }
            hasher.update(tok.text.as_bytes());
        }
        out.entry(name).or_insert_with(|| hex::encode(hasher.finalize()));
        i = end.max(i + 1);
    }
    out
}

/// Index just past the `}` matching the `{` at `open`.
fn skip_group(code: &[&Token], open: usize) -> usize {
    let mut depth = 0usize;
    for (k, t) in code.iter().enumerate().skip(open) {
        if t.is("{") {
            depth += 1;
        } else if t.is("}") {
            depth = depth.saturating_sub(1);
            if depth == 0 {
                return k + 1;
            }
        }
    }
    code.len()
}
