//! Labeled corpora: manifest loading, ingestion with deduplication, and
//! metric table export.

mod export;
mod ingest;
mod manifest;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{ContractId, ContractMetrics, CycleError, MetricId};

pub use export::{export_metrics, import_metrics, ExportFormat};
pub use ingest::{contract_fingerprints, ingest, ingest_with_jobs, Ingested};
pub use manifest::{load_manifest, parse_manifest, CorpusManifest, Label, ManifestEntry, VulnType, MANIFEST_HEADER};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("corpus unusable: {skipped} of {total} entries skipped")]
    Unusable { skipped: usize, total: usize, diagnostics: Vec<CorpusDiagnostic> },
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("metric table: {0}")]
    Format(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Digest over every distinct source file the manifest names: each file's
/// path and content hash, in path order. Unreadable files hash as such.
pub fn dataset_digest(manifest: &CorpusManifest, root: &Path) -> String {
    let files: BTreeSet<&str> = manifest.entries.iter().map(|e| e.file.as_str()).collect();
    let mut listing = String::new();
    for file in files {
        let hash = std::fs::read(root.join(file)).map(crate::sha256_hex).unwrap_or_else(|_| "unreadable".into());
        listing.push_str(&format!("{file}\t{hash}\n"));
    }
    crate::sha256_hex(listing)
}

/// Where a labeled set came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub manifest_path: String,
    pub manifest_sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Unreadable,
    ParseFailure,
    NotFound,
    Duplicate,
}

/// A manifest entry that did not become a row. Displays as `file:contract: reason`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDiagnostic {
    pub file: String,
    pub contract: String,
    pub kind: DiagnosticKind,
    pub reason: String,
}

impl fmt::Display for CorpusDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.contract, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub id: ContractId,
    pub metrics: ContractMetrics,
    pub label: Label,
    pub vuln_type: Option<VulnType>,
}

/// Metric vectors joined with labels, sorted by contract id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledContractSet {
    pub rows: Vec<LabeledRow>,
    pub n_vulnerable: usize,
    pub n_neutral: usize,
    pub provenance: Option<Provenance>,
}

impl LabeledContractSet {
    pub fn new(mut rows: Vec<LabeledRow>, provenance: Option<Provenance>) -> Self {
        rows.sort_by(|a, b| a.id.cmp(&b.id));
        let n_vulnerable = rows.iter().filter(|r| r.label == Label::Vulnerable).count();
        let n_neutral = rows.len() - n_vulnerable;
        LabeledContractSet { rows, n_vulnerable, n_neutral, provenance }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, metric: MetricId) -> Vec<f64> {
        self.rows.iter().map(|r| r.metrics.get(metric)).collect()
    }

    /// Values of `metric` for rows with `label`, in row order.
    pub fn group_column(&self, metric: MetricId, label: Label) -> Vec<f64> {
        self.rows.iter().filter(|r| r.label == label).map(|r| r.metrics.get(metric)).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        match label {
            Label::Vulnerable => self.n_vulnerable,
            Label::Neutral => self.n_neutral,
        }
    }

    /// The same rows with vulnerable and neutral exchanged and type tags dropped.
    pub fn with_swapped_labels(&self) -> Self {
        let rows = self.rows.iter().map(|r| LabeledRow { label: r.label.swapped(), vuln_type: None, ..r.clone() }).collect();
        LabeledContractSet::new(rows, self.provenance.clone())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_vulnerable + self.n_neutral != self.rows.len() {
            return Err("label counts do not match row count".into());
        }
        if self.rows.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err("rows not strictly sorted by contract id".into());
        }
        for row in &self.rows {
            row.metrics.validate().map_err(|e| format!("{}: {e}", row.id))?;
            if row.vuln_type.is_some() && row.label == Label::Neutral {
                return Err(format!("{}: neutral row carries a vulnerability type", row.id));
            }
        }
        Ok(())
    }
}
