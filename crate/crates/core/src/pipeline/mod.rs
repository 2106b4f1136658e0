//! The four analyses over a labeled set, and their report renderings.

mod report;
mod rq1;
mod rq2;
mod rq3;
mod rq4;
mod run_manifest;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Label, LabeledContractSet, Provenance};
use crate::stats::StatsError;

pub use report::{format_real, heatmap_csv, render_rq1, render_rq2, render_rq3, render_rq4, render_tables, ReportFormat, TableFile};
pub use rq1::{rq1_redundancy, GroupCorrelation, RedundantPair, Rq1Section};
pub use rq2::{rq2_metric_vs_vulnerability, Rq2Row, Rq2Section};
pub use rq3::{rq3_discriminative, Rq3Row, Rq3Section};
pub use rq4::{rq4_interval_comparison, Direction, Rq4Row, Rq4Section};
pub use run_manifest::{DatasetRecord, OutputFile, RunManifest};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{label} group has {found} rows, at least {needed} required")]
    GroupTooSmall { label: Label, needed: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub seed: u64,
    pub ci_level: f64,
    pub redundancy_threshold: f64,
    pub significance: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { seed: 42, ci_level: 0.95, redundancy_threshold: 0.9, significance: 0.05 }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.ci_level) {
            return Err(PipelineError::InvalidConfig(format!("ci-level must be in (0, 1), got {}", self.ci_level)));
        }
        if !open_unit(self.significance) {
            return Err(PipelineError::InvalidConfig(format!("significance must be in (0, 1), got {}", self.significance)));
        }
        if !(self.redundancy_threshold > 0.0 && self.redundancy_threshold <= 1.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "redundancy threshold must be in (0, 1], got {}",
                self.redundancy_threshold
            )));
        }
        Ok(())
    }
}

/// Parameters and dataset facts recorded alongside the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    #[serde(flatten)]
    pub analysis: AnalysisConfig,
    pub n_vulnerable: usize,
    pub n_neutral: usize,
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: ReportConfig,
    pub rq1: Rq1Section,
    pub rq2: Rq2Section,
    pub rq3: Rq3Section,
    pub rq4: Rq4Section,
}

impl AnalysisReport {
    /// Pretty JSON with a trailing newline; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn report_config(set: &LabeledContractSet, config: &AnalysisConfig) -> ReportConfig {
    ReportConfig { analysis: *config, n_vulnerable: set.n_vulnerable, n_neutral: set.n_neutral, provenance: set.provenance.clone() }
}

/// Runs all four analyses. The runners are independent and run concurrently.
pub fn analyze(set: &LabeledContractSet, config: &AnalysisConfig) -> Result<AnalysisReport> {
    config.validate()?;
    let ((rq1, rq2), (rq3, rq4)) = rayon::join(
        || rayon::join(|| rq1_redundancy(set, config.redundancy_threshold, config.significance), || {
            rq2_metric_vs_vulnerability(set, config.significance)
        }),
        || rayon::join(|| rq3_discriminative(set, config.seed, config.significance), || {
            rq4_interval_comparison(set, config.ci_level)
        }),
    );
    Ok(AnalysisReport { config: report_config(set, config), rq1: rq1?, rq2: rq2?, rq3: rq3?, rq4: rq4? })
}

pub(crate) fn require_rows(set: &LabeledContractSet, label: Label, needed: usize) -> Result<()> {
    let found = set.count(label);
    if found < needed {
        return Err(PipelineError::GroupTooSmall { label, needed, found });
    }
    Ok(())
}
