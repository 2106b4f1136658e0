//! Rank correlation, t-tests, and confidence intervals.

mod interval;
mod matrix;
mod rank;
mod spearman;
mod student_t;
mod ttest;

use thiserror::Error;

pub use interval::{mean_confidence_interval, ConfidenceInterval};
pub use matrix::{correlation_matrix, CorrelationMatrix};
pub use rank::{rank, RankedVector};
pub use spearman::{spearman, spearman_from_ranks, SpearmanResult, Strength};
pub use student_t::{student_t_cdf, student_t_quantile, student_t_sf};
pub use ttest::{paired_t_test, welch_t_test, TTestKind, TTestResult};

/// Conventional significance threshold.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, StatsError>;

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with the n - 1 denominator.
pub(crate) fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}
