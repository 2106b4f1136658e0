use serde::{Deserialize, Serialize};

use super::{require_rows, Result};
use crate::corpus::{Label, LabeledContractSet};
use crate::metrics::MetricId;
use crate::stats::{rank, spearman_from_ranks, SpearmanResult, StatsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Row {
    pub metric: MetricId,
    /// `None` when the metric column is constant.
    pub result: Option<SpearmanResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Section {
    pub rows: Vec<Rq2Row>,
}

impl Rq2Section {
    pub fn get(&self, metric: MetricId) -> Option<&SpearmanResult> {
        self.rows.iter().find(|r| r.metric == metric)?.result.as_ref()
    }
}

/// Spearman between each metric and the 0/1 vulnerability indicator.
pub fn rq2_metric_vs_vulnerability(set: &LabeledContractSet, significance: f64) -> Result<Rq2Section> {
    require_rows(set, Label::Vulnerable, 1)?;
    require_rows(set, Label::Neutral, 1)?;
    let indicator: Vec<f64> = set.rows.iter().map(|r| r.label.indicator()).collect();
    let label_ranks = rank(&indicator)?;
    let mut rows = Vec::with_capacity(MetricId::ALL.len());
    for metric in MetricId::ALL {
        let result = match spearman_from_ranks(&rank(&set.column(metric))?, &label_ranks) {
            Ok(r) => Some(r.with_alpha(significance)),
            Err(StatsError::Degenerate(_)) => None,
            Err(e) => return Err(e.into()),
        };
        rows.push(Rq2Row { metric, result });
    }
    Ok(Rq2Section { rows })
}
