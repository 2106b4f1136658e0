use serde::{Deserialize, Serialize};

use super::{require_rows, Result};
use crate::corpus::{Label, LabeledContractSet};
use crate::metrics::MetricId;
use crate::stats::{correlation_matrix, CorrelationMatrix, SpearmanResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupCorrelation {
    pub group: Label,
    pub rho: f64,
    pub p_value: f64,
    /// Whether the p-value clears the significance threshold.
    pub p_reliable: bool,
}

/// A metric pair whose |rho| exceeds the threshold in at least one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundantPair {
    pub a: MetricId,
    pub b: MetricId,
    /// One entry per group in which the pair is redundant.
    pub groups: Vec<GroupCorrelation>,
}

impl RedundantPair {
    pub fn max_abs_rho(&self) -> f64 {
        self.groups.iter().map(|g| g.rho.abs()).fold(0.0, f64::max)
    }

    pub fn involves(&self, x: MetricId, y: MetricId) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq1Section {
    pub threshold: f64,
    pub vulnerable: CorrelationMatrix,
    pub neutral: CorrelationMatrix,
    pub redundant_pairs: Vec<RedundantPair>,
}

impl Rq1Section {
    pub fn matrix(&self, group: Label) -> &CorrelationMatrix {
        match group {
            Label::Vulnerable => &self.vulnerable,
            Label::Neutral => &self.neutral,
        }
    }

    pub fn find(&self, a: MetricId, b: MetricId) -> Option<&RedundantPair> {
        self.redundant_pairs.iter().find(|p| p.involves(a, b))
    }
}

fn group_matrix(set: &LabeledContractSet, group: Label) -> Result<CorrelationMatrix> {
    let columns: Vec<(String, Vec<f64>)> =
        MetricId::ALL.iter().map(|&m| (m.key().to_string(), set.group_column(m, group))).collect();
    Ok(correlation_matrix(&columns)?)
}

/// One Spearman matrix per label group plus the pairs with |rho| above `threshold`.
pub fn rq1_redundancy(set: &LabeledContractSet, threshold: f64, significance: f64) -> Result<Rq1Section> {
    require_rows(set, Label::Vulnerable, 3)?;
    require_rows(set, Label::Neutral, 3)?;
    let (vulnerable, neutral) = rayon::join(|| group_matrix(set, Label::Vulnerable), || group_matrix(set, Label::Neutral));
    let (vulnerable, neutral) = (vulnerable?, neutral?);

    let mut redundant_pairs = Vec::new();
    for i in 0..MetricId::ALL.len() {
        for j in i + 1..MetricId::ALL.len() {
            let groups: Vec<GroupCorrelation> = [(Label::Vulnerable, &vulnerable), (Label::Neutral, &neutral)]
                .into_iter()
                .filter_map(|(group, m)| {
                    let r: &SpearmanResult = m.entries[i][j].as_ref()?;
                    (r.rho.abs() > threshold).then_some(GroupCorrelation {
                        group,
                        rho: r.rho,
                        p_value: r.p_value,
                        p_reliable: r.p_value <= significance,
                    })
                })
                .collect();
            if !groups.is_empty() {
                redundant_pairs.push(RedundantPair { a: MetricId::ALL[i], b: MetricId::ALL[j], groups });
            }
        }
    }
    Ok(Rq1Section { threshold, vulnerable, neutral, redundant_pairs })
}
