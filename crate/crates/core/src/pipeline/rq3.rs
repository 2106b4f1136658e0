use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{require_rows, Result};
use crate::corpus::{Label, LabeledContractSet};
use crate::metrics::MetricId;
use crate::stats::{paired_t_test, welch_t_test, StatsError, TTestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq3Row {
    pub metric: MetricId,
    /// Vulnerable values paired with the size-matched sample; `None` when undefined.
    pub paired: Option<TTestResult>,
    /// Welch's test on the full groups.
    pub welch: Option<TTestResult>,
    /// Why a test is undefined, if one is.
    pub note: Option<String>,
    pub discriminative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq3Section {
    pub seed: u64,
    pub significance: f64,
    /// The group that was subsampled (normally the larger neutral group).
    pub sampled_group: Label,
    /// Row positions within the sampled group, ascending.
    pub sampled_indices: Vec<usize>,
    pub rows: Vec<Rq3Row>,
}

impl Rq3Section {
    pub fn get(&self, metric: MetricId) -> Option<&Rq3Row> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

/// Seeded draw of `k` distinct positions out of `n`, in ascending order.
pub(crate) fn draw(seed: u64, n: usize, k: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

fn defined(test: std::result::Result<TTestResult, StatsError>, notes: &mut Vec<String>) -> Result<Option<TTestResult>> {
    match test {
        Ok(t) => Ok(Some(t)),
        Err(StatsError::Degenerate(m)) => {
            notes.push(m);
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

/// Paired t-test of each metric between the vulnerable group and a seeded,
/// size-matched sample of the other group, drawn once for all metrics.
pub fn rq3_discriminative(set: &LabeledContractSet, seed: u64, significance: f64) -> Result<Rq3Section> {
    require_rows(set, Label::Vulnerable, 2)?;
    require_rows(set, Label::Neutral, 2)?;
    let (nv, nn) = (set.n_vulnerable, set.n_neutral);
    let sampled_group = if nn >= nv { Label::Neutral } else { Label::Vulnerable };
    let k = nv.min(nn);
    let sampled_indices = draw(seed, set.count(sampled_group), k);

    let mut rows = Vec::with_capacity(MetricId::ALL.len());
    for metric in MetricId::ALL {
        let vulnerable = set.group_column(metric, Label::Vulnerable);
        let neutral = set.group_column(metric, Label::Neutral);
        let pick = |v: &[f64]| sampled_indices.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let (x, y) = match sampled_group {
            Label::Neutral => (vulnerable.clone(), pick(&neutral)),
            Label::Vulnerable => (pick(&vulnerable), neutral.clone()),
        };
        let mut notes = Vec::new();
        let paired = defined(paired_t_test(&x, &y), &mut notes)?;
        let welch = defined(welch_t_test(&vulnerable, &neutral), &mut notes)?;
        let discriminative = paired.is_some_and(|t| t.p_value <= significance);
        rows.push(Rq3Row { metric, paired, welch, note: (!notes.is_empty()).then(|| notes.join("; ")), discriminative });
    }
    Ok(Rq3Section { seed, significance, sampled_group, sampled_indices, rows })
}
