use serde::{Deserialize, Serialize};

use super::{Result, StatsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedVector {
    pub values: Vec<f64>,
    /// 1-based ranks; tied values share the average of the ranks they span.
    pub ranks: Vec<f64>,
    pub n: usize,
    /// Whether any value occurs more than once.
    pub has_ties: bool,
}

pub fn rank(values: &[f64]) -> Result<RankedVector> {
    if values.is_empty() {
        return Err(StatsError::InvalidInput("cannot rank an empty vector".into()));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(StatsError::InvalidInput(format!("non-finite value at index {i}")));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; n];
    let mut has_ties = false;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        has_ties |= j - i > 1;
        // Positions i..j hold ranks i+1..=j.
        let average = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = average;
        }
        i = j;
    }
    Ok(RankedVector { values: values.to_vec(), ranks, n, has_ties })
}
