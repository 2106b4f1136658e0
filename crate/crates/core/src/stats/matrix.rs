use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rank, spearman_from_ranks, RankedVector, Result, SpearmanResult, StatsError, Strength, DEFAULT_ALPHA};

/// Pairwise Spearman results over named columns. `None` marks an undefined
/// cell, which happens when either column is constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub ids: Vec<String>,
    pub entries: Vec<Vec<Option<SpearmanResult>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<&SpearmanResult> {
        let i = self.ids.iter().position(|id| id == a)?;
        let j = self.ids.iter().position(|id| id == b)?;
        self.entries[i][j].as_ref()
    }

    /// Unordered pairs `(i < j)` whose |rho| exceeds `threshold`.
    pub fn pairs_above(&self, threshold: f64) -> Vec<(String, String, f64)> {
        let mut out = Vec::new();
        for i in 0..self.ids.len() {
            for j in i + 1..self.ids.len() {
                if let Some(r) = &self.entries[i][j] {
                    if r.rho.abs() > threshold {
                        out.push((self.ids[i].clone(), self.ids[j].clone(), r.rho));
                    }
                }
            }
        }
        out
    }
}

pub fn correlation_matrix(columns: &[(String, Vec<f64>)]) -> Result<CorrelationMatrix> {
    let n = columns.first().map_or(0, |(_, v)| v.len());
    if let Some((id, v)) = columns.iter().find(|(_, v)| v.len() != n) {
        return Err(StatsError::InvalidInput(format!("column {id} has {} values, expected {n}", v.len())));
    }
    if !columns.is_empty() && n < 3 {
        return Err(StatsError::InvalidInput(format!("need at least 3 rows, got {n}")));
    }
    let ranked: Vec<RankedVector> = columns.par_iter().map(|(_, v)| rank(v)).collect::<Result<_>>()?;

    let k = columns.len();
    let upper: Vec<Vec<Option<SpearmanResult>>> = (0..k)
        .into_par_iter()
        .map(|i| {
            (i + 1..k)
                .map(|j| match spearman_from_ranks(&ranked[i], &ranked[j]) {
                    Ok(r) => Ok(Some(r)),
                    Err(StatsError::Degenerate(_)) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let diagonal = SpearmanResult { rho: 1.0, p_value: 0.0, n, strength: Strength::Strong, significant: 0.0 <= DEFAULT_ALPHA };
    let mut entries = vec![vec![None; k]; k];
    for i in 0..k {
        entries[i][i] = Some(diagonal);
        for j in i + 1..k {
            let cell = upper[i][j - i - 1];
            entries[i][j] = cell;
            entries[j][i] = cell;
        }
    }
    Ok(CorrelationMatrix { ids: columns.iter().map(|(id, _)| id.clone()).collect(), entries })
}
