use serde::{Deserialize, Serialize};

use super::{rank, student_t_sf, RankedVector, Result, StatsError, DEFAULT_ALPHA};

/// Cohen's qualitative strength classes for |rho|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Weak,
    Medium,
    Strong,
}

impl Strength {
    pub fn classify(rho: f64) -> Self {
        let r = rho.abs();
        if r < 0.3 {
            Strength::Weak
        } else if r <= 0.5 {
            Strength::Medium
        } else {
            Strength::Strong
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub rho: f64,
    /// Two-sided p-value from the Student-t approximation with n - 2 df.
    pub p_value: f64,
    pub n: usize,
    pub strength: Strength,
    pub significant: bool,
}

impl SpearmanResult {
    fn new(rho: f64, p_value: f64, n: usize) -> Self {
        SpearmanResult { rho, p_value, n, strength: Strength::classify(rho), significant: p_value <= DEFAULT_ALPHA }
    }

    /// Re-evaluates `significant` against another threshold.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.significant = self.p_value <= alpha;
        self
    }
}

/// Spearman rank correlation: Pearson correlation of average ranks, which
/// reduces to `1 - 6 sum(d^2) / (n (n^2 - 1))` when neither input has ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<SpearmanResult> {
    if x.len() != y.len() {
        return Err(StatsError::InvalidInput(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    spearman_from_ranks(&rank(x)?, &rank(y)?)
}

/// Spearman correlation of two already-ranked vectors.
pub fn spearman_from_ranks(x: &RankedVector, y: &RankedVector) -> Result<SpearmanResult> {
    let n = x.n;
    if n != y.n {
        return Err(StatsError::InvalidInput(format!("length mismatch: {} vs {}", x.n, y.n)));
    }
    if n < 3 {
        return Err(StatsError::InvalidInput(format!("need at least 3 observations, got {n}")));
    }
    // Average ranks always have mean (n + 1) / 2.
    let centre = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.ranks.iter().zip(&y.ranks) {
        let (dx, dy) = (a - centre, b - centre);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Degenerate("constant input vector; rho is undefined".into()));
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(SpearmanResult::new(rho, correlation_p_value(rho, n), n))
}

fn correlation_p_value(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = rho * (df / denom).sqrt();
    (2.0 * student_t_sf(t.abs(), df).expect("df is positive")).min(1.0)
}
