use serde::{Deserialize, Serialize};

use super::{mean, sample_variance, student_t_sf, Result, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestKind {
    Paired,
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    /// Two-sided.
    pub p_value: f64,
    /// mean(x) - mean(y).
    pub mean_difference: f64,
    pub kind: TTestKind,
    /// Set when both samples carry no spread and no difference, so t is 0 by convention.
    pub zero_variance: bool,
}

impl TTestResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(StatsError::InvalidInput(format!("{name} contains non-finite value {v}")));
    }
    Ok(())
}

fn two_sided(t: f64, df: f64) -> f64 {
    (2.0 * student_t_sf(t.abs(), df).expect("df is positive")).min(1.0)
}

/// Paired-sample t-test on `x - y`.
pub fn paired_t_test(x: &[f64], y: &[f64]) -> Result<TTestResult> {
    if x.len() != y.len() {
        return Err(StatsError::InvalidInput(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 2 {
        return Err(StatsError::InvalidInput(format!("need at least 2 pairs, got {n}")));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let df = (n - 1) as f64;
    let md = mean(&d);
    if d.iter().all(|&v| v == d[0]) {
        if d[0] == 0.0 {
            return Ok(TTestResult {
                t_statistic: 0.0,
                degrees_of_freedom: df,
                p_value: 1.0,
                mean_difference: 0.0,
                kind: TTestKind::Paired,
                zero_variance: true,
            });
        }
        return Err(StatsError::Degenerate(format!("all {n} differences equal {}", d[0])));
    }
    let se = (sample_variance(&d) / n as f64).sqrt();
    let t = md / se;
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: two_sided(t, df),
        mean_difference: md,
        kind: TTestKind::Paired,
        zero_variance: false,
    })
}

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
pub fn welch_t_test(x: &[f64], y: &[f64]) -> Result<TTestResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(StatsError::InvalidInput(format!("need at least 2 values per group, got {} and {}", x.len(), y.len())));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let (mx, my) = (mean(x), mean(y));
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (vx, vy) = (sample_variance(x) / nx, sample_variance(y) / ny);
    let md = mx - my;
    if vx + vy == 0.0 {
        if md == 0.0 {
            return Ok(TTestResult {
                t_statistic: 0.0,
                degrees_of_freedom: nx + ny - 2.0,
                p_value: 1.0,
                mean_difference: 0.0,
                kind: TTestKind::Welch,
                zero_variance: true,
            });
        }
        return Err(StatsError::Degenerate(format!("both groups constant with different values ({mx} vs {my})")));
    }
    let t = md / (vx + vy).sqrt();
    let df = (vx + vy).powi(2) / (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: two_sided(t, df),
        mean_difference: md,
        kind: TTestKind::Welch,
        zero_variance: false,
    })
}
