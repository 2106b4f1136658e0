use serde::{Deserialize, Serialize};

use super::{mean, sample_variance, student_t_quantile, Result, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub n: usize,
}

impl ConfidenceInterval {
    pub fn half_width(&self) -> f64 {
        self.upper - self.mean
    }

    pub fn contains(&self, other: &ConfidenceInterval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

/// Student-t interval for the mean: `mean +- t_{(1+level)/2, n-1} * sd / sqrt(n)`.
pub fn mean_confidence_interval(values: &[f64], level: f64) -> Result<ConfidenceInterval> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::InvalidInput(format!("need at least 2 values, got {n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidInput(format!("level must be in (0, 1), got {level}")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(StatsError::InvalidInput(format!("non-finite value {v}")));
    }
    let m = mean(values);
    let q = student_t_quantile((1.0 + level) / 2.0, (n - 1) as f64)?;
    let half = q * (sample_variance(values) / n as f64).sqrt();
    Ok(ConfidenceInterval { mean: m, lower: m - half, upper: m + half, level, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_vector() {
        let ci = mean_confidence_interval(&[4.0; 6], 0.95).unwrap();
        assert_eq!((ci.lower, ci.mean, ci.upper), (4.0, 4.0, 4.0));
    }

    #[test]
    fn one_to_five() {
        let ci = mean_confidence_interval(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.95).unwrap();
        assert_eq!(ci.mean, 3.0);
        assert!((ci.half_width() - 2.7764451051977987 * (2.5f64.sqrt() / 5f64.sqrt())).abs() < 1e-9);
        assert!((ci.lower - 1.037).abs() < 1e-3 && (ci.upper - 4.963).abs() < 1e-3);
    }

    #[test]
    fn nested_levels() {
        let v = [2.0, 9.0, 4.0, 4.5, 1.0, 7.0];
        let wide = mean_confidence_interval(&v, 0.99).unwrap();
        let narrow = mean_confidence_interval(&v, 0.95).unwrap();
        assert!(wide.contains(&narrow));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(mean_confidence_interval(&[1.0], 0.95).is_err());
        assert!(mean_confidence_interval(&[1.0, 2.0], 1.0).is_err());
        assert!(mean_confidence_interval(&[1.0, f64::NAN], 0.95).is_err());
    }
}
