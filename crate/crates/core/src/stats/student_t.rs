//! Student-t distribution functions on top of the regularized incomplete beta.

use statrs::function::beta::beta_reg;

use super::{Result, StatsError};

fn check_df(df: f64) -> Result<()> {
    if df.is_nan() || df <= 0.0 {
        return Err(StatsError::InvalidInput(format!("degrees of freedom must be positive, got {df}")));
    }
    Ok(())
}

/// Returns `(lower, upper)` tail probabilities for `t`, each computed
/// directly so that neither suffers cancellation.
fn tails(t: f64, df: f64) -> (f64, f64) {
    if t == 0.0 {
        return (0.5, 0.5);
    }
    if t.is_infinite() {
        return if t > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let t2 = t * t;
    // Both incomplete-beta arguments stay at or below one half.
    let far = if t2 >= df {
        0.5 * beta_reg(df / 2.0, 0.5, df / (df + t2))
    } else {
        0.5 - 0.5 * beta_reg(0.5, df / 2.0, t2 / (df + t2))
    };
    if t > 0.0 {
        (1.0 - far, far)
    } else {
        (far, 1.0 - far)
    }
}

/// P(T <= t) for Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(StatsError::InvalidInput("t is NaN".into()));
    }
    Ok(tails(t, df).0)
}

/// P(T > t), the upper tail.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(StatsError::InvalidInput("t is NaN".into()));
    }
    Ok(tails(t, df).1)
}

/// Inverse CDF by bracketing and bisection.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::InvalidInput(format!("probability must be in (0, 1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let cdf = |t: f64| tails(t, df).0;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while cdf(lo) > p {
        lo *= 2.0;
    }
    while cdf(hi) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
