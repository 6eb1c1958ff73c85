//! Quantiles: nearest-rank sample quantiles and chi-square quantiles by
//! inverting the regularized lower incomplete gamma function.

use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};

/// Absolute tolerance of [`chi_square_quantile`].
pub const CHI_SQUARE_TOL: f64 = 1e-8;

/// One-based rank ceil(p * m), clamped to [1, m].
pub fn nearest_rank(p: f64, m: usize) -> usize {
    ((p * m as f64).ceil() as usize).clamp(1, m)
}

/// Nearest-rank quantile: the order statistic at position ceil(p * m).
/// Reorders `values` in place.
pub fn nearest_rank_quantile(values: &mut [f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Input("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Input(format!("quantile level {p} outside [0, 1]")));
    }
    let k = nearest_rank(p, values.len()) - 1;
    let (_, v, _) = values.select_nth_unstable_by(k, f64::total_cmp);
    Ok(*v)
}

/// CDF of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_cdf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(dof as f64 / 2.0, x / 2.0)
    }
}

/// Quantile of chi-square(dof) at level `p`, by bracketing and bisection on
/// the CDF until the bracket is narrower than [`CHI_SQUARE_TOL`].
pub fn chi_square_quantile(p: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::Input("chi-square needs at least one degree of freedom".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Input(format!("chi-square quantile level {p} outside (0, 1)")));
    }
    let mut lo = 0.0;
    let mut hi = dof as f64 + 1.0;
    while chi_square_cdf(hi, dof) < p {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > CHI_SQUARE_TOL * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
