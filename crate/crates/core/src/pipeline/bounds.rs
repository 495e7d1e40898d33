//! Closed-form guarantees reported alongside a solve.

use crate::error::{Error, Result};
use crate::exact::{e_upper, int, pow_int, sqrt_upper, Rational};
use crate::relax::{eta, gap_bound};
use crate::rounding::{guarantee_rounding_term, Strategy};

/// Lower bound on the returned value given `OPT = p(x*)`:
/// `OPT - 2ηβ n^(d-1/2) sqrt(ε)`, minus the randomized rounding term
/// `ηβ n^(d-1) sqrt((k+1)/2) sqrt(n ln n)` unless rounding is greedy.
pub fn guarantee_bound(
    opt: &Rational,
    beta: &Rational,
    n: usize,
    d: usize,
    eps: usize,
    strategy: Strategy,
    k: &Rational,
) -> Result<Rational> {
    let mut bound = opt - gap_bound(beta, n, d, eps)?;
    if strategy == Strategy::Randomized {
        bound -= guarantee_rounding_term(beta, n, d, k)?;
    }
    Ok(bound)
}

/// Additive constraint error `ηβ n^(d-1/2) sqrt(ε) + ηβ n^(d-1) sqrt((k+1)/2) sqrt(n ln n)`.
pub fn constraint_delta(
    beta: &Rational,
    n: usize,
    d: usize,
    eps: usize,
    k: &Rational,
) -> Result<Rational> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "constraint error needs d >= 2, got {d}"
        )));
    }
    let relax = eta(d) * beta * pow_int(n, d - 1) * sqrt_upper(n as u128 * eps as u128);
    Ok(relax + guarantee_rounding_term(beta, n, d, k)?)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_nan() || kappa <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    Ok(())
}

/// MAX-CUT ratio `1 - (4/κ) sqrt(ε) / n^ξ` when `OPT >= κ n^(3/2+ξ)`.
pub fn maxcut_ratio(kappa: f64, xi: f64, eps: usize, n: usize) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(1.0 - 4.0 / kappa * (eps as f64).sqrt() / (n as f64).powf(xi))
}

/// MAX-k-SAT ratio `1 - 2(2e(k-2)+1)β/κ sqrt(ε) / n^ξ` when
/// `OPT >= κ n^(k-1/2+ξ)`.
pub fn maxksat_ratio(
    kappa: f64,
    xi: f64,
    eps: usize,
    n: usize,
    k: usize,
    beta: f64,
) -> Result<f64> {
    check_kappa(kappa)?;
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "clause width must be >= 2, got {k}"
        )));
    }
    let eta = crate::exact::to_f64(&(int(2) * e_upper() * int(k as i64 - 2) + int(1)));
    Ok(1.0 - 2.0 * eta * beta / kappa * (eps as f64).sqrt() / (n as f64).powf(xi))
}
