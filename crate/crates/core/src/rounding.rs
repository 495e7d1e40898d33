//! Rounding fractional LP solutions to Boolean assignments.

use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{from_f64, int, ratio, to_f64_up, Rational};
use crate::poly::Polynomial;
use crate::relax::eta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Greedy,
    Randomized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    #[serde(with = "crate::bits::serde_bits")]
    pub z: Vec<bool>,
    #[serde(with = "crate::exact::serde_rational")]
    pub value: Rational,
    pub strategy: Strategy,
    pub seed: Option<u64>,
}

impl RoundingOutcome {
    pub fn new(
        p: &Polynomial,
        z: Vec<bool>,
        strategy: Strategy,
        seed: Option<u64>,
    ) -> Result<Self> {
        let value = p.evaluate_bool(&z)?;
        Ok(RoundingOutcome {
            z,
            value,
            strategy,
            seed,
        })
    }
}

fn check_unit(y: &[f64]) -> Result<()> {
    match y.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(i) => Err(Error::OutOfRange(format!(
            "y[{i}] = {} is outside [0, 1]",
            y[i]
        ))),
        None => Ok(()),
    }
}

/// Uniform draw in `[0, 1)` for coordinate `i`, a pure function of
/// `(seed, i)`.
fn uniform(rng: &mut ChaCha8Rng, i: usize) -> f64 {
    // two 32-bit words per coordinate
    rng.set_word_pos(2 * i as u128);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sets `z_i = 1` with probability `y_i`, independently per coordinate.
pub fn randomized_round(y: &[f64], seed: u64) -> Result<Vec<bool>> {
    check_unit(y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(y.iter()
        .enumerate()
        .map(|(i, &p)| uniform(&mut rng, i) < p)
        .collect())
}

/// Result of [`greedy_round_traced`]: the rounded point and `p` after each
/// coordinate is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    pub z: Vec<bool>,
    pub start_value: Rational,
    pub step_values: Vec<Rational>,
}

impl GreedyTrace {
    pub fn final_value(&self) -> &Rational {
        self.step_values.last().unwrap_or(&self.start_value)
    }
}

/// Fixes coordinates in ascending order, each to the endpoint maximizing
/// `p` with earlier coordinates already rounded. Because `p` is affine in
/// each coordinate the choice only needs the sign of `∂p/∂x_i` at the
/// current point. A zero derivative keeps the endpoint nearer `y_i`, and 0
/// when `y_i = 1/2`.
pub fn greedy_round_traced(p: &Polynomial, y: &[Rational]) -> Result<GreedyTrace> {
    if !p.is_multilinear() {
        return Err(Error::NotMultilinear);
    }
    if y.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: y.len(),
        });
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    if let Some(i) = y.iter().position(|v| *v < zero || *v > one) {
        return Err(Error::OutOfRange(format!(
            "y[{i}] = {} is outside [0, 1]",
            y[i]
        )));
    }

    let terms: Vec<(&[usize], &Rational)> = p.terms().collect();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); p.n()];
    for (id, (vars, _)) in terms.iter().enumerate() {
        for &v in *vars {
            touching[v].push(id);
        }
    }

    let half = ratio(1, 2);
    let mut cur = y.to_vec();
    let start_value = p.evaluate(y)?;
    let mut value = start_value.clone();
    let mut step_values = Vec::with_capacity(p.n());
    let mut z = Vec::with_capacity(p.n());
    for i in 0..p.n() {
        let mut slope = Rational::zero();
        for &id in &touching[i] {
            let (vars, c) = terms[id];
            let mut t = c.clone();
            for &v in vars {
                if v == i {
                    continue;
                }
                if cur[v].is_zero() {
                    t.set_zero();
                    break;
                }
                if !cur[v].is_one() {
                    t *= &cur[v];
                }
            }
            slope += t;
        }
        let up = if slope.is_zero() {
            cur[i] > half
        } else {
            slope > zero
        };
        let target = if up { one.clone() } else { zero.clone() };
        value += (&target - &cur[i]) * &slope;
        cur[i] = target;
        z.push(up);
        step_values.push(value.clone());
    }
    Ok(GreedyTrace {
        z,
        start_value,
        step_values,
    })
}

/// [`greedy_round_traced`] on a float vector, converted exactly.
pub fn greedy_round(p: &Polynomial, y: &[f64]) -> Result<Vec<bool>> {
    check_unit(y)?;
    let exact = y.iter().map(|&v| from_f64(v)).collect::<Result<Vec<_>>>()?;
    Ok(greedy_round_traced(p, &exact)?.z)
}

fn sqrt_rounding_factor(n: usize, k: f64) -> f64 {
    let n = n as f64;
    ((k + 1.0) / 2.0).sqrt() * (n * n.ln()).sqrt()
}

fn check_bound_args(n: usize, d: usize, k: &Rational) -> Result<()> {
    if n < 2 || d < 2 || *k <= Rational::zero() {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2, d >= 2, k > 0 (n = {n}, d = {d}, k = {k})"
        )));
    }
    Ok(())
}

fn scaled_radius(
    constant: &Rational,
    beta: &Rational,
    n: usize,
    d: usize,
    k: &Rational,
) -> Result<Rational> {
    let raw = to_f64_up(constant)
        * to_f64_up(beta)
        * (n as f64).powi(d as i32 - 1)
        * sqrt_rounding_factor(n, k.to_f64().unwrap_or(f64::INFINITY));
    upward(raw)
}

/// High-probability radius of `|p(z) - p(y)|` under randomized rounding:
/// `C β n^(d-1) sqrt((k+1)/2) sqrt(n ln n)` with `C = 3` for `d = 2` and
/// `C = 1 + 2e(d-2)` otherwise. Computed in floating point and nudged up
/// before conversion.
pub fn rounding_error_bound(beta: &Rational, n: usize, d: usize, k: &Rational) -> Result<Rational> {
    check_bound_args(n, d, k)?;
    let constant = if d == 2 { int(3) } else { eta(d) };
    scaled_radius(&constant, beta, n, d, k)
}

/// `η β n^(d-1) sqrt((k+1)/2) sqrt(n ln n)` with `η = 2e(d-2)+1`, the
/// rounding term of the overall guarantee.
pub fn guarantee_rounding_term(
    beta: &Rational,
    n: usize,
    d: usize,
    k: &Rational,
) -> Result<Rational> {
    check_bound_args(n, d, k)?;
    scaled_radius(&eta(d), beta, n, d, k)
}

fn upward(raw: f64) -> Result<Rational> {
    // a few ulps absorb the rounding of ln, sqrt and the products
    let mut v = raw;
    for _ in 0..8 {
        v = v.next_up();
    }
    from_f64(v)
}

/// Failure probability `2d / n^(k+1-(d-1))` of the randomized bound.
pub fn rounding_failure_probability(n: usize, d: usize, k: f64) -> f64 {
    2.0 * d as f64 / (n as f64).powf(k + 1.0 - (d as f64 - 1.0))
}
