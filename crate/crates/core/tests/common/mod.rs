//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use smoothip::exact::Rational;
use smoothip::lpsolve::LpModel;
use smoothip::Polynomial;

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rand_rational(rng: &mut ChaCha8Rng, max_abs: i64, den: i64) -> Rational {
    q(rng.gen_range(-max_abs * den..=max_abs * den), den)
}

/// Random multilinear polynomial with `terms` monomials of degree `<= d`
/// and at least one of degree exactly `d`.
pub fn random_multilinear(rng: &mut ChaCha8Rng, n: usize, d: usize, terms: usize) -> Polynomial {
    let mut out = Vec::new();
    for t in 0..terms.max(1) {
        let deg = if t == 0 { d } else { rng.gen_range(0..=d) };
        let vars = rand::seq::index::sample(rng, n, deg.min(n)).into_vec();
        let c = loop {
            let c = rand_rational(rng, 5, 4);
            if !c.is_zero() {
                break c;
            }
        };
        out.push((vars, c));
    }
    // cancellation can lower the degree, so pin the declared degree
    Polynomial::from_terms(n, out)
        .unwrap()
        .with_degree(d)
        .unwrap()
}

/// `max |c| / n^(d - l)` straight from the term list.
pub fn smoothness(p: &Polynomial, d: usize) -> Rational {
    let n = BigInt::from(p.n());
    p.terms()
        .map(|(vars, c)| {
            c.abs() / Rational::from_integer(num_traits::pow(n.clone(), d - vars.len()))
        })
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Every point of `{0,1}^n` in lexicographic order.
pub fn cube(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
}

/// Lexicographically smallest maximizer of `f` over the feasible points.
pub fn brute_max<T: PartialOrd + Clone>(
    n: usize,
    f: impl Fn(&[bool]) -> T,
    feasible: impl Fn(&[bool]) -> bool,
) -> Option<(Vec<bool>, T)> {
    let mut best: Option<(Vec<bool>, T)> = None;
    for x in cube(n) {
        if !feasible(&x) {
            continue;
        }
        let v = f(&x);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((x, v));
        }
    }
    best
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

const TOL: f64 = 1e-9;

/// Textbook two-phase dense tableau simplex with Bland's rule.
/// Maximizes `c x` subject to `A x <= b`, `x >= 0`.
pub fn tableau_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Reference {
    let m = a.len();
    let n = c.len();
    let n_art = b.iter().filter(|&&v| v < 0.0).count();
    let cols = n + m + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut art = n + m;
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = sign;
        t[i][cols] = sign * b[i];
        if sign < 0.0 {
            t[i][art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }

    let run =
        |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], allowed: usize| -> bool {
            for _ in 0..100_000 {
                let entering = (0..allowed).find(|&j| {
                    let r = cost[j] - (0..m).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
                    r > TOL
                });
                let Some(e) = entering else { return true };
                let mut leave: Option<(usize, f64)> = None;
                for i in 0..m {
                    if t[i][e] > TOL {
                        let ratio = t[i][cols] / t[i][e];
                        let better = match leave {
                            None => true,
                            Some((l, r)) => {
                                ratio < r - TOL || (ratio <= r + TOL && basis[i] < basis[l])
                            }
                        };
                        if better {
                            leave = Some((i, ratio));
                        }
                    }
                }
                let Some((l, _)) = leave else { return false };
                let piv = t[l][e];
                for v in t[l].iter_mut() {
                    *v /= piv;
                }
                for i in 0..m {
                    if i != l && t[i][e].abs() > 0.0 {
                        let f = t[i][e];
                        let pivot_row = t[l].clone();
                        for (v, p) in t[i].iter_mut().zip(&pivot_row) {
                            *v -= f * p;
                        }
                    }
                }
                basis[l] = e;
            }
            panic!("reference simplex did not terminate");
        };

    if n_art > 0 {
        let mut phase1 = vec![0.0; cols];
        for v in phase1.iter_mut().skip(n + m) {
            *v = -1.0;
        }
        run(&mut t, &mut basis, &phase1, cols);
        let infeas: f64 = (0..m)
            .filter(|&i| basis[i] >= n + m)
            .map(|i| t[i][cols])
            .sum();
        if infeas > 1e-7 {
            return Reference::Infeasible;
        }
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| t[i][j].abs() > 1e-9) {
                    let piv = t[i][j];
                    for v in t[i].iter_mut() {
                        *v /= piv;
                    }
                    for r in 0..m {
                        if r != i {
                            let f = t[r][j];
                            let pivot_row = t[i].clone();
                            for (v, p) in t[r].iter_mut().zip(&pivot_row) {
                                *v -= f * p;
                            }
                        }
                    }
                    basis[i] = j;
                }
            }
        }
    }
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(c);
    if !run(&mut t, &mut basis, &cost, n + m) {
        return Reference::Unbounded;
    }
    let value = (0..m)
        .filter(|&i| basis[i] < n)
        .map(|i| c[basis[i]] * t[i][cols])
        .sum();
    Reference::Optimal(value)
}

/// Solves an [`LpModel`] with finite variable bounds through [`tableau_max`]
/// after shifting every variable to start at zero.
pub fn reference_solve(model: &LpModel) -> Reference {
    let n = model.num_vars;
    let lo: Vec<f64> = model.var_bounds.iter().map(|b| b.0).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (j, &(l, u)) in model.var_bounds.iter().enumerate() {
        assert!(l.is_finite() && u.is_finite());
        let mut row = vec![0.0; n];
        row[j] = 1.0;
        a.push(row);
        b.push(u - l);
    }
    for row in &model.rows {
        let shift: f64 = row.coeffs.iter().zip(&lo).map(|(c, l)| c * l).sum();
        if row.upper.is_finite() {
            a.push(row.coeffs.clone());
            b.push(row.upper - shift);
        }
        if row.lower.is_finite() {
            a.push(row.coeffs.iter().map(|c| -c).collect());
            b.push(shift - row.lower);
        }
    }
    let base: f64 = model
        .objective
        .iter()
        .zip(&lo)
        .map(|(c, l)| c * l)
        .sum::<f64>()
        + model.objective_constant;
    match tableau_max(&a, &b, &model.objective) {
        Reference::Optimal(v) => Reference::Optimal(v + base),
        other => other,
    }
}

/// Random bounded LP around a random interior point. With `infeasible`, one
/// extra row demands more than the box allows.
pub fn random_lp(rng: &mut ChaCha8Rng, infeasible: bool) -> LpModel {
    let n = rng.gen_range(1..=30);
    let m = rng.gen_range(0..=60);
    let mut model = LpModel::unit_box(n);
    for j in 0..n {
        let l = rng.gen_range(-2..=0) as f64;
        model.var_bounds[j] = (l, l + rng.gen_range(0.5..3.0));
        model.objective[j] = rng.gen_range(-5.0..5.0);
    }
    model.objective_constant = rng.gen_range(-3.0..3.0);
    let x0: Vec<f64> = model
        .var_bounds
        .iter()
        .map(|&(l, u)| rng.gen_range(l..=u))
        .collect();
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    rng.gen_range(-5.0..5.0)
                } else {
                    0.0
                }
            })
            .collect();
        let act: f64 = coeffs.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let (lo, hi) = match rng.gen_range(0..10) {
            0 => (act, act),
            1 | 2 => (f64::NEG_INFINITY, act + rng.gen_range(0.0..3.0)),
            3 | 4 => (act - rng.gen_range(0.0..3.0), f64::INFINITY),
            _ => (act - rng.gen_range(0.0..3.0), act + rng.gen_range(0.0..3.0)),
        };
        model.add_row(coeffs, lo, hi);
    }
    if infeasible {
        let reach: f64 = model.var_bounds.iter().map(|b| b.1).sum();
        model.add_row(vec![1.0; n], reach + 1.0, f64::INFINITY);
    }
    model
}
