//! Exhaustive search over `{0,1}^n`.
//!
//! Assignments are enumerated as masks with `x_i` at bit `n-1-i`, so
//! ascending masks are ascending in lexicographic order and the first
//! optimum found is the lexicographically smallest one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::exec::{chunked_reduce, Execution};
use crate::poly::Polynomial;
use crate::relax::ConstrainedProgram;

/// Default cap on `n` for exhaustive search.
pub const EXACT_CAP: usize = 24;

const CHUNK: u64 = 1 << 12;

/// A polynomial rescaled to integer coefficients over bit masks.
struct IntPoly {
    terms: Vec<(u64, i128)>,
    scale: BigInt,
}

impl IntPoly {
    fn new(p: &Polynomial) -> Option<IntPoly> {
        let n = p.n();
        let scale = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut total = BigInt::zero();
        let mut terms = Vec::with_capacity(p.num_terms());
        for (vars, c) in p.terms() {
            let v = c.numer() * (&scale / c.denom());
            total += v.abs();
            let mask = vars.iter().fold(0u64, |m, &i| m | 1 << (n - 1 - i));
            terms.push((mask, v.to_i128()?));
        }
        // the running sum must fit as well
        total.to_i128()?;
        Some(IntPoly { terms, scale })
    }

    fn eval(&self, mask: u64) -> i128 {
        self.terms
            .iter()
            .filter(|(m, _)| mask & m == *m)
            .map(|(_, c)| c)
            .sum()
    }
}

struct IntConstraint {
    poly: IntPoly,
    lo: i128,
    hi: i128,
}

fn scaled_bounds(lower: &Rational, upper: &Rational, scale: &BigInt) -> Option<(i128, i128)> {
    let s = Rational::from_integer(scale.clone());
    let lo = (lower * &s).ceil().to_integer().to_i128()?;
    let hi = (upper * &s).floor().to_integer().to_i128()?;
    Some((lo, hi))
}

fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect()
}

fn best_of<T: PartialOrd>(a: Option<(T, u64)>, b: Option<(T, u64)>) -> Option<(T, u64)> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.0 > a.0 { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn exact_int(
    prog: &ConstrainedProgram,
    obj: IntPoly,
    cons: Vec<IntConstraint>,
    exec: Execution,
) -> Result<(Vec<bool>, Rational)> {
    let n = prog.n();
    let best = chunked_reduce(
        exec,
        1u64 << n,
        CHUNK,
        |lo, hi| {
            let mut best: Option<(i128, u64)> = None;
            for mask in lo..hi {
                if !cons.iter().all(|c| {
                    let v = c.poly.eval(mask);
                    c.lo <= v && v <= c.hi
                }) {
                    continue;
                }
                let v = obj.eval(mask);
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, mask));
                }
            }
            best
        },
        best_of,
    )
    .flatten();
    let (value, mask) = best.ok_or(Error::Infeasible)?;
    let value = Rational::new(BigInt::from(value), obj.scale.clone());
    Ok((mask_to_bits(mask, n), value))
}

fn exact_rational(prog: &ConstrainedProgram, exec: Execution) -> Result<(Vec<bool>, Rational)> {
    let n = prog.n();
    let best = chunked_reduce(
        exec,
        1u64 << n,
        CHUNK,
        |lo, hi| {
            let mut best: Option<(Rational, u64)> = None;
            for mask in lo..hi {
                let x = mask_to_bits(mask, n);
                let feasible = prog.constraints.iter().all(|c| {
                    let v = c.poly.evaluate_bool(&x).expect("dimension checked");
                    c.lower <= v && v <= c.upper
                });
                if !feasible {
                    continue;
                }
                let v = prog.objective.evaluate_bool(&x).expect("dimension checked");
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, mask));
                }
            }
            best
        },
        best_of,
    )
    .flatten();
    let (value, mask) = best.ok_or(Error::Infeasible)?;
    Ok((mask_to_bits(mask, n), value))
}

/// Maximizes the program over `{0,1}^n`, returning the lexicographically
/// smallest optimum (with `false < true`) and its value.
pub fn exact_solve_program(
    prog: &ConstrainedProgram,
    cap: usize,
    exec: Execution,
) -> Result<(Vec<bool>, Rational)> {
    let n = prog.n();
    let cap = cap.min(63);
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let prog = ConstrainedProgram {
        objective: prog.objective.multilinearize(),
        constraints: prog
            .constraints
            .iter()
            .map(|c| crate::relax::PolyConstraint {
                poly: c.poly.multilinearize(),
                ..c.clone()
            })
            .collect(),
    };
    let ints = IntPoly::new(&prog.objective).and_then(|obj| {
        let cons = prog
            .constraints
            .iter()
            .map(|c| {
                let poly = IntPoly::new(&c.poly)?;
                let (lo, hi) = scaled_bounds(&c.lower, &c.upper, &poly.scale)?;
                Some(IntConstraint { poly, lo, hi })
            })
            .collect::<Option<Vec<_>>>()?;
        Some((obj, cons))
    });
    match ints {
        Some((obj, cons)) => exact_int(&prog, obj, cons, exec),
        None => exact_rational(&prog, exec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::relax::PolyConstraint;

    fn program(n: usize, terms: &[(&[usize], Rational)]) -> ConstrainedProgram {
        let p =
            Polynomial::from_terms(n, terms.iter().map(|(v, c)| (v.to_vec(), c.clone()))).unwrap();
        ConstrainedProgram::unconstrained(p)
    }

    #[test]
    fn lexicographically_smallest_optimum() {
        // x0 + x1 - 2 x0 x1: optima (0,1) and (1,0)
        let prog = program(2, &[(&[0], int(1)), (&[1], int(1)), (&[0, 1], int(-2))]);
        let (x, v) = exact_solve_program(&prog, EXACT_CAP, Execution::Sequential).unwrap();
        assert_eq!(x, vec![false, true]);
        assert_eq!(v, int(1));
    }

    #[test]
    fn fractional_coefficients_and_modes_agree() {
        let prog = program(
            5,
            &[
                (&[0], ratio(1, 3)),
                (&[1, 2], ratio(-5, 7)),
                (&[3], ratio(2, 9)),
                (&[2, 4], ratio(1, 2)),
            ],
        );
        let a = exact_solve_program(&prog, EXACT_CAP, Execution::Sequential).unwrap();
        let b = exact_solve_program(&prog, EXACT_CAP, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1, ratio(1, 3) + ratio(2, 9) + ratio(1, 2));
        assert_eq!(exact_rational(&prog, Execution::Sequential).unwrap(), a);
    }

    #[test]
    fn constraints_are_honoured() {
        let mut prog = program(3, &[(&[0], int(3)), (&[1], int(2)), (&[2], int(1))]);
        let card = Polynomial::from_terms(3, (0..3).map(|i| (vec![i], int(1)))).unwrap();
        prog.constraints
            .push(PolyConstraint::new(card, int(0), ratio(3, 2)).unwrap());
        let (x, v) = exact_solve_program(&prog, EXACT_CAP, Execution::Sequential).unwrap();
        assert_eq!(x, vec![true, false, false]);
        assert_eq!(v, int(3));
        let card = Polynomial::from_terms(3, (0..3).map(|i| (vec![i], int(1)))).unwrap();
        prog.constraints
            .push(PolyConstraint::new(card, int(4), int(5)).unwrap());
        assert_eq!(
            exact_solve_program(&prog, EXACT_CAP, Execution::Sequential),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn cap_enforced() {
        let prog = ConstrainedProgram::unconstrained(Polynomial::zero(30));
        assert_eq!(
            exact_solve_program(&prog, EXACT_CAP, Execution::Sequential),
            Err(Error::TooLarge { n: 30, cap: 24 })
        );
    }

    #[test]
    fn zero_variables() {
        let prog = ConstrainedProgram::unconstrained(Polynomial::constant(0, int(5)));
        assert_eq!(
            exact_solve_program(&prog, EXACT_CAP, Execution::Sequential).unwrap(),
            (vec![], int(5))
        );
    }
}
