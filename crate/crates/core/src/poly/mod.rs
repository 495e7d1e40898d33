//! Sparse polynomials over `n` Boolean variables with exact rational
//! coefficients.
//!
//! A [`Polynomial`] stores one coefficient per variable multiset. Evaluation is
//! exact. Smoothness is measured against the *declared* degree `d`, which
//! defaults to the actual total degree and may be raised with
//! [`Polynomial::with_degree`].

mod decompose;
mod text;

pub use decompose::{decompose, DecompositionTree, IndexTuple, Node};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{e_upper, int, pow_int, Rational};

/// One term `coeff * x_{vars[0]} * x_{vars[1]} * ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub vars: Vec<usize>,
    pub coeff: Rational,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    // sorted variable multiset -> nonzero coefficient
    terms: BTreeMap<Vec<usize>, Rational>,
    degree: usize,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
            degree: 0,
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.push_term(Vec::new(), c);
        p
    }

    pub fn variable(n: usize, i: usize) -> Result<Self> {
        Self::from_terms(n, [(vec![i], Rational::one())])
    }

    /// Builds a canonical polynomial, merging equal variable multisets and
    /// dropping zero coefficients.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut p = Self::zero(n);
        for (vars, coeff) in terms {
            if let Some(&bad) = vars.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange { index: bad, n });
            }
            p.push_term(vars, coeff);
        }
        p.refresh_degree();
        Ok(p)
    }

    pub fn from_monomials(n: usize, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        Self::from_terms(n, monomials.into_iter().map(|m| (m.vars, m.coeff)))
    }

    fn push_term(&mut self, mut vars: Vec<usize>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        vars.sort_unstable();
        let entry = self.terms.entry(vars);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                self.degree = self.degree.max(v.key().len());
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn refresh_degree(&mut self) {
        self.degree = self.actual_degree();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared degree `d` used for smoothness.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Maximum total degree over stored monomials (0 for constants).
    pub fn actual_degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Declares a degree at least the actual one.
    pub fn with_degree(mut self, d: usize) -> Result<Self> {
        let actual = self.actual_degree();
        if d < actual {
            return Err(Error::DegreeTooLow {
                declared: d,
                actual,
            });
        }
        self.degree = d;
        Ok(self)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Vec::is_empty)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, vars: &[usize]) -> Rational {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in canonical (lexicographic variable-list) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(vars, coeff)| Monomial {
                vars: vars.clone(),
                coeff: coeff.clone(),
            })
            .collect()
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            degree: self.degree,
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        self.check_dim(x.len())?;
        let mut total = Rational::zero();
        for (vars, coeff) in &self.terms {
            let mut term = coeff.clone();
            for &v in vars {
                if x[v].is_zero() {
                    term.set_zero();
                    break;
                }
                term *= &x[v];
            }
            total += term;
        }
        Ok(total)
    }

    /// Exact value at a Boolean point.
    pub fn evaluate_bool(&self, x: &[bool]) -> Result<Rational> {
        self.check_dim(x.len())?;
        Ok(self
            .terms
            .iter()
            .filter(|(vars, _)| vars.iter().all(|&v| x[v]))
            .fold(Rational::zero(), |acc, (_, c)| acc + c))
    }

    /// Floating-point evaluation, for reporting only.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(vars, c)| crate::exact::to_f64(c) * vars.iter().map(|&v| x[v]).product::<f64>())
            .sum())
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms
            .keys()
            .all(|vars| vars.windows(2).all(|w| w[0] < w[1]))
    }

    /// Reduces every exponent to 1 (`x^k = x` on `{0,1}`) and merges terms.
    pub fn multilinearize(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (vars, coeff) in &self.terms {
            let mut v = vars.clone();
            v.dedup();
            out.push_term(v, coeff.clone());
        }
        out.refresh_degree();
        out
    }

    /// Smallest `beta` for which every degree-`l` coefficient satisfies
    /// `|coeff| <= beta * n^(d - l)`, with `d` the declared degree.
    pub fn min_smoothness(&self) -> Rational {
        let d = self.degree;
        let n = self.n.max(1);
        self.terms
            .iter()
            .map(|(vars, c)| c.abs() / pow_int(n, d - vars.len()))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_smooth(&self, beta: &Rational) -> bool {
        let d = self.degree;
        let n = self.n.max(1);
        self.terms
            .iter()
            .all(|(vars, c)| c.abs() <= beta * pow_int(n, d - vars.len()))
    }

    /// Partial derivative with respect to `x_i` of a multilinear polynomial,
    /// i.e. the coefficient polynomial of `x_i`.
    pub fn coefficient_of(&self, i: usize) -> Result<Polynomial> {
        if !self.is_multilinear() {
            return Err(Error::NotMultilinear);
        }
        let mut out = Polynomial::zero(self.n);
        for (vars, c) in &self.terms {
            if let Ok(pos) = vars.binary_search(&i) {
                let mut rest = vars.clone();
                rest.remove(pos);
                out.push_term(rest, c.clone());
            }
        }
        out.refresh_degree();
        Ok(out)
    }

    fn combine(&self, other: &Polynomial, sign: &Rational) -> Polynomial {
        assert_eq!(
            self.n, other.n,
            "polynomials over different variable counts"
        );
        let mut out = self.clone();
        for (vars, c) in &other.terms {
            out.push_term(vars.clone(), c * sign);
        }
        out.refresh_degree();
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, &Rational::one())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, &-Rational::one())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "polynomials over different variable counts");
        let mut out = Polynomial::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let mut vars = a.clone();
                vars.extend_from_slice(b);
                out.push_term(vars, ca * cb);
            }
        }
        out.refresh_degree();
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
        for (k, (vars, c)) in ordered.into_iter().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let show_coeff = vars.is_empty() || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            for (j, v) in vars.iter().enumerate() {
                if show_coeff || j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "x{v}")?;
            }
        }
        Ok(())
    }
}

/// Bound `beta (l+1) n^l` on `|p_I(x)|` for Boolean `x` when `|I| = d - l`.
pub fn component_bound(beta: &Rational, l: usize, n: usize) -> Rational {
    beta * int(l as i64 + 1) * pow_int(n, l)
}

/// Bound `2 beta e n^d` on `|p(x)|` over `[0,1]^n`, valid when `n > d`.
pub fn global_bound(beta: &Rational, d: usize, n: usize) -> Result<Rational> {
    if n <= d {
        return Err(Error::InvalidParameter(format!(
            "global bound needs n > d (n = {n}, d = {d})"
        )));
    }
    Ok(int(2) * beta * e_upper() * pow_int(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    /// x1 x2 x3 + x2 x4 + 3 with 1-based names mapped to indices 0..4.
    pub(crate) fn running_example() -> Polynomial {
        Polynomial::from_terms(
            4,
            [
                (vec![0, 1, 2], int(1)),
                (vec![1, 3], int(1)),
                (vec![], int(3)),
            ],
        )
        .unwrap()
    }

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn evaluate_examples() {
        let p = running_example();
        assert_eq!(p.evaluate(&q(&[1, 1, 1, 0])).unwrap(), int(4));
        assert_eq!(p.evaluate(&q(&[0, 0, 0, 0])).unwrap(), int(3));
        let c = Polynomial::constant(3, int(3));
        assert_eq!(c.evaluate(&q(&[1, 0, 1])).unwrap(), int(3));
        assert_eq!(p.evaluate_bool(&[true, true, true, false]).unwrap(), int(4));
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let p = running_example();
        assert_eq!(
            p.evaluate(&q(&[1, 1])),
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 2
            })
        );
        assert!(p.evaluate_bool(&[true; 5]).is_err());
    }

    #[test]
    fn from_terms_canonicalizes() {
        let p = Polynomial::from_terms(
            3,
            [
                (vec![2, 0], int(1)),
                (vec![0, 2], int(2)),
                (vec![1], int(0)),
            ],
        )
        .unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&[0, 2]), int(3));
        assert_eq!(p.degree(), 2);
        assert!(matches!(
            Polynomial::from_terms(2, [(vec![2], int(1))]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn zero_polynomial_shape() {
        let z = Polynomial::zero(5);
        assert_eq!(z.degree(), 0);
        assert_eq!(z.constant_term(), int(0));
        assert_eq!(z.num_terms(), 0);
        let cancelled = &running_example() - &running_example();
        assert_eq!(cancelled, Polynomial::zero(4));
    }

    #[test]
    fn multilinearize_examples() {
        // x1^2 + x1 -> 2 x1
        let p = Polynomial::from_terms(1, [(vec![0, 0], int(1)), (vec![0], int(1))]).unwrap();
        let m = p.multilinearize();
        assert_eq!(m, Polynomial::from_terms(1, [(vec![0], int(2))]).unwrap());
        assert!(m.is_multilinear());
        assert!(!p.is_multilinear());

        let already = running_example();
        assert_eq!(already.multilinearize(), already);

        // x1^2 x2 - x1 x2 -> 0
        let p =
            Polynomial::from_terms(2, [(vec![0, 0, 1], int(1)), (vec![0, 1], int(-1))]).unwrap();
        assert!(p.multilinearize().is_zero());
    }

    #[test]
    fn min_smoothness_examples() {
        let p = Polynomial::from_terms(4, [(vec![0, 1], int(5))]).unwrap();
        assert_eq!(p.min_smoothness(), int(5));
        // constant on n = 2 declared degree 2 -> |c| / n^2
        let c = Polynomial::constant(2, int(8)).with_degree(2).unwrap();
        assert_eq!(c.min_smoothness(), int(2));
        assert_eq!(Polynomial::zero(3).min_smoothness(), int(0));
        // linear coefficient 6 at n = 3, d = 2 -> 6/3
        let p = Polynomial::from_terms(3, [(vec![0, 1], int(1)), (vec![2], int(6))]).unwrap();
        assert_eq!(p.min_smoothness(), int(2));
        assert!(p.is_smooth(&int(2)));
        assert!(!p.is_smooth(&ratio(3, 2)));
    }

    #[test]
    fn with_degree_rejects_lowering() {
        assert!(running_example().with_degree(2).is_err());
        let raised = running_example().with_degree(5).unwrap();
        assert_eq!(raised.degree(), 5);
        assert_eq!(raised.actual_degree(), 3);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(component_bound(&int(1), 0, 10), int(1));
        assert_eq!(component_bound(&int(2), 1, 5), int(20));
        assert_eq!(component_bound(&int(1), 2, 3), int(27));

        let b = crate::exact::to_f64(&global_bound(&int(1), 2, 10).unwrap());
        assert!(b >= 200.0 * std::f64::consts::E && (b - 543.656).abs() < 0.01);
        let b = crate::exact::to_f64(&global_bound(&int(2), 3, 5).unwrap());
        assert!(b >= 500.0 * std::f64::consts::E && (b - 1359.14).abs() < 0.01);
        assert!(global_bound(&int(1), 3, 3).is_err());
    }

    #[test]
    fn arithmetic_and_display() {
        let x0 = Polynomial::variable(2, 0).unwrap();
        let x1 = Polynomial::variable(2, 1).unwrap();
        let one = Polynomial::constant(2, int(1));
        let p = &(&x0 * &(&one - &x1)) + &(&x1 * &(&one - &x0));
        assert_eq!(p.to_string(), "-2*x0*x1 + x0 + x1");
        assert_eq!(p.evaluate_bool(&[true, false]).unwrap(), int(1));
        assert_eq!(p.evaluate_bool(&[true, true]).unwrap(), int(0));
        assert_eq!((-&p).coeff(&[0, 1]), int(2));
    }

    #[test]
    fn coefficient_of_extracts_partial() {
        let p = running_example();
        let c1 = p.coefficient_of(1).unwrap();
        assert_eq!(
            c1,
            Polynomial::from_terms(4, [(vec![0, 2], int(1)), (vec![3], int(1))]).unwrap()
        );
        let sq = Polynomial::from_terms(1, [(vec![0, 0], int(1))]).unwrap();
        assert_eq!(sq.coefficient_of(0), Err(Error::NotMultilinear));
    }
}
