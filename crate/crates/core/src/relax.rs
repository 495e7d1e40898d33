//! Prediction-centred LP relaxation of a smooth polynomial program.
//!
//! Around a prediction `x̂` every component `p_I` is linearized by fixing its
//! children at `x̂`: `q_I(x) = c_I + sum_j x_j p_{I,j}(x̂)`. The LP maximizes
//! `q(x)` subject to `q_I(x)` staying within `δ_I` of `p_I(x̂)` for every
//! internal tuple. All data is exact; [`Relaxation::model`] rounds it to
//! floats with the row bounds widened outward.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{e_upper, int, pow_int, sqrt_upper, to_f64, to_f64_down, to_f64_up, Rational};
use crate::lpsolve::LpModel;
use crate::poly::{decompose, DecompositionTree, IndexTuple, Polynomial};

/// `δ` for a tuple of length `tuple_len`:
/// `β sqrt(nε)` on the last internal level and `2βe n^(d-|I|-1/2) sqrt(ε)`
/// above it. Square roots and `e` are rounded up.
pub fn tolerance(
    beta: &Rational,
    n: usize,
    d: usize,
    tuple_len: usize,
    eps: usize,
) -> Result<Rational> {
    if tuple_len == 0 || tuple_len + 1 > d {
        return Err(Error::InvalidParameter(format!(
            "tuple length {tuple_len} outside 1..={}",
            d.saturating_sub(1)
        )));
    }
    if eps > n {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} exceeds n = {n}"
        )));
    }
    if eps == 0 {
        return Ok(Rational::zero());
    }
    let root = sqrt_upper(n as u128 * eps as u128);
    if tuple_len + 1 == d {
        Ok(beta * root)
    } else {
        Ok(int(2) * beta * e_upper() * pow_int(n, d - tuple_len - 1) * root)
    }
}

/// `η = 2e(d-2) + 1` with `e` rounded up.
pub fn eta(d: usize) -> Rational {
    int(2) * e_upper() * int(d as i64 - 2) + Rational::one()
}

/// Relaxation-gap bound `2ηβ n^(d-1/2) sqrt(ε)`.
pub fn gap_bound(beta: &Rational, n: usize, d: usize, eps: usize) -> Result<Rational> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "gap bound needs d >= 2, got {d}"
        )));
    }
    let root = sqrt_upper(n as u128 * eps as u128);
    Ok(int(2) * eta(d) * beta * pow_int(n, d - 1) * root)
}

/// Tolerances `δ_I` for every internal tuple of one tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceTable {
    pub epsilon: usize,
    pub beta: Rational,
    pub n: usize,
    pub d: usize,
    pub entries: BTreeMap<IndexTuple, Rational>,
}

impl ToleranceTable {
    pub fn new(tree: &DecompositionTree, beta: &Rational, eps: usize) -> Result<Self> {
        let (n, d) = (tree.n(), tree.degree());
        let mut per_level = BTreeMap::new();
        let mut entries = BTreeMap::new();
        for node in tree.internal_tuples() {
            let len = node.tuple.len();
            let tol = match per_level.entry(len) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(tolerance(beta, n, d, len, eps)?)
                }
            };
            entries.insert(node.tuple.clone(), tol.clone());
        }
        Ok(ToleranceTable {
            epsilon: eps,
            beta: beta.clone(),
            n,
            d,
            entries,
        })
    }

    pub fn get(&self, tuple: &IndexTuple) -> Option<&Rational> {
        self.entries.get(tuple)
    }

    pub fn total(&self) -> Rational {
        self.entries
            .values()
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

/// A polynomial constraint `lower <= p(x) <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyConstraint {
    pub poly: Polynomial,
    pub lower: Rational,
    pub upper: Rational,
}

impl PolyConstraint {
    pub fn new(poly: Polynomial, lower: Rational, upper: Rational) -> Result<Self> {
        if lower > upper {
            return Err(Error::InvalidParameter(format!(
                "constraint bounds [{lower}, {upper}] are inverted"
            )));
        }
        Ok(PolyConstraint { poly, lower, upper })
    }

    /// Distance from `p(x)` to `[lower, upper]`.
    pub fn violation(&self, x: &[bool]) -> Result<Rational> {
        let v = self.poly.evaluate_bool(x)?;
        Ok(if v < self.lower {
            &self.lower - v
        } else if v > self.upper {
            v - &self.upper
        } else {
            Rational::zero()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedProgram {
    pub objective: Polynomial,
    pub constraints: Vec<PolyConstraint>,
}

impl ConstrainedProgram {
    pub fn new(objective: Polynomial, constraints: Vec<PolyConstraint>) -> Result<Self> {
        for c in &constraints {
            if c.poly.n() != objective.n() {
                return Err(Error::DimensionMismatch {
                    expected: objective.n(),
                    got: c.poly.n(),
                });
            }
        }
        Ok(ConstrainedProgram {
            objective,
            constraints,
        })
    }

    pub fn unconstrained(objective: Polynomial) -> Self {
        ConstrainedProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.objective.n()
    }

    /// Common degree: the largest declared degree, at least 2.
    pub fn common_degree(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.poly.degree())
            .chain([self.objective.degree(), 2])
            .max()
            .unwrap_or(2)
    }

    /// Largest smoothness parameter over objective and constraints, all
    /// measured against [`Self::common_degree`].
    pub fn beta(&self) -> Rational {
        let d = self.common_degree();
        std::iter::once(&self.objective)
            .chain(self.constraints.iter().map(|c| &c.poly))
            .map(|p| {
                p.clone()
                    .with_degree(d)
                    .expect("d is the maximum")
                    .min_smoothness()
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Largest violation over all constraints.
    pub fn max_violation(&self, x: &[bool]) -> Result<Rational> {
        let mut worst = Rational::zero();
        for c in &self.constraints {
            worst = worst.max(c.violation(x)?);
        }
        Ok(worst)
    }
}

/// What a relaxation row constrains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RowLabel {
    /// `q_I` of the objective.
    Objective { tuple: Vec<usize> },
    /// `q_c` against `[L_c - δ_c, U_c + δ_c]`.
    ConstraintTop { constraint: usize },
    /// `q_{c,I}` of constraint `c`.
    Constraint {
        constraint: usize,
        tuple: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxRow {
    pub label: RowLabel,
    /// Sparse `(variable, coefficient)` pairs, ascending in variable.
    pub coeffs: Vec<(usize, Rational)>,
    pub lower: Rational,
    pub upper: Rational,
}

impl RelaxRow {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, c)| acc + c * &x[*j])
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        let a = self.activity(x);
        a >= self.lower && a <= self.upper
    }
}

/// An exact LP relaxation over `x ∈ [0,1]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub n: usize,
    pub d: usize,
    pub eps: usize,
    pub beta: Rational,
    /// Dense objective coefficients `p_j(x̂)`.
    pub objective: Vec<Rational>,
    /// The top-level constant `c`.
    pub objective_constant: Rational,
    pub rows: Vec<RelaxRow>,
    /// `δ_c` per constraint, empty when unconstrained.
    pub constraint_slack: Vec<Rational>,
}

impl Relaxation {
    pub fn objective_value(&self, x: &[Rational]) -> Result<Rational> {
        self.check_dim(x.len())?;
        Ok(self
            .objective
            .iter()
            .zip(x)
            .fold(self.objective_constant.clone(), |acc, (c, v)| acc + c * v))
    }

    /// Exact membership test for a point of `[0,1]^n`.
    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        self.check_dim(x.len())?;
        let (zero, one) = (Rational::zero(), Rational::one());
        let in_box = x.iter().all(|v| *v >= zero && *v <= one);
        Ok(in_box && self.rows.iter().all(|r| r.contains(x)))
    }

    pub fn contains_bool(&self, x: &[bool]) -> Result<bool> {
        self.contains(&bools_to_rationals(x))
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

    /// Float model for the solver. Coefficients are rounded to nearest and
    /// row bounds outward, so exact-feasible points stay feasible up to the
    /// coefficient rounding.
    pub fn model(&self) -> LpModel {
        let mut m = LpModel::unit_box(self.n);
        m.objective = self.objective.iter().map(to_f64).collect();
        m.objective_constant = to_f64(&self.objective_constant);
        for row in &self.rows {
            let mut coeffs = vec![0.0; self.n];
            for (j, c) in &row.coeffs {
                coeffs[*j] = to_f64(c);
            }
            m.add_row(coeffs, to_f64_down(&row.lower), to_f64_up(&row.upper));
        }
        m
    }
}

pub(crate) fn bools_to_rationals(x: &[bool]) -> Vec<Rational> {
    x.iter()
        .map(|&b| if b { Rational::one() } else { Rational::zero() })
        .collect()
}

fn check_inputs(n: usize, xhat: &[bool], eps: usize) -> Result<()> {
    if xhat.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xhat.len(),
        });
    }
    if eps > n {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} exceeds n = {n}"
        )));
    }
    Ok(())
}

/// Sparse `sum_j x_j v(p_{I,j})` for the children of one node.
fn child_row(tree: &DecompositionTree, node: usize, values: &[Rational]) -> Vec<(usize, Rational)> {
    tree.nodes()[node]
        .children
        .iter()
        .filter(|(_, child)| !values[*child].is_zero())
        .map(|&(j, child)| (j, values[child].clone()))
        .collect()
}

/// Appends the internal-tuple rows of one tree; `label` names each row.
fn tolerance_rows(
    tree: &DecompositionTree,
    values: &[Rational],
    table: &ToleranceTable,
    label: impl Fn(&IndexTuple) -> RowLabel,
    rows: &mut Vec<RelaxRow>,
) {
    for (id, node) in tree.nodes().iter().enumerate().skip(1) {
        let Some(delta) = table.get(&node.tuple) else {
            continue;
        };
        if node.is_leaf() {
            continue;
        }
        let centre = &values[id] - &node.constant;
        rows.push(RelaxRow {
            label: label(&node.tuple),
            coeffs: child_row(tree, id, values),
            lower: &centre - delta,
            upper: centre + delta,
        });
    }
}

/// The relaxation of `max p(x)` centred at `xhat` with error budget `eps`.
/// The tree's declared degree is the `d` of the tolerance schedule.
pub fn build_relaxation(
    tree: &DecompositionTree,
    xhat: &[bool],
    eps: usize,
    beta: &Rational,
) -> Result<Relaxation> {
    let n = tree.n();
    check_inputs(n, xhat, eps)?;
    let values = tree.node_values_bool(xhat)?;
    let table = ToleranceTable::new(tree, beta, eps)?;

    let mut objective = vec![Rational::zero(); n];
    for (j, c) in child_row(tree, 0, &values) {
        objective[j] = c;
    }
    let mut rows = Vec::new();
    tolerance_rows(
        tree,
        &values,
        &table,
        |t| RowLabel::Objective { tuple: t.0.clone() },
        &mut rows,
    );
    Ok(Relaxation {
        n,
        d: tree.degree(),
        eps,
        beta: beta.clone(),
        objective,
        objective_constant: tree.constant_c().clone(),
        rows,
        constraint_slack: Vec::new(),
    })
}

/// Decomposes `p` after raising its declared degree to `d`.
pub(crate) fn tree_at_degree(p: &Polynomial, d: usize) -> Result<DecompositionTree> {
    decompose(&p.clone().with_degree(d)?)
}

/// The relaxation of a constrained program. Every polynomial is treated as
/// having the program's common degree. Each constraint adds its own
/// tolerance rows plus a top-level row `q_c(x) ∈ [L_c - δ_c, U_c + δ_c]`
/// where `δ_c` sums the tolerances of all of its tuples.
pub fn build_constrained_relaxation(
    prog: &ConstrainedProgram,
    xhat: &[bool],
    eps: usize,
    beta: &Rational,
) -> Result<Relaxation> {
    let d = prog.common_degree();
    let tree = tree_at_degree(&prog.objective, d)?;
    let mut relax = build_relaxation(&tree, xhat, eps, beta)?;
    for (c, con) in prog.constraints.iter().enumerate() {
        let ctree = tree_at_degree(&con.poly, d)?;
        let values = ctree.node_values_bool(xhat)?;
        let table = ToleranceTable::new(&ctree, beta, eps)?;
        let slack = table.total();
        let base = ctree.constant_c();
        relax.rows.push(RelaxRow {
            label: RowLabel::ConstraintTop { constraint: c },
            coeffs: child_row(&ctree, 0, &values),
            lower: &con.lower - base - &slack,
            upper: &con.upper - base + &slack,
        });
        tolerance_rows(
            &ctree,
            &values,
            &table,
            |t| RowLabel::Constraint {
                constraint: c,
                tuple: t.0.clone(),
            },
            &mut relax.rows,
        );
        relax.constraint_slack.push(slack);
    }
    Ok(relax)
}
