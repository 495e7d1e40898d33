//! MAX-CUT, MAX-k-SAT and MAX-k-CSP as smooth polynomial programs.

mod csp_json;
mod dimacs;

pub use csp_json::{parse_csp_json, write_csp_json};
pub use dimacs::{
    parse_dimacs_cnf, parse_dimacs_cnf_uniform, parse_dimacs_graph, write_dimacs_cnf,
    write_dimacs_graph,
};

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::poly::Polynomial;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Edges are stored as `(min, max)`; repeated edges collapse to one.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { index: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Number of edges with endpoints on different sides of `x`.
    pub fn cut_size(&self, x: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| x[u] != x[v]).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn is_true(&self, x: &[bool]) -> bool {
        x[self.var] != self.negated
    }
}

/// CNF formula over `0..n`. Clauses may repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for clause in &clauses {
            let mut seen = BTreeSet::new();
            for lit in clause {
                if lit.var >= n {
                    return Err(Error::IndexOutOfRange { index: lit.var, n });
                }
                if !seen.insert(lit.var) {
                    return Err(Error::InvalidParameter(format!(
                        "variable {} appears twice in one clause",
                        lit.var
                    )));
                }
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// The common clause width, `None` for an empty formula.
    pub fn uniform_width(&self) -> Result<Option<usize>> {
        let mut widths = self.clauses.iter().map(Vec::len);
        let Some(k) = widths.next() else {
            return Ok(None);
        };
        match widths.find(|&w| w != k) {
            Some(w) => Err(Error::InvalidParameter(format!(
                "mixed clause widths {k} and {w}"
            ))),
            None => Ok(Some(k)),
        }
    }

    pub fn satisfied_count(&self, x: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.is_true(x)))
            .count()
    }
}

/// One CSP constraint. `table[t]` is the value on the assignment whose
/// `r`-th scope variable is bit `k-1-r` of `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspConstraint {
    pub scope: Vec<usize>,
    pub table: Vec<bool>,
}

impl CspConstraint {
    pub fn is_satisfied(&self, x: &[bool]) -> bool {
        let k = self.scope.len();
        let t = self.scope.iter().enumerate().fold(0usize, |acc, (r, &v)| {
            acc | (usize::from(x[v]) << (k - 1 - r))
        });
        self.table[t]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    n: usize,
    k: usize,
    constraints: Vec<CspConstraint>,
}

/// Widest arity accepted for dense truth tables.
pub const MAX_CSP_ARITY: usize = 16;

impl CspInstance {
    pub fn new(n: usize, k: usize, constraints: Vec<CspConstraint>) -> Result<Self> {
        if k > MAX_CSP_ARITY {
            return Err(Error::InvalidParameter(format!(
                "arity {k} exceeds {MAX_CSP_ARITY}"
            )));
        }
        for c in &constraints {
            if c.scope.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "scope {:?} does not have {k} variables",
                    c.scope
                )));
            }
            if c.table.len() != 1 << k {
                return Err(Error::InvalidParameter(format!(
                    "truth table has {} entries, expected {}",
                    c.table.len(),
                    1usize << k
                )));
            }
            let mut seen = BTreeSet::new();
            for &v in &c.scope {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidParameter(format!(
                        "variable {v} repeated in a scope"
                    )));
                }
            }
        }
        Ok(CspInstance { n, k, constraints })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn constraints(&self) -> &[CspConstraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn satisfied_count(&self, x: &[bool]) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.is_satisfied(x))
            .count()
    }

    /// `M`: the largest number of constraints on one variable set.
    pub fn max_scope_multiplicity(&self) -> usize {
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in &self.constraints {
            let mut key = c.scope.clone();
            key.sort_unstable();
            *counts.entry(key).or_default() += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }
}

fn linear(n: usize, var: usize, positive: bool) -> Polynomial {
    // x or 1 - x
    let terms = if positive {
        vec![(vec![var], Rational::one())]
    } else {
        vec![(vec![], Rational::one()), (vec![var], -Rational::one())]
    };
    Polynomial::from_terms(n, terms).expect("index checked by caller")
}

fn product(n: usize, factors: impl IntoIterator<Item = Polynomial>) -> Polynomial {
    factors
        .into_iter()
        .fold(Polynomial::constant(n, Rational::one()), |acc, f| &acc * &f)
}

/// `sum_{(i,j) in E} (x_i + x_j - 2 x_i x_j)`, the cut size.
pub fn maxcut_objective(g: &Graph) -> Polynomial {
    let mut terms = Vec::with_capacity(3 * g.num_edges());
    for (u, v) in g.edges() {
        terms.push((vec![u], int(1)));
        terms.push((vec![v], int(1)));
        terms.push((vec![u, v], int(-2)));
    }
    Polynomial::from_terms(g.n(), terms)
        .expect("edges in range")
        .with_degree(2)
        .expect("degree at most 2")
}

/// `sum_C (1 - prod_{i in C+} (1 - x_i) prod_{i in C-} x_i)`, the number of
/// satisfied clauses. The declared degree is the clause width.
pub fn maxksat_objective(f: &CnfFormula) -> Result<Polynomial> {
    let n = f.n();
    let k = f.uniform_width()?.unwrap_or(0);
    let mut total = Polynomial::zero(n);
    for clause in f.clauses() {
        let unsat = product(n, clause.iter().map(|l| linear(n, l.var, l.negated)));
        let sat = &Polynomial::constant(n, Rational::one()) - &unsat;
        total = &total + &sat;
    }
    total.with_degree(k)
}

/// `sum_c sum_{a : c(a) = 1} prod_r x^{a_r} (1-x)^{1-a_r}`, the number of
/// satisfied constraints. The declared degree is the arity.
pub fn maxkcsp_objective(c: &CspInstance) -> Polynomial {
    let n = c.n();
    let k = c.k();
    let mut terms: Vec<(Vec<usize>, Rational)> = Vec::new();
    for con in c.constraints() {
        for (t, _) in con.table.iter().enumerate().filter(|(_, &on)| on) {
            let indicator = product(
                n,
                con.scope
                    .iter()
                    .enumerate()
                    .map(|(r, &v)| linear(n, v, (t >> (k - 1 - r)) & 1 == 1)),
            );
            terms.extend(indicator.terms().map(|(v, c)| (v.to_vec(), c.clone())));
        }
    }
    Polynomial::from_terms(n, terms)
        .expect("scopes in range")
        .with_degree(k)
        .expect("indicators have degree at most k")
}

/// `G(n, p)`: each pair `i < j` joined independently with probability `p`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

fn check_arity(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n (k = {k}, n = {n})"
        )));
    }
    Ok(())
}

fn random_scope(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut scope = sample(rng, n, k).into_vec();
    scope.sort_unstable();
    scope
}

/// `m` clauses on `k` distinct variables each, signs uniform.
pub fn gen_ksat(n: usize, m: usize, k: usize, seed: u64) -> Result<CnfFormula> {
    check_arity(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..m)
        .map(|_| {
            random_scope(&mut rng, n, k)
                .into_iter()
                .map(|var| Literal {
                    var,
                    negated: rng.gen_bool(0.5),
                })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses)
}

/// `m` constraints with uniform scopes and uniform truth tables.
pub fn gen_kcsp(n: usize, m: usize, k: usize, seed: u64) -> Result<CspInstance> {
    check_arity(n, k)?;
    if k > MAX_CSP_ARITY {
        return Err(Error::InvalidParameter(format!(
            "arity {k} exceeds {MAX_CSP_ARITY}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let constraints = (0..m)
        .map(|_| {
            let scope = random_scope(&mut rng, n, k);
            let table = (0..1usize << k).map(|_| rng.gen_bool(0.5)).collect();
            CspConstraint { scope, table }
        })
        .collect();
    CspInstance::new(n, k, constraints)
}
