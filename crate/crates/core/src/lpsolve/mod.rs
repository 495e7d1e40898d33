//! Linear programs over box-bounded variables and a self-contained solver.
//!
//! Every model is a maximization with two-sided rows `lower <= a.x <= upper`.
//! The embedded [`SimplexSolver`] is the default [`LpBackend`]; any other type
//! implementing the trait can be substituted by the pipeline.

mod lp_format;
mod simplex;

pub use simplex::SimplexSolver;

use serde::{Deserialize, Serialize};

/// Row feasibility tolerance, scaled by `max(1, |bound|)`.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl LpRow {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// Amount by which `x` falls outside `[lower, upper]` (0 when inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        (self.lower - act).max(act - self.upper).max(0.0)
    }

    /// Violation relative to `max(1, |violated bound|)`.
    pub fn scaled_violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        if act < self.lower {
            (self.lower - act) / self.lower.abs().max(1.0)
        } else if act > self.upper {
            (act - self.upper) / self.upper.abs().max(1.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    pub num_vars: usize,
    pub var_bounds: Vec<(f64, f64)>,
    pub rows: Vec<LpRow>,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
}

impl LpModel {
    /// `num_vars` variables in `[0, 1]`, zero objective, no rows.
    pub fn unit_box(num_vars: usize) -> Self {
        LpModel {
            num_vars,
            var_bounds: vec![(0.0, 1.0); num_vars],
            rows: Vec::new(),
            objective: vec![0.0; num_vars],
            objective_constant: 0.0,
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, lower: f64, upper: f64) {
        self.rows.push(LpRow {
            coeffs,
            lower,
            upper,
        });
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.var_bounds.len() != self.num_vars || self.objective.len() != self.num_vars {
            return Err("bounds/objective length differs from num_vars".into());
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(format!("variable {j} has bounds [{lo}, {hi}]"));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != self.num_vars {
                return Err(format!("row {r} has {} coefficients", row.coeffs.len()));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(format!("row {r} has a non-finite coefficient"));
            }
            if row.lower.is_nan() || row.upper.is_nan() || row.lower > row.upper {
                return Err(format!("row {r} has bounds [{}, {}]", row.lower, row.upper));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err("objective has a non-finite coefficient".into());
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant
            + self
                .objective
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    /// Largest scaled row violation of `x`; bounds are not checked.
    pub fn max_scaled_violation(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| row.scaled_violation(x))
            .fold(0.0, f64::max)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.num_vars
            && x.iter()
                .zip(&self.var_bounds)
                .all(|(v, &(lo, hi))| *v >= lo - tol && *v <= hi + tol)
            && self.max_scaled_violation(x) <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub y: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub(crate) fn failed(status: LpStatus, num_vars: usize, iterations: usize) -> Self {
        LpSolution {
            status,
            y: vec![0.0; num_vars],
            objective_value: f64::NAN,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Anything that maps an [`LpModel`] to an [`LpSolution`].
pub trait LpBackend: Send + Sync {
    fn name(&self) -> &str;

    fn solve(&self, model: &LpModel) -> LpSolution;

    /// Solve starting from a point known to be feasible. Backends that cannot
    /// use a start simply ignore it.
    fn solve_from(&self, model: &LpModel, start: &[f64]) -> LpSolution {
        let _ = start;
        self.solve(model)
    }
}

/// Solves with the embedded simplex.
pub fn solve(model: &LpModel) -> LpSolution {
    SimplexSolver::default().solve(model)
}
