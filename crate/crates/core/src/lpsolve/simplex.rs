//! Bounded-variable revised primal simplex.
//!
//! Every row `lower <= a.x <= upper` becomes `a.x - s = 0` with the slack `s`
//! carrying the row bounds, so all variables are boxed and the right-hand side
//! is zero. Nonbasic variables sit at a bound. The basis inverse is kept dense
//! and refactorized periodically.
//!
//! Pricing is Dantzig (largest reduced cost) with a Harris two-pass ratio
//! test; after [`SimplexSolver::bland_after`] degenerate pivots the solver
//! switches permanently to Bland's rule.

use log::{debug, warn};

use super::{LpBackend, LpModel, LpSolution, LpStatus, FEAS_TOL};

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-11;
const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone)]
pub struct SimplexSolver {
    /// Degenerate pivots tolerated before switching to Bland's rule.
    pub bland_after: usize,
    /// Iteration cap is `iteration_factor * (rows + vars)`.
    pub iteration_factor: usize,
}

impl Default for SimplexSolver {
    fn default() -> Self {
        SimplexSolver {
            bland_after: 1000,
            iteration_factor: 50,
        }
    }
}

impl LpBackend for SimplexSolver {
    fn name(&self) -> &str {
        "simplex"
    }

    fn solve(&self, model: &LpModel) -> LpSolution {
        self.run(model, None)
    }

    fn solve_from(&self, model: &LpModel, start: &[f64]) -> LpSolution {
        self.run(model, Some(start))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Column {
    Structural(usize),
    Slack(usize),
    Artificial(usize, f64),
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
    Singular,
}

struct Tableau<'m> {
    model: &'m LpModel,
    rows: Vec<usize>,
    m: usize,
    columns: Vec<Column>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    // basic position of each variable
    position: Vec<Option<usize>>,
    binv: Vec<Vec<f64>>,
    iterations: usize,
    max_iterations: usize,
    degenerate: usize,
    bland: bool,
    bland_after: usize,
    since_refactor: usize,
}

impl SimplexSolver {
    fn run(&self, model: &LpModel, start: Option<&[f64]>) -> LpSolution {
        let n = model.num_vars;
        if let Err(msg) = structural_check(model) {
            warn!("malformed LP model: {msg}");
            return LpSolution::failed(LpStatus::NumericalFailure, n, 0);
        }
        if model.var_bounds.iter().any(|&(lo, hi)| lo > hi)
            || model.rows.iter().any(|r| r.lower > r.upper)
        {
            return LpSolution::failed(LpStatus::Infeasible, n, 0);
        }

        // Empty rows only constrain the constant 0.
        let mut kept = Vec::with_capacity(model.rows.len());
        for (r, row) in model.rows.iter().enumerate() {
            let empty = row.coeffs.iter().all(|&c| c == 0.0);
            if empty {
                if row.lower > FEAS_TOL * row.lower.abs().max(1.0)
                    || row.upper < -FEAS_TOL * row.upper.abs().max(1.0)
                {
                    return LpSolution::failed(LpStatus::Infeasible, n, 0);
                }
                continue;
            }
            if row.lower == f64::NEG_INFINITY && row.upper == f64::INFINITY {
                continue;
            }
            kept.push(r);
        }

        let cap = self.iteration_factor * (model.rows.len() + n).max(1);
        let mut t = Tableau::new(model, kept, start, cap, self.bland_after);

        if t.has_artificials() {
            match t.optimize() {
                Outcome::Optimal => {}
                Outcome::Unbounded | Outcome::Singular => {
                    return LpSolution::failed(LpStatus::NumericalFailure, n, t.iterations)
                }
                Outcome::IterationLimit => {
                    warn!("simplex phase 1 hit the iteration cap ({cap})");
                    return LpSolution::failed(LpStatus::NumericalFailure, n, t.iterations);
                }
            }
            let infeasibility = t.artificial_sum();
            let scale = t.row_scale();
            if infeasibility > FEAS_TOL * scale {
                debug!("phase 1 ended with infeasibility {infeasibility:e}");
                return LpSolution::failed(LpStatus::Infeasible, n, t.iterations);
            }
            t.retire_artificials();
        }

        t.set_phase2_costs();
        match t.optimize() {
            Outcome::Optimal => {}
            Outcome::Unbounded => return LpSolution::failed(LpStatus::Unbounded, n, t.iterations),
            Outcome::Singular => {
                return LpSolution::failed(LpStatus::NumericalFailure, n, t.iterations)
            }
            Outcome::IterationLimit => {
                warn!("simplex phase 2 hit the iteration cap ({cap})");
                return LpSolution::failed(LpStatus::NumericalFailure, n, t.iterations);
            }
        }
        if !t.refactor() {
            return LpSolution::failed(LpStatus::NumericalFailure, n, t.iterations);
        }

        let y: Vec<f64> = (0..n)
            .map(|j| t.x[j].clamp(model.var_bounds[j].0, model.var_bounds[j].1))
            .collect();
        if model.max_scaled_violation(&y) > FEAS_TOL {
            warn!(
                "simplex optimum violates rows by {:e}",
                model.max_scaled_violation(&y)
            );
            return LpSolution::failed(LpStatus::NumericalFailure, n, t.iterations);
        }
        LpSolution {
            status: LpStatus::Optimal,
            objective_value: model.objective_value(&y),
            y,
            iterations: t.iterations,
        }
    }
}

/// Like [`LpModel::validate`] but tolerates inverted bounds, which are
/// reported as infeasibility instead.
fn structural_check(model: &LpModel) -> Result<(), String> {
    let n = model.num_vars;
    if model.var_bounds.len() != n || model.objective.len() != n {
        return Err("bounds/objective length differs from num_vars".into());
    }
    if model.objective.iter().any(|c| !c.is_finite()) {
        return Err("objective has a non-finite coefficient".into());
    }
    if model
        .var_bounds
        .iter()
        .any(|(lo, hi)| lo.is_nan() || hi.is_nan())
    {
        return Err("NaN variable bound".into());
    }
    for (r, row) in model.rows.iter().enumerate() {
        if row.coeffs.len() != n || row.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(format!("row {r} is malformed"));
        }
        if row.lower.is_nan() || row.upper.is_nan() {
            return Err(format!("row {r} has a NaN bound"));
        }
    }
    Ok(())
}

/// Nonbasic resting value for a variable with bounds `[lo, hi]`.
fn rest_value(lo: f64, hi: f64, wanted: Option<f64>) -> f64 {
    match wanted {
        Some(v) if v.is_finite() => {
            // snap to the nearer finite bound
            let dl = if lo.is_finite() {
                (v - lo).abs()
            } else {
                f64::INFINITY
            };
            let dh = if hi.is_finite() {
                (hi - v).abs()
            } else {
                f64::INFINITY
            };
            if dl.is_infinite() && dh.is_infinite() {
                0.0
            } else if dh < dl {
                hi
            } else {
                lo
            }
        }
        _ => {
            if lo.is_finite() {
                lo
            } else if hi.is_finite() {
                hi
            } else {
                0.0
            }
        }
    }
}

impl<'m> Tableau<'m> {
    fn new(
        model: &'m LpModel,
        rows: Vec<usize>,
        start: Option<&[f64]>,
        max_iterations: usize,
        bland_after: usize,
    ) -> Self {
        let n = model.num_vars;
        let m = rows.len();
        let mut columns: Vec<Column> = (0..n).map(Column::Structural).collect();
        let mut lo: Vec<f64> = model.var_bounds.iter().map(|b| b.0).collect();
        let mut hi: Vec<f64> = model.var_bounds.iter().map(|b| b.1).collect();
        let mut x: Vec<f64> = (0..n)
            .map(|j| {
                let wanted = start.and_then(|s| s.get(j).copied());
                rest_value(lo[j], hi[j], wanted)
            })
            .collect();

        let mut basis = Vec::with_capacity(m);
        let mut binv_diag = Vec::with_capacity(m);
        let mut artificial = Vec::new();
        for (pos, &r) in rows.iter().enumerate() {
            let row = &model.rows[r];
            let act = row.activity(&x[..n]);
            let slack = n + pos;
            columns.push(Column::Slack(pos));
            lo.push(row.lower);
            hi.push(row.upper);
            let tol = FEAS_TOL * act.abs().max(1.0);
            if act >= row.lower - tol && act <= row.upper + tol {
                x.push(act);
                basis.push(slack);
                binv_diag.push(-1.0);
            } else {
                let bound = if act < row.lower {
                    row.lower
                } else {
                    row.upper
                };
                x.push(bound);
                artificial.push((pos, bound - act));
                basis.push(usize::MAX);
                binv_diag.push(0.0);
            }
        }
        for (pos, gap) in artificial {
            // a.x - s + sign * art = 0 with s at `bound` gives art = |gap|
            let sign = if gap >= 0.0 { 1.0 } else { -1.0 };
            let var = columns.len();
            columns.push(Column::Artificial(pos, sign));
            lo.push(0.0);
            hi.push(f64::INFINITY);
            x.push(gap.abs());
            basis[pos] = var;
            binv_diag[pos] = sign;
        }

        let total = columns.len();
        let mut position = vec![None; total];
        for (pos, &v) in basis.iter().enumerate() {
            position[v] = Some(pos);
        }
        let mut binv = vec![vec![0.0; m]; m];
        for (i, d) in binv_diag.iter().enumerate() {
            binv[i][i] = 1.0 / d;
        }
        let cost = columns
            .iter()
            .map(|c| matches!(c, Column::Artificial(..)) as u8 as f64)
            .collect();

        Tableau {
            model,
            rows,
            m,
            columns,
            lo,
            hi,
            x,
            cost,
            basis,
            position,
            binv,
            iterations: 0,
            max_iterations,
            degenerate: 0,
            bland: false,
            bland_after,
            since_refactor: 0,
        }
    }

    fn has_artificials(&self) -> bool {
        self.columns
            .iter()
            .any(|c| matches!(c, Column::Artificial(..)))
    }

    fn artificial_sum(&self) -> f64 {
        self.columns
            .iter()
            .zip(&self.x)
            .filter(|(c, _)| matches!(c, Column::Artificial(..)))
            .map(|(_, v)| v.abs())
            .sum()
    }

    fn row_scale(&self) -> f64 {
        self.rows
            .iter()
            .map(|&r| {
                let row = &self.model.rows[r];
                [row.lower, row.upper]
                    .into_iter()
                    .filter(|b| b.is_finite())
                    .fold(1.0f64, |a, b| a.max(b.abs()))
            })
            .fold(1.0, f64::max)
    }

    fn retire_artificials(&mut self) {
        for v in 0..self.columns.len() {
            if matches!(self.columns[v], Column::Artificial(..)) {
                self.hi[v] = 0.0;
                if self.position[v].is_none() {
                    self.x[v] = 0.0;
                }
            }
        }
    }

    fn set_phase2_costs(&mut self) {
        for (v, c) in self.columns.iter().enumerate() {
            self.cost[v] = match c {
                // minimize the negated objective
                Column::Structural(j) => -self.model.objective[*j],
                _ => 0.0,
            };
        }
    }

    /// `B^-1 a_v`
    fn ftran(&self, v: usize) -> Vec<f64> {
        match self.columns[v] {
            Column::Structural(j) => {
                let a: Vec<(usize, f64)> = self
                    .rows
                    .iter()
                    .enumerate()
                    .filter_map(|(pos, &r)| {
                        let c = self.model.rows[r].coeffs[j];
                        (c != 0.0).then_some((pos, c))
                    })
                    .collect();
                self.binv
                    .iter()
                    .map(|row| a.iter().map(|&(p, c)| row[p] * c).sum())
                    .collect()
            }
            Column::Slack(pos) => self.binv.iter().map(|row| -row[pos]).collect(),
            Column::Artificial(pos, s) => self.binv.iter().map(|row| s * row[pos]).collect(),
        }
    }

    fn column_dot(&self, v: usize, y: &[f64]) -> f64 {
        match self.columns[v] {
            Column::Structural(j) => self
                .rows
                .iter()
                .enumerate()
                .map(|(pos, &r)| self.model.rows[r].coeffs[j] * y[pos])
                .sum(),
            Column::Slack(pos) => -y[pos],
            Column::Artificial(pos, s) => s * y[pos],
        }
    }

    fn duals(&self) -> Vec<f64> {
        let mut pi = vec![0.0; self.m];
        for (i, &v) in self.basis.iter().enumerate() {
            let c = self.cost[v];
            if c != 0.0 {
                for (p, slot) in pi.iter_mut().enumerate() {
                    *slot += c * self.binv[i][p];
                }
            }
        }
        pi
    }

    /// Choose an entering variable and its direction (+1 increase, -1 decrease).
    fn price(&self) -> Option<(usize, f64)> {
        let pi = self.duals();
        let mut best: Option<(usize, f64, f64)> = None;
        for v in 0..self.columns.len() {
            if self.position[v].is_some() || self.lo[v] == self.hi[v] {
                continue;
            }
            let d = self.cost[v] - self.column_dot(v, &pi);
            let can_up = self.x[v] < self.hi[v];
            let can_down = self.x[v] > self.lo[v];
            let dir = if can_up && d < -DUAL_TOL {
                1.0
            } else if can_down && d > DUAL_TOL {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((v, dir));
            }
            if best.is_none_or(|(_, _, score)| d.abs() > score) {
                best = Some((v, dir, d.abs()));
            }
        }
        best.map(|(v, dir, _)| (v, dir))
    }

    /// Step limit for basic position `i` moving at `rate` per unit step,
    /// with the bounds relaxed by `slack`.
    fn limit(&self, i: usize, rate: f64, slack: f64) -> Option<f64> {
        let v = self.basis[i];
        if rate < 0.0 && self.lo[v].is_finite() {
            Some(((self.x[v] - self.lo[v] + slack) / -rate).max(0.0))
        } else if rate > 0.0 && self.hi[v].is_finite() {
            Some(((self.hi[v] - self.x[v] + slack) / rate).max(0.0))
        } else {
            None
        }
    }

    fn ratio_test(&self, w: &[f64], dir: f64) -> Option<(usize, f64)> {
        let candidates: Vec<(usize, f64)> = (0..self.m)
            .filter(|&i| w[i].abs() > PIVOT_TOL)
            .map(|i| (i, -dir * w[i]))
            .collect();
        if self.bland {
            let mut best: Option<(usize, f64)> = None;
            for &(i, rate) in &candidates {
                if let Some(t) = self.limit(i, rate, 0.0) {
                    let better = match best {
                        None => true,
                        Some((bi, bt)) => {
                            t < bt - 1e-12 || (t <= bt + 1e-12 && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((i, t));
                    }
                }
            }
            return best;
        }
        // Harris: widest step under relaxed bounds, then the largest pivot
        // among rows that block within that step.
        let relaxed = candidates
            .iter()
            .filter_map(|&(i, rate)| self.limit(i, rate, PRIMAL_TOL))
            .fold(f64::INFINITY, f64::min);
        if relaxed.is_infinite() {
            return None;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for &(i, rate) in &candidates {
            if let Some(t) = self.limit(i, rate, 0.0) {
                if t <= relaxed && best.is_none_or(|(_, _, piv)| w[i].abs() > piv) {
                    best = Some((i, t, w[i].abs()));
                }
            }
        }
        best.map(|(i, t, _)| (i, t))
    }

    fn optimize(&mut self) -> Outcome {
        loop {
            if self.iterations >= self.max_iterations {
                return Outcome::IterationLimit;
            }
            let Some((v, dir)) = self.price() else {
                return Outcome::Optimal;
            };
            let w = self.ftran(v);
            let leave = self.ratio_test(&w, dir);
            let flip = self.hi[v] - self.lo[v];
            self.iterations += 1;

            let (step, pivot_row) = match leave {
                Some((i, t)) if t < flip => (t, Some(i)),
                _ if flip.is_finite() => (flip, None),
                _ => return Outcome::Unbounded,
            };

            if step < DEGENERATE_STEP {
                self.degenerate += 1;
                if !self.bland && self.degenerate >= self.bland_after {
                    debug!(
                        "switching to Bland's rule after {} degenerate pivots",
                        self.degenerate
                    );
                    self.bland = true;
                }
            }

            for (i, wi) in w.iter().enumerate() {
                if *wi != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= dir * step * wi;
                }
            }
            match pivot_row {
                None => {
                    self.x[v] = if dir > 0.0 { self.hi[v] } else { self.lo[v] };
                }
                Some(p) => {
                    self.x[v] += dir * step;
                    let leaving = self.basis[p];
                    let rate = -dir * w[p];
                    self.x[leaving] = if rate < 0.0 {
                        self.lo[leaving]
                    } else {
                        self.hi[leaving]
                    };
                    self.position[leaving] = None;
                    self.position[v] = Some(p);
                    self.basis[p] = v;
                    self.pivot(p, &w);
                    self.since_refactor += 1;
                    if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                        return Outcome::Singular;
                    }
                }
            }
        }
    }

    fn pivot(&mut self, p: usize, w: &[f64]) {
        let inv = 1.0 / w[p];
        let pivot_row: Vec<f64> = self.binv[p].iter().map(|v| v * inv).collect();
        for (i, row) in self.binv.iter_mut().enumerate() {
            if i == p || w[i] == 0.0 {
                continue;
            }
            let f = w[i];
            for (a, b) in row.iter_mut().zip(&pivot_row) {
                *a -= f * b;
            }
        }
        self.binv[p] = pivot_row;
    }

    /// Recomputes `B^-1` from scratch and the basic values from the nonbasic
    /// ones. Returns `false` if the basis is numerically singular.
    fn refactor(&mut self) -> bool {
        self.since_refactor = 0;
        let m = self.m;
        if m == 0 {
            return true;
        }
        // dense basis matrix, columns = basic variables
        let mut a = vec![vec![0.0; 2 * m]; m];
        for (col, &v) in self.basis.iter().enumerate() {
            match self.columns[v] {
                Column::Structural(j) => {
                    for (pos, &r) in self.rows.iter().enumerate() {
                        a[pos][col] = self.model.rows[r].coeffs[j];
                    }
                }
                Column::Slack(pos) => a[pos][col] = -1.0,
                Column::Artificial(pos, s) => a[pos][col] = s,
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .expect("non-empty range");
            if a[piv][col].abs() < 1e-12 {
                return false;
            }
            a.swap(col, piv);
            let inv = 1.0 / a[col][col];
            for v in a[col].iter_mut() {
                *v *= inv;
            }
            let pivot_row = a[col].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != col && row[col] != 0.0 {
                    let f = row[col];
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        for (i, row) in a.into_iter().enumerate() {
            self.binv[i] = row[m..].to_vec();
        }

        // B x_B = -N x_N
        let mut rhs = vec![0.0; m];
        for v in 0..self.columns.len() {
            if self.position[v].is_some() || self.x[v] == 0.0 {
                continue;
            }
            let xv = self.x[v];
            match self.columns[v] {
                Column::Structural(j) => {
                    for (pos, &r) in self.rows.iter().enumerate() {
                        rhs[pos] -= self.model.rows[r].coeffs[j] * xv;
                    }
                }
                Column::Slack(pos) => rhs[pos] += xv,
                Column::Artificial(pos, s) => rhs[pos] -= s * xv,
            }
        }
        for i in 0..m {
            let v = self.basis[i];
            self.x[v] = self.binv[i].iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_value_snaps_to_nearest_bound() {
        assert_eq!(rest_value(0.0, 1.0, Some(0.9)), 1.0);
        assert_eq!(rest_value(0.0, 1.0, Some(0.2)), 0.0);
        assert_eq!(rest_value(f64::NEG_INFINITY, f64::INFINITY, None), 0.0);
        assert_eq!(rest_value(f64::NEG_INFINITY, 3.0, None), 3.0);
    }

    #[test]
    fn degenerate_problem_terminates_under_bland() {
        // Many redundant equality rows through the origin.
        let n = 6;
        let mut m = LpModel::unit_box(n);
        m.objective = (0..n).map(|j| (j + 1) as f64).collect();
        for r in 0..12 {
            let coeffs = (0..n).map(|j| ((r * 7 + j * 3) % 5) as f64 - 2.0).collect();
            m.add_row(coeffs, 0.0, 0.0);
        }
        let solver = SimplexSolver {
            bland_after: 0,
            ..SimplexSolver::default()
        };
        let a = solver.solve(&m);
        let b = SimplexSolver::default().solve(&m);
        assert_eq!(a.status, LpStatus::Optimal);
        assert_eq!(b.status, LpStatus::Optimal);
        assert!((a.objective_value - b.objective_value).abs() < 1e-7);
    }

    #[test]
    fn iteration_cap_reports_numerical_failure() {
        let mut m = LpModel::unit_box(3);
        m.objective = vec![1.0, 1.0, 1.0];
        m.add_row(vec![1.0, 1.0, 1.0], 2.5, 2.5);
        let solver = SimplexSolver {
            iteration_factor: 0,
            ..SimplexSolver::default()
        };
        assert_eq!(solver.solve(&m).status, LpStatus::NumericalFailure);
    }
}
