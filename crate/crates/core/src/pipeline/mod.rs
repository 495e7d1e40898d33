//! The prediction-guided solve loop: for each error budget `ε` build the
//! relaxation around `x̂`, solve it, round, and keep the best assignment
//! seen, including `x̂` itself and a baseline.

mod bounds;
mod brute;
mod instance;

pub use bounds::{constraint_delta, guarantee_bound, maxcut_ratio, maxksat_ratio};
pub use brute::{exact_solve_program, EXACT_CAP};
pub use instance::{Instance, ProblemKind};

use std::time::Instant;

use log::warn;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bits::serde_bits;
use crate::error::{Error, Result};
use crate::exact::{fmt_decimal15, int, serde_rational, Rational};
use crate::exec::{map_ordered, Execution};
use crate::lpsolve::{LpBackend, LpStatus, SimplexSolver};
use crate::relax::{build_constrained_relaxation, gap_bound, ConstrainedProgram, PolyConstraint};
use crate::rounding::{
    greedy_round, randomized_round, rounding_error_bound, RoundingOutcome, Strategy,
};

/// Which error budgets to try.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsGrid {
    /// `0, 1, ..., n`
    #[default]
    Full,
    /// `0, s, 2s, ...` up to `n`
    Stride(usize),
    /// Sorted and deduplicated.
    Explicit(Vec<usize>),
}

impl EpsGrid {
    pub fn values(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            EpsGrid::Full => Ok((0..=n).collect()),
            EpsGrid::Stride(0) => Err(Error::InvalidParameter("grid stride must be >= 1".into())),
            EpsGrid::Stride(s) => Ok((0..=n).step_by(*s).collect()),
            EpsGrid::Explicit(list) => {
                if let Some(bad) = list.iter().find(|&&e| e > n) {
                    return Err(Error::InvalidParameter(format!(
                        "grid value {bad} exceeds n = {n}"
                    )));
                }
                let mut v = list.clone();
                v.sort_unstable();
                v.dedup();
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub strategy: Strategy,
    pub seed: u64,
    pub eps_grid: EpsGrid,
    pub include_prediction_candidate: bool,
    pub include_baseline_candidate: bool,
    /// Tail parameter of the reported randomized bounds.
    #[serde(with = "serde_rational")]
    pub k: Rational,
    /// Rounding draws per `ε` for the randomized strategy.
    pub seeds_per_eps: usize,
    pub execution: Execution,
    /// Cap on `n` for exhaustive search.
    pub exact_cap: usize,
    /// When false, `wall_ms` is reported as 0 so reports are reproducible.
    pub record_timing: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            strategy: Strategy::Greedy,
            seed: 0,
            eps_grid: EpsGrid::Full,
            include_prediction_candidate: true,
            include_baseline_candidate: true,
            k: int(1),
            seeds_per_eps: 16,
            execution: Execution::default(),
            exact_cap: EXACT_CAP,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum CandidateSource {
    Prediction,
    Baseline,
    Exact,
    Rounded { eps: usize, seed: Option<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(flatten)]
    pub source: CandidateSource,
    #[serde(with = "serde_bits")]
    pub z: Vec<bool>,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    /// Largest constraint violation; 0 when unconstrained.
    #[serde(with = "serde_rational")]
    pub violation: Rational,
}

/// One row of the `ε` loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRecord {
    pub eps: usize,
    pub status: LpStatus,
    pub lp_value: Option<f64>,
    pub lp_iterations: usize,
    #[serde(with = "serde_rational::option")]
    pub rounded_value: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub violation_max: Option<Rational>,
    pub outcomes: Vec<RoundingOutcome>,
    #[serde(with = "serde_rational")]
    pub gap_bound: Rational,
    #[serde(with = "serde_rational::option")]
    pub rounding_bound: Option<Rational>,
    /// Additive constraint error allowed at this `ε`, when constrained.
    #[serde(with = "serde_rational::option")]
    pub constraint_delta: Option<Rational>,
    pub wall_ms: f64,
}

impl EpsRecord {
    pub fn is_solved(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub d: usize,
    #[serde(with = "serde_rational")]
    pub beta: Rational,
    pub strategy: Strategy,
    pub num_constraints: usize,
    /// True when `n <= d` and the LP stage was replaced by exhaustive search.
    pub exact_bypass: bool,
    #[serde(with = "serde_bits")]
    pub best_z: Vec<bool>,
    #[serde(with = "serde_rational")]
    pub best_value: Rational,
    #[serde(with = "serde_rational")]
    pub best_violation: Rational,
    pub best_source: CandidateSource,
    pub per_eps: Vec<EpsRecord>,
    pub candidates: Vec<Candidate>,
}

impl SolveReport {
    /// LP solves that returned an optimum.
    pub fn lp_solves(&self) -> usize {
        self.per_eps.iter().filter(|r| r.is_solved()).count()
    }

    pub fn skipped(&self) -> usize {
        self.per_eps.len() - self.lp_solves()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per `ε`: `eps,lp_value,rounded_value,violation_max,wall_ms,status`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "eps",
            "lp_value",
            "rounded_value",
            "violation_max",
            "wall_ms",
            "status",
        ])
        .expect("in-memory write");
        for r in &self.per_eps {
            let opt = |v: &Option<Rational>| v.as_ref().map(|x| x.to_string()).unwrap_or_default();
            let status = serde_json::to_value(r.status).expect("status serializes");
            w.write_record([
                r.eps.to_string(),
                r.lp_value.map(fmt_decimal15).unwrap_or_default(),
                opt(&r.rounded_value),
                opt(&r.violation_max),
                format!("{:.3}", r.wall_ms),
                status.as_str().unwrap_or_default().to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii output")
    }
}

/// Exhaustive maximization of the instance.
pub fn exact_solve(instance: &Instance) -> Result<(Vec<bool>, Rational)> {
    exact_solve_program(&instance.program, EXACT_CAP, Execution::default())
}

/// Runs the loop with the embedded simplex.
pub fn solve(
    instance: &Instance,
    prediction: &[bool],
    config: &SolveConfig,
) -> Result<SolveReport> {
    solve_program(
        &instance.program,
        prediction,
        config,
        &SimplexSolver::default(),
    )
}

pub fn solve_constrained(
    prog: &ConstrainedProgram,
    prediction: &[bool],
    config: &SolveConfig,
) -> Result<SolveReport> {
    solve_program(prog, prediction, config, &SimplexSolver::default())
}

/// Runs the loop with a caller-supplied LP backend.
pub fn solve_with_backend(
    instance: &Instance,
    prediction: &[bool],
    config: &SolveConfig,
    backend: &dyn LpBackend,
) -> Result<SolveReport> {
    solve_program(&instance.program, prediction, config, backend)
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `r`-th draw at budget `eps`.
pub fn rounding_seed(seed: u64, eps: usize, r: usize) -> u64 {
    mix(seed ^ mix(((eps as u64) << 20) | r as u64))
}

/// Bring every polynomial to canonical multilinear form at the common degree.
fn normalize(prog: &ConstrainedProgram) -> Result<ConstrainedProgram> {
    let d = prog.common_degree();
    let objective = prog.objective.multilinearize().with_degree(d)?;
    let constraints = prog
        .constraints
        .iter()
        .map(|c| {
            Ok(PolyConstraint {
                poly: c.poly.multilinearize().with_degree(d)?,
                ..c.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstrainedProgram {
        objective,
        constraints,
    })
}

fn candidate(
    prog: &ConstrainedProgram,
    source: CandidateSource,
    z: Vec<bool>,
) -> Result<Candidate> {
    Ok(Candidate {
        source,
        value: prog.objective.evaluate_bool(&z)?,
        violation: prog.max_violation(&z)?,
        z,
    })
}

/// Index of the best candidate. Unconstrained: largest value. Constrained:
/// largest value among zero-violation candidates, otherwise smallest
/// violation and then largest value. Ties go to the earliest candidate.
fn select(cands: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in cands.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let b = &cands[b];
                c.violation < b.violation || (c.violation == b.violation && c.value > b.value)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

fn solve_program(
    prog: &ConstrainedProgram,
    prediction: &[bool],
    config: &SolveConfig,
    backend: &dyn LpBackend,
) -> Result<SolveReport> {
    let n = prog.n();
    if prediction.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: prediction.len(),
        });
    }
    if config.seeds_per_eps == 0 {
        return Err(Error::InvalidParameter("seeds_per_eps must be >= 1".into()));
    }
    let prog = normalize(prog)?;
    let d = prog.common_degree();
    let beta = prog.beta();
    let grid = config.eps_grid.values(n)?;

    let mut candidates = Vec::new();
    if config.include_prediction_candidate {
        candidates.push(candidate(
            &prog,
            CandidateSource::Prediction,
            prediction.to_vec(),
        )?);
    }
    if config.include_baseline_candidate {
        let z = greedy_round(&prog.objective, &vec![0.5; n])?;
        candidates.push(candidate(&prog, CandidateSource::Baseline, z)?);
    }

    let exact_bypass = n <= d;
    let mut per_eps = Vec::new();
    if exact_bypass {
        match exact_solve_program(&prog, config.exact_cap, config.execution) {
            Ok((z, _)) => candidates.push(candidate(&prog, CandidateSource::Exact, z)?),
            Err(Error::Infeasible) => {}
            Err(e) => return Err(e),
        }
    } else {
        let start: Vec<f64> = prediction.iter().map(|&b| f64::from(u8::from(b))).collect();
        let rows = map_ordered(config.execution, &grid, |&eps| {
            run_eps(&prog, prediction, &start, eps, &beta, d, config, backend)
        });
        for row in rows {
            let (record, cands) = row?;
            per_eps.push(record);
            candidates.extend(cands);
        }
    }

    let best =
        select(&candidates).ok_or_else(|| Error::Empty("no candidate assignments".into()))?;
    let chosen = &candidates[best];
    Ok(SolveReport {
        n,
        d,
        beta,
        strategy: config.strategy,
        num_constraints: prog.constraints.len(),
        exact_bypass,
        best_z: chosen.z.clone(),
        best_value: chosen.value.clone(),
        best_violation: chosen.violation.clone(),
        best_source: chosen.source,
        per_eps,
        candidates,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_eps(
    prog: &ConstrainedProgram,
    prediction: &[bool],
    start: &[f64],
    eps: usize,
    beta: &Rational,
    d: usize,
    config: &SolveConfig,
    backend: &dyn LpBackend,
) -> Result<(EpsRecord, Vec<Candidate>)> {
    let n = prog.n();
    let clock = Instant::now();
    let relax = build_constrained_relaxation(prog, prediction, eps, beta)?;
    let solution = backend.solve_from(&relax.model(), start);

    let rounding_bound = if n >= 2 {
        Some(rounding_error_bound(beta, n, d, &config.k)?)
    } else {
        None
    };
    let constraint_delta = if prog.constraints.is_empty() || n < 2 {
        None
    } else {
        Some(constraint_delta(beta, n, d, eps, &config.k)?)
    };
    let mut record = EpsRecord {
        eps,
        status: solution.status,
        lp_value: None,
        lp_iterations: solution.iterations,
        rounded_value: None,
        violation_max: None,
        outcomes: Vec::new(),
        gap_bound: gap_bound(beta, n, d, eps)?,
        rounding_bound,
        constraint_delta,
        wall_ms: 0.0,
    };
    if !solution.is_optimal() {
        warn!(
            "LP at eps = {eps} ended with status {:?}; skipping",
            solution.status
        );
        if config.record_timing {
            record.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        }
        return Ok((record, Vec::new()));
    }
    record.lp_value = Some(solution.objective_value);

    let draws: Vec<(Vec<bool>, Option<u64>)> = match config.strategy {
        Strategy::Greedy => vec![(greedy_round(&prog.objective, &solution.y)?, None)],
        Strategy::Randomized => (0..config.seeds_per_eps)
            .map(|r| {
                let seed = rounding_seed(config.seed, eps, r);
                Ok((randomized_round(&solution.y, seed)?, Some(seed)))
            })
            .collect::<Result<_>>()?,
    };
    let mut cands = Vec::with_capacity(draws.len());
    for (z, seed) in draws {
        let c = candidate(prog, CandidateSource::Rounded { eps, seed }, z)?;
        record.outcomes.push(RoundingOutcome {
            z: c.z.clone(),
            value: c.value.clone(),
            strategy: config.strategy,
            seed,
        });
        cands.push(c);
    }
    let best = &cands[select(&cands).expect("at least one draw")];
    record.rounded_value = Some(best.value.clone());
    record.violation_max = Some(if prog.constraints.is_empty() {
        Rational::zero()
    } else {
        best.violation.clone()
    });
    if config.record_timing {
        record.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    }
    Ok((record, cands))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::Graph;

    fn triangle() -> Instance {
        Instance::from_graph(
            "triangle",
            &Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap(),
        )
    }

    fn path3() -> Instance {
        Instance::from_graph("p3", &Graph::new(3, [(0, 1), (1, 2)]).unwrap())
    }

    fn quiet() -> SolveConfig {
        SolveConfig {
            record_timing: false,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn grid_values() {
        assert_eq!(EpsGrid::Full.values(3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(EpsGrid::Stride(2).values(5).unwrap(), vec![0, 2, 4]);
        assert_eq!(
            EpsGrid::Explicit(vec![5, 0, 5, 2]).values(5).unwrap(),
            vec![0, 2, 5]
        );
        assert!(EpsGrid::Explicit(vec![6]).values(5).is_err());
        assert!(EpsGrid::Stride(0).values(5).is_err());
    }

    #[test]
    fn path_with_perfect_prediction() {
        let r = solve(&path3(), &[false, true, false], &quiet()).unwrap();
        assert_eq!(r.best_value, int(2));
        assert_eq!(r.per_eps.len(), 4);
        assert_eq!(r.lp_solves(), 4);
    }

    #[test]
    fn prediction_floor() {
        let r = solve(&triangle(), &[true, true, false], &quiet()).unwrap();
        assert!(r.best_value >= int(2));
    }

    #[test]
    fn lp_values_grow_with_eps() {
        let r = solve(&triangle(), &[true, true, true], &quiet()).unwrap();
        let lp: Vec<f64> = r.per_eps.iter().map(|e| e.lp_value.unwrap()).collect();
        assert!(lp.windows(2).all(|w| w[1] >= w[0] - 1e-7), "{lp:?}");
        assert!(lp[3] >= 2.0 - 1e-7);
    }

    #[test]
    fn randomized_is_deterministic_and_records_seeds() {
        let cfg = SolveConfig {
            strategy: Strategy::Randomized,
            seed: 5,
            ..quiet()
        };
        let inst = Instance::from_graph("g", &crate::problems::gen_gnp(8, 0.5, 1).unwrap());
        let a = solve(&inst, &[false; 8], &cfg).unwrap();
        let b = solve(&inst, &[false; 8], &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.per_eps.iter().all(|e| e.outcomes.len() == 16));
    }

    #[test]
    fn parallel_and_sequential_reports_match() {
        let inst = Instance::from_graph("g", &crate::problems::gen_gnp(10, 0.4, 3).unwrap());
        let seq = SolveConfig {
            execution: Execution::Sequential,
            ..quiet()
        };
        let a = solve(&inst, &[true; 10], &seq).unwrap();
        let b = solve(&inst, &[true; 10], &quiet()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_instances_use_exhaustive_search() {
        let inst = Instance::from_graph("edge", &Graph::new(2, [(0, 1)]).unwrap());
        let r = solve(&inst, &[false, false], &quiet()).unwrap();
        assert!(r.exact_bypass);
        assert!(r.per_eps.is_empty());
        assert_eq!(r.best_value, int(1));
    }

    #[test]
    fn csv_has_one_row_per_eps() {
        let cfg = SolveConfig {
            eps_grid: EpsGrid::Explicit(vec![0, 2]),
            ..quiet()
        };
        let csv = solve(&triangle(), &[true, false, false], &cfg)
            .unwrap()
            .to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "eps,lp_value,rounded_value,violation_max,wall_ms,status"
        );
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,2,2,0,0.000,optimal"));
    }

    #[test]
    fn wrong_prediction_length() {
        assert!(matches!(
            solve(&triangle(), &[true], &quiet()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
