//! Reading instances, predictions and solver flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use smoothip::exact::{parse_rational, Rational};
use smoothip::oracle::{perturb, read_prediction};
use smoothip::pipeline::{exact_solve_program, EpsGrid, Instance, SolveConfig, EXACT_CAP};
use smoothip::problems::{parse_csp_json, parse_dimacs_cnf, parse_dimacs_graph};
use smoothip::relax::PolyConstraint;
use smoothip::{Execution, Polynomial, Strategy};

use crate::args::{InputKind, InstanceArgs, SolverArgs, StrategyArg};

/// Marks an error as an input problem (exit code 2).
#[derive(Debug)]
pub struct BadInput(pub anyhow::Error);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for BadInput {}

fn bad(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(BadInput(e))
}

/// Guesses the format from the first meaningful line.
pub fn detect_kind(text: &str) -> InputKind {
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
            continue;
        }
        if line.starts_with('{') {
            return InputKind::Maxkcsp;
        }
        let toks: Vec<&str> = line.split_whitespace().take(2).collect();
        return match toks.as_slice() {
            ["p", "edge" | "col"] => InputKind::Maxcut,
            ["p", "cnf"] => InputKind::Maxksat,
            _ => InputKind::Poly,
        };
    }
    InputKind::Poly
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn parse_bound(s: &str) -> Result<Rational> {
    parse_rational(s.trim()).ok_or_else(|| anyhow!("bad bound {s:?}"))
}

fn load_constraint(spec: &str, n: usize) -> Result<PolyConstraint> {
    let parts: Vec<&str> = spec.rsplitn(3, ',').collect();
    let [upper, lower, path] = parts.as_slice() else {
        bail!("constraint must be PATH,L,U, got {spec:?}");
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let poly = Polynomial::from_text(&text).with_context(|| format!("parsing {path}"))?;
    if poly.n() > n {
        bail!(
            "constraint {path} has {} variables, instance has {n}",
            poly.n()
        );
    }
    let poly = if poly.n() < n {
        let terms: Vec<(Vec<usize>, Rational)> =
            poly.terms().map(|(v, c)| (v.to_vec(), c.clone())).collect();
        Polynomial::from_terms(n, terms)?.with_degree(poly.degree())?
    } else {
        poly
    };
    Ok(PolyConstraint::new(
        poly,
        parse_bound(lower)?,
        parse_bound(upper)?,
    )?)
}

fn load_unconstrained(path: &Path, kind: Option<InputKind>) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = instance_name(path);
    let inst = match kind.unwrap_or_else(|| detect_kind(&text)) {
        InputKind::Maxcut => Instance::from_graph(name, &parse_dimacs_graph(&text)?),
        InputKind::Maxksat => Instance::from_cnf(name, &parse_dimacs_cnf(&text)?)?,
        InputKind::Maxkcsp => Instance::from_csp(name, &parse_csp_json(&text)?),
        InputKind::Poly => Instance::from_polynomial(name, Polynomial::from_text(&text)?),
    };
    Ok(inst)
}

/// Loads an instance and attaches any `--constraint` flags. All failures
/// here count as input errors.
pub fn load_instance(path: &Path, args: &InstanceArgs) -> Result<Instance> {
    let inner = || -> Result<Instance> {
        let inst = load_unconstrained(path, args.kind)
            .with_context(|| format!("loading {}", path.display()))?;
        if args.constraints.is_empty() {
            return Ok(inst);
        }
        let n = inst.n();
        let cons = args
            .constraints
            .iter()
            .map(|s| load_constraint(s, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(inst.with_constraints(cons)?)
    };
    inner().map_err(bad)
}

pub fn parse_grid(spec: &str) -> Result<EpsGrid> {
    let spec = spec.trim();
    if spec == "full" {
        return Ok(EpsGrid::Full);
    }
    if let Some(s) = spec.strip_prefix("stride:") {
        return Ok(EpsGrid::Stride(s.parse().context("bad stride")?));
    }
    let values = spec
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("bad grid value {v:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EpsGrid::Explicit(values))
}

pub fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

pub fn solve_config(args: &SolverArgs, sequential: bool) -> Result<SolveConfig> {
    let k = parse_rational(&args.k).ok_or_else(|| anyhow!("bad --k {:?}", args.k))?;
    Ok(SolveConfig {
        strategy: match args.strategy {
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::Randomized => Strategy::Randomized,
        },
        seed: args.seed,
        eps_grid: parse_grid(&args.grid).map_err(bad)?,
        k,
        execution: execution(sequential),
        record_timing: !args.no_timing,
        ..SolveConfig::default()
    })
}

pub enum PredictionSource {
    Exact,
    Perturb(usize),
    File(PathBuf),
}

pub fn parse_prediction(spec: &str) -> Result<PredictionSource> {
    if spec == "exact" {
        return Ok(PredictionSource::Exact);
    }
    if let Some(e) = spec.strip_prefix("perturb:") {
        return Ok(PredictionSource::Perturb(
            e.parse().context("bad perturb count")?,
        ));
    }
    Ok(PredictionSource::File(PathBuf::from(
        spec.strip_prefix("file:").unwrap_or(spec),
    )))
}

pub fn optimum(inst: &Instance, exec: Execution) -> Result<(Vec<bool>, Rational)> {
    exact_solve_program(&inst.program, EXACT_CAP, exec)
        .with_context(|| format!("brute force on {}", inst.name))
}

pub fn resolve_prediction(
    src: &PredictionSource,
    inst: &Instance,
    seed: u64,
    exec: Execution,
) -> Result<Vec<bool>> {
    match src {
        PredictionSource::Exact => Ok(optimum(inst, exec)?.0),
        PredictionSource::Perturb(e) => Ok(perturb(&optimum(inst, exec)?.0, *e, seed)?.x_hat),
        PredictionSource::File(p) => Ok(read_prediction(p, inst.n())
            .with_context(|| format!("reading prediction {}", p.display()))
            .map_err(bad)?
            .x_hat),
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_from_content() {
        assert_eq!(detect_kind("c hi\np edge 3 1\ne 1 2\n"), InputKind::Maxcut);
        assert_eq!(detect_kind("p cnf 2 1\n1 -2 0\n"), InputKind::Maxksat);
        assert_eq!(detect_kind("  {\"n\": 2}"), InputKind::Maxkcsp);
        assert_eq!(detect_kind("# n 2 d 2\n1/1 0 1\n"), InputKind::Poly);
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("full").unwrap(), EpsGrid::Full);
        assert_eq!(parse_grid("stride:3").unwrap(), EpsGrid::Stride(3));
        assert_eq!(
            parse_grid("0, 5,10").unwrap(),
            EpsGrid::Explicit(vec![0, 5, 10])
        );
        assert!(parse_grid("a,b").is_err());
    }
}
