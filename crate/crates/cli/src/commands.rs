use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use smoothip::bits::{fmt_bits, parse_bits};
use smoothip::exact::{fmt_decimal15, parse_rational, to_f64, to_f64_down, Rational};
use smoothip::exec::map_ordered;
use smoothip::oracle::{
    empirical_prediction_error, erm_select, load_manifest, ComplementOracle, ErmProblem,
    ExactOracle, FlipCount, Oracle, PerturbOracle,
};
use smoothip::pipeline::{guarantee_bound, rounding_seed, solve, Instance, EXACT_CAP};
use smoothip::poly::decompose;
use smoothip::problems::{
    gen_gnp, gen_kcsp, gen_ksat, write_csp_json, write_dimacs_cnf, write_dimacs_graph,
};
use smoothip::Execution;

use crate::args::{ErmArgs, GenArgs, GenKind, SolveArgs, SweepArgs, VerifyArgs};
use crate::input::{
    execution, load_instance, optimum, parse_prediction, resolve_prediction, solve_config,
    write_output, BadInput,
};

/// Every LP in a solve failed (exit code 3).
#[derive(Debug)]
pub struct AllLpFailed;

impl std::fmt::Display for AllLpFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("the LP failed at every error budget")
    }
}

impl std::error::Error for AllLpFailed {}

pub fn gen(args: &GenArgs) -> Result<()> {
    let m = args.m.unwrap_or(4 * args.n);
    let text = match args.kind {
        GenKind::Maxcut => write_dimacs_graph(&gen_gnp(args.n, args.p, args.seed)?),
        GenKind::Maxksat => write_dimacs_cnf(&gen_ksat(args.n, m, args.k, args.seed)?),
        GenKind::Maxkcsp => write_csp_json(&gen_kcsp(args.n, m, args.k, args.seed)?),
    };
    write_output(args.out.as_deref(), &text)
}

pub fn solve_cmd(args: &SolveArgs, sequential: bool) -> Result<()> {
    let inst = load_instance(&args.instance, &args.input)?;
    let config = solve_config(&args.solver, sequential)?;
    let src = parse_prediction(&args.prediction).map_err(|e| anyhow::Error::new(BadInput(e)))?;
    let x_hat = resolve_prediction(&src, &inst, args.solver.seed, config.execution)?;
    let report = solve(&inst, &x_hat, &config)?;

    let json = report.to_json() + "\n";
    if let Some(p) = &args.csv {
        write_output(Some(p), &report.to_csv())?;
    }
    match &args.json {
        Some(p) => write_output(Some(p), &json)?,
        None if args.csv.is_none() => write_output(None, &json)?,
        None => {}
    }
    eprintln!(
        "{}: best_value = {} ({} LP solves, {} skipped), z = {}",
        inst.name,
        report.best_value,
        report.lp_solves(),
        report.skipped(),
        fmt_bits(&report.best_z)
    );
    if !report.per_eps.is_empty() && report.lp_solves() == 0 {
        return Err(AllLpFailed.into());
    }
    Ok(())
}

/// `x*` and `OPT` for a sweep: brute force when small enough, otherwise a
/// sibling `.sol` assignment with an optional `.opt` value.
fn reference(path: &Path, inst: &Instance, exec: Execution) -> Result<(Vec<bool>, Rational)> {
    if inst.n() <= EXACT_CAP {
        return optimum(inst, exec);
    }
    let sol = path.with_extension("sol");
    let text = fs::read_to_string(&sol).with_context(|| {
        format!(
            "{} exceeds the brute-force cap and {} is missing",
            inst.name,
            sol.display()
        )
    })?;
    let x = parse_bits(&text)?;
    if x.len() != inst.n() {
        bail!(
            "{} has length {}, expected {}",
            sol.display(),
            x.len(),
            inst.n()
        );
    }
    let opt_path = path.with_extension("opt");
    let opt = match fs::read_to_string(&opt_path) {
        Ok(t) => parse_rational(t.trim())
            .ok_or_else(|| anyhow!("bad value in {}", opt_path.display()))?,
        Err(_) => inst.objective().evaluate_bool(&x)?,
    };
    Ok((x, opt))
}

struct SweepRow {
    instance: String,
    eps: usize,
    trial: usize,
    achieved: Rational,
    opt: Rational,
    bound: Rational,
    lp_value: Option<f64>,
    lp_solves: usize,
    lp_rows: usize,
}

fn ratio(achieved: &Rational, opt: &Rational) -> f64 {
    if *opt == Rational::from_integer(0.into()) {
        1.0
    } else {
        to_f64(&(achieved / opt))
    }
}

pub fn sweep(args: &SweepArgs, sequential: bool) -> Result<()> {
    let config = solve_config(&args.solver, sequential)?;
    let exec = execution(sequential);
    let mut cells = Vec::new();
    let mut loaded = Vec::new();
    for (idx, path) in args.instances.iter().enumerate() {
        let inst = load_instance(path, &args.input)?;
        let (x_star, opt) = reference(path, &inst, exec)?;
        let n = inst.n();
        let eps_list: Vec<usize> = if args.eps == "all" {
            (0..=n).collect()
        } else {
            crate::input::parse_grid(&args.eps)
                .and_then(|g| Ok(g.values(n)?))
                .map_err(|e| anyhow::Error::new(BadInput(e)))?
        };
        for &eps in &eps_list {
            for trial in 0..args.trials {
                cells.push((idx, eps, trial));
            }
        }
        loaded.push((inst, x_star, opt));
    }

    let rows = map_ordered(exec, &cells, |&(idx, eps, trial)| -> Result<SweepRow> {
        let (inst, x_star, opt) = &loaded[idx];
        let seed = rounding_seed(rounding_seed(config.seed, idx, 0), eps, trial);
        let x_hat = smoothip::perturb(x_star, eps, seed)?.x_hat;
        let report = solve(inst, &x_hat, &config)?;
        let bound = guarantee_bound(
            opt,
            &report.beta,
            report.n,
            report.d.max(2),
            eps,
            config.strategy,
            &config.k,
        )?;
        Ok(SweepRow {
            instance: inst.name.clone(),
            eps,
            trial,
            lp_value: report
                .per_eps
                .iter()
                .find(|r| r.eps == eps)
                .and_then(|r| r.lp_value),
            lp_solves: report.lp_solves(),
            lp_rows: report.per_eps.len(),
            achieved: report.best_value,
            opt: opt.clone(),
            bound,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance", "eps", "trial", "achieved", "opt", "ratio", "bound", "lp_value",
    ])?;
    for r in &rows {
        w.write_record([
            r.instance.clone(),
            r.eps.to_string(),
            r.trial.to_string(),
            r.achieved.to_string(),
            r.opt.to_string(),
            fmt_decimal15(ratio(&r.achieved, &r.opt)),
            fmt_decimal15(to_f64_down(&r.bound)),
            r.lp_value.map(fmt_decimal15).unwrap_or_default(),
        ])?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    write_output(args.out.as_deref(), &text)?;
    if rows.iter().any(|r| r.lp_rows > 0) && rows.iter().all(|r| r.lp_solves == 0) {
        return Err(AllLpFailed.into());
    }
    Ok(())
}

/// Density label from the exponent `a = ln OPT / ln n`: dense when
/// `a >= d - 1/4`, near-dense when `a > d - 1/2`.
pub fn density_label(opt: f64, n: usize, d: usize) -> (&'static str, Option<f64>) {
    if n < 2 || opt <= 1.0 {
        return ("undetermined", None);
    }
    let a = opt.ln() / (n as f64).ln();
    let d = d as f64;
    let label = if a >= d - 0.25 {
        "dense"
    } else if a > d - 0.5 {
        "near-dense"
    } else {
        "sparse"
    };
    (label, Some(a))
}

pub fn verify(args: &VerifyArgs, sequential: bool) -> Result<()> {
    let inst = load_instance(&args.instance, &args.input)?;
    let p = inst.objective().multilinearize();
    let n = inst.n();
    let d = p.degree();
    let tree = decompose(&p)?;
    let mut out = String::new();
    writeln!(out, "instance: {}", inst.name)?;
    writeln!(
        out,
        "kind: {}",
        serde_json::to_value(inst.kind)?
            .as_str()
            .unwrap_or_default()
    )?;
    writeln!(out, "n: {n}")?;
    writeln!(out, "d: {d}")?;
    writeln!(out, "beta: {}", p.min_smoothness())?;
    writeln!(out, "monomials: {}", p.num_terms())?;
    writeln!(out, "tree_nodes: {}", tree.len())?;
    writeln!(out, "constraints: {}", inst.program.constraints.len())?;
    writeln!(out, "cost_ceiling: {}", inst.cost_ceiling)?;

    let opt = match &args.opt {
        Some(s) => Some((
            parse_rational(s).ok_or_else(|| anyhow!("bad --opt {s:?}"))?,
            "given",
        )),
        None if n <= EXACT_CAP => match optimum(&inst, execution(sequential)) {
            Ok((_, v)) => Some((v, "brute force")),
            Err(e) => {
                log::warn!("no optimum: {e:#}");
                None
            }
        },
        None => None,
    };
    match opt {
        Some((v, source)) => {
            writeln!(out, "opt: {v} ({source})")?;
            let (label, exponent) = density_label(to_f64(&v), n, d);
            match exponent {
                Some(a) => writeln!(
                    out,
                    "density: {label} (ln OPT / ln n = {}; dense at >= {}, near-dense above {})",
                    fmt_decimal15(a),
                    d as f64 - 0.25,
                    d as f64 - 0.5
                )?,
                None => writeln!(out, "density: {label}")?,
            }
        }
        None => writeln!(out, "opt: unknown\ndensity: undetermined")?,
    }
    print!("{out}");
    Ok(())
}

pub fn erm(args: &ErmArgs, sequential: bool) -> Result<()> {
    let config = solve_config(&args.solver, sequential)?;
    let training = args
        .instances
        .iter()
        .map(|p| load_instance(p, &args.input))
        .collect::<Result<Vec<_>>>()?;
    let exact = ExactOracle {
        cap: EXACT_CAP,
        execution: config.execution,
    };
    let candidates: Vec<Box<dyn Oracle>> = match &args.manifest {
        Some(m) => load_manifest(m)
            .map_err(|e| anyhow::Error::new(BadInput(e.into())))?
            .into_iter()
            .map(|o| Box::new(o) as Box<dyn Oracle>)
            .collect(),
        None => vec![
            Box::new(exact),
            Box::new(PerturbOracle {
                flips: FlipCount::Fraction { num: 1, den: 4 },
                seed: config.seed,
                exact,
            }),
            Box::new(ComplementOracle { exact }),
        ],
    };
    let prob = ErmProblem {
        candidates,
        training,
    };
    let result = erm_select(&prob, &config)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "candidate", "mean_cost", "mean_prediction_error"])?;
    for (id, cand) in prob.candidates.iter().enumerate() {
        let err = empirical_prediction_error(cand.as_ref(), &prob.training)
            .map(|e| e.to_string())
            .unwrap_or_default();
        w.write_record([
            id.to_string(),
            cand.name(),
            result.mean_costs[id].to_string(),
            err,
        ])?;
    }
    print!(
        "{}",
        String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?
    );
    println!("selected: {} ({})", result.best, result.best_name);
    Ok(())
}
