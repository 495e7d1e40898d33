//! Sources of predictions `x̂` and empirical selection among them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{fmt_bits, hamming, parse_bits, serde_bits};
use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::exec::{map_ordered, Execution};
use crate::pipeline::{
    exact_solve_program, rounding_seed, solve, Instance, SolveConfig, EXACT_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Complement,
    Perturbed { eps: usize },
    File { path: String },
    Erm { candidate: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    #[serde(with = "serde_bits")]
    pub x_hat: Vec<bool>,
    pub provenance: Provenance,
}

impl Prediction {
    pub fn n(&self) -> usize {
        self.x_hat.len()
    }
}

/// Flips exactly `eps` coordinates of `x_star`, chosen uniformly without
/// replacement from a ChaCha8 stream seeded by `seed`.
pub fn perturb(x_star: &[bool], eps: usize, seed: u64) -> Result<Prediction> {
    let n = x_star.len();
    if eps > n {
        return Err(Error::OutOfRange(format!("eps = {eps} exceeds n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x_hat = x_star.to_vec();
    for i in sample(&mut rng, n, eps) {
        x_hat[i] = !x_hat[i];
    }
    Ok(Prediction {
        x_hat,
        provenance: Provenance::Perturbed { eps },
    })
}

/// A prediction function. `index` is the instance's position in the batch
/// being evaluated and may be used to derive per-instance randomness.
pub trait Oracle: Sync {
    fn name(&self) -> String;
    fn predict(&self, index: usize, instance: &Instance) -> Result<Prediction>;
}

/// Brute-force optimum, lexicographically smallest among ties.
#[derive(Debug, Clone, Copy)]
pub struct ExactOracle {
    pub cap: usize,
    pub execution: Execution,
}

impl Default for ExactOracle {
    fn default() -> Self {
        ExactOracle {
            cap: EXACT_CAP,
            execution: Execution::default(),
        }
    }
}

fn optimum(instance: &Instance, cap: usize, exec: Execution) -> Result<Vec<bool>> {
    Ok(exact_solve_program(&instance.program, cap, exec)?.0)
}

impl Oracle for ExactOracle {
    fn name(&self) -> String {
        "exact".into()
    }

    fn predict(&self, _: usize, instance: &Instance) -> Result<Prediction> {
        Ok(Prediction {
            x_hat: optimum(instance, self.cap, self.execution)?,
            provenance: Provenance::Exact,
        })
    }
}

/// Bitwise complement of the exact oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplementOracle {
    pub exact: ExactOracle,
}

impl Oracle for ComplementOracle {
    fn name(&self) -> String {
        "complement".into()
    }

    fn predict(&self, _: usize, instance: &Instance) -> Result<Prediction> {
        let x = optimum(instance, self.exact.cap, self.exact.execution)?;
        Ok(Prediction {
            x_hat: x.into_iter().map(|b| !b).collect(),
            provenance: Provenance::Complement,
        })
    }
}

/// How many coordinates a [`PerturbOracle`] flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipCount {
    Fixed(usize),
    /// `⌊n · num / den⌋`
    Fraction {
        num: usize,
        den: usize,
    },
}

impl FlipCount {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            FlipCount::Fixed(e) => Ok(e),
            FlipCount::Fraction { den: 0, .. } => {
                Err(Error::InvalidParameter("zero denominator".into()))
            }
            FlipCount::Fraction { num, den } => Ok(n * num / den),
        }
    }
}

/// The exact optimum with a controlled number of flips.
#[derive(Debug, Clone, Copy)]
pub struct PerturbOracle {
    pub flips: FlipCount,
    pub seed: u64,
    pub exact: ExactOracle,
}

impl PerturbOracle {
    pub fn new(flips: FlipCount, seed: u64) -> Self {
        PerturbOracle {
            flips,
            seed,
            exact: ExactOracle::default(),
        }
    }
}

impl Oracle for PerturbOracle {
    fn name(&self) -> String {
        match self.flips {
            FlipCount::Fixed(e) => format!("perturb:{e}"),
            FlipCount::Fraction { num, den } => format!("perturb:{num}n/{den}"),
        }
    }

    fn predict(&self, index: usize, instance: &Instance) -> Result<Prediction> {
        let x = optimum(instance, self.exact.cap, self.exact.execution)?;
        let eps = self.flips.resolve(x.len())?;
        perturb(&x, eps, rounding_seed(self.seed, index, 0))
    }
}

/// Predictions read from files, keyed by instance name.
#[derive(Debug, Clone, Default)]
pub struct FileOracle {
    pub label: String,
    pub files: BTreeMap<String, PathBuf>,
}

impl Oracle for FileOracle {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn predict(&self, _: usize, instance: &Instance) -> Result<Prediction> {
        let path = self.files.get(&instance.name).ok_or_else(|| {
            Error::InvalidParameter(format!("no prediction for instance {:?}", instance.name))
        })?;
        read_prediction(path, instance.n())
    }
}

/// Reads a single line of `0`/`1` characters of length `n`.
pub fn read_prediction(path: &Path, n: usize) -> Result<Prediction> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let line = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty prediction file"))?;
    if lines.next().is_some() {
        return Err(Error::parse(2, "prediction file has more than one line"));
    }
    let x_hat = parse_bits(line)?;
    if x_hat.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x_hat.len(),
        });
    }
    Ok(Prediction {
        x_hat,
        provenance: Provenance::File {
            path: path.display().to_string(),
        },
    })
}

pub fn write_prediction(path: &Path, x_hat: &[bool]) -> Result<()> {
    std::fs::write(path, fmt_bits(x_hat) + "\n")?;
    Ok(())
}

/// Loads a candidate manifest: a JSON list whose entries map instance ids to
/// prediction files. Relative paths resolve against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<FileOracle>> {
    let text = std::fs::read_to_string(path)?;
    let raw: Vec<BTreeMap<String, PathBuf>> =
        serde_json::from_str(&text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(i, files)| FileOracle {
            label: format!("file:{i}"),
            files: files.into_iter().map(|(k, p)| (k, base.join(p))).collect(),
        })
        .collect())
}

pub struct ErmProblem {
    pub candidates: Vec<Box<dyn Oracle>>,
    /// Each instance carries its own cost ceiling `H`.
    pub training: Vec<Instance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErmResult {
    pub best: usize,
    pub best_name: String,
    /// Mean `H - achieved` per candidate.
    pub mean_costs: Vec<Rational>,
    /// Achieved value per candidate and training instance.
    pub achieved: Vec<Vec<Rational>>,
}

impl ErmResult {
    pub fn best_cost(&self) -> &Rational {
        &self.mean_costs[self.best]
    }
}

/// Runs the pipeline for every (candidate, instance) cell and returns the
/// candidate with the lowest mean cost `H - p(z)`. Ties go to the lowest id.
pub fn erm_select(prob: &ErmProblem, config: &SolveConfig) -> Result<ErmResult> {
    if prob.candidates.is_empty() {
        return Err(Error::Empty("no candidate oracles".into()));
    }
    if prob.training.is_empty() {
        return Err(Error::Empty("no training instances".into()));
    }
    let m = prob.training.len();
    let cells: Vec<(usize, usize)> = (0..prob.candidates.len())
        .flat_map(|c| (0..m).map(move |i| (c, i)))
        .collect();
    let values = map_ordered(config.execution, &cells, |&(c, i)| {
        let inst = &prob.training[i];
        let pred = prob.candidates[c].predict(i, inst)?;
        Ok(solve(inst, &pred.x_hat, config)?.best_value)
    });
    let values = values.into_iter().collect::<Result<Vec<Rational>>>()?;
    let achieved: Vec<Vec<Rational>> = values.chunks(m).map(|row| row.to_vec()).collect();
    let mean_costs: Vec<Rational> = achieved
        .iter()
        .map(|row| {
            let total = row
                .iter()
                .zip(&prob.training)
                .fold(Rational::zero(), |acc, (v, inst)| {
                    acc + &inst.cost_ceiling - v
                });
            total / int(m as i64)
        })
        .collect();
    let best = (0..mean_costs.len())
        .min_by(|&a, &b| mean_costs[a].cmp(&mean_costs[b]).then(a.cmp(&b)))
        .expect("non-empty");
    Ok(ErmResult {
        best,
        best_name: prob.candidates[best].name(),
        mean_costs,
        achieved,
    })
}

/// Mean Hamming distance between the candidate's predictions and the
/// lexicographically smallest brute-force optimum of each instance.
pub fn empirical_prediction_error(
    candidate: &dyn Oracle,
    instances: &[Instance],
) -> Result<Rational> {
    if instances.is_empty() {
        return Err(Error::Empty("no instances".into()));
    }
    let mut total = 0usize;
    for (i, inst) in instances.iter().enumerate() {
        let x_star = optimum(inst, EXACT_CAP, Execution::default())?;
        let pred = candidate.predict(i, inst)?;
        if pred.n() != x_star.len() {
            return Err(Error::DimensionMismatch {
                expected: x_star.len(),
                got: pred.n(),
            });
        }
        total += hamming(&pred.x_hat, &x_star);
    }
    Ok(Rational::new(total.into(), instances.len().into()))
}
