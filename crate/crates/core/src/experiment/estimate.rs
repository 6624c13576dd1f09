//! Monte-Carlo estimate of the smallest sample size that meets a goal.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::experiment::learner::Learner;
use crate::experiment::scenario::TaskSpec;
use crate::rng;
use crate::stat_model::{sample, DiscreteDistribution};

const WILSON_Z: f64 = 1.959_963_984_540_054;
const MAX_TRIALS: usize = 1 << 20;
const MAX_FAMILY: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every enumerated distribution must pass on its own.
    Adversarial,
    /// A fresh distribution from the family generator per trial.
    Generator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Stop after the first passing grid point.
    pub early_stop: bool,
    /// Random marginals per source in adversarial mode for
    /// distribution-free tasks.
    pub random_marginals: usize,
    /// Largest number of source members enumerated in adversarial mode.
    pub source_cap: usize,
}

impl EstimateOptions {
    pub fn new(grid: Vec<usize>, trials: usize, seed: u64, mode: Mode) -> Self {
        EstimateOptions {
            grid,
            trials,
            seed,
            mode,
            early_stop: false,
            random_marginals: 16,
            source_cap: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub trials: usize,
    /// In adversarial mode, the count of the worst distribution.
    pub successes: usize,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst: Option<usize>,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub points: Vec<GridPoint>,
    pub n_star: Option<usize>,
    /// Successes needed at each grid point: ⌈(1−δ)T⌉.
    pub required: usize,
    pub seed: u64,
    pub mode: Mode,
    pub family_size: usize,
    /// Grid values whose rate fell more than two standard errors below
    /// the previous one.
    pub monotonicity_flags: Vec<usize>,
    pub millis: u64,
}

/// 95% Wilson score interval for k successes in t trials.
pub fn wilson(k: usize, t: usize) -> (f64, f64) {
    if t == 0 {
        return (0.0, 1.0);
    }
    let (k, t) = (k as f64, t as f64);
    let p = k / t;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn required_successes(delta: f64, trials: usize) -> usize {
    (((1.0 - delta) * trials as f64) - 1e-9).ceil().max(0.0) as usize
}

fn stream_id(grid: usize, family: usize, trial: usize) -> u64 {
    ((grid as u64) << 40) | ((family as u64) << 20) | trial as u64
}

fn trial(
    spec: &TaskSpec,
    learner: &Learner,
    mu: Option<&DiscreteDistribution>,
    n: usize,
    seed: u64,
    id: u64,
) -> Result<bool> {
    let mut r = rng::stream(seed, id);
    let drawn;
    let mu = match mu {
        Some(m) => m,
        None => {
            drawn = spec.draw(&mut r)?;
            &drawn
        }
    };
    let data = sample(mu, n, &mut r);
    let f = learner.learn(&data, &mut r)?;
    Ok(spec.goal(&f, mu)?.pass)
}

/// Runs T seeded trials at each grid size. n* is the first grid size with
/// at least ⌈(1−δ)T⌉ successes, for every enumerated distribution in
/// adversarial mode.
pub fn estimate_sample_complexity(
    spec: &TaskSpec,
    learner: &Learner,
    opts: &EstimateOptions,
) -> Result<EstimateReport> {
    if opts.grid.is_empty() {
        return invalid("sample-size grid is empty");
    }
    if opts.grid.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("sample-size grid must be strictly increasing");
    }
    if opts.trials == 0 || opts.trials > MAX_TRIALS {
        return invalid(format!("trials must lie in 1..={MAX_TRIALS}"));
    }
    let start = Instant::now();
    let family = match opts.mode {
        Mode::Adversarial => {
            let mut r = rng::stream(opts.seed, u64::MAX);
            let f = spec.enumerate(opts.random_marginals, opts.source_cap, &mut r)?;
            if f.len() > MAX_FAMILY {
                return invalid(format!("family of {} distributions is too large", f.len()));
            }
            f
        }
        Mode::Generator => Vec::new(),
    };
    let required = required_successes(spec.delta, opts.trials);
    let mut points = Vec::new();
    for (gi, &n) in opts.grid.iter().enumerate() {
        let t0 = Instant::now();
        let (successes, worst) = match opts.mode {
            Mode::Generator => {
                let wins: Vec<bool> = (0..opts.trials)
                    .into_par_iter()
                    .map(|t| trial(spec, learner, None, n, opts.seed, stream_id(gi, 0, t)))
                    .collect::<Result<_>>()?;
                (wins.iter().filter(|&&w| w).count(), None)
            }
            Mode::Adversarial => {
                let counts: Vec<usize> = family
                    .par_iter()
                    .enumerate()
                    .map(|(fi, mu)| {
                        let mut k = 0;
                        for t in 0..opts.trials {
                            k += trial(spec, learner, Some(mu), n, opts.seed, stream_id(gi, fi, t))?
                                as usize;
                        }
                        Ok(k)
                    })
                    .collect::<Result<_>>()?;
                let (fi, &k) = counts
                    .iter()
                    .enumerate()
                    .min_by_key(|&(i, &k)| (k, i))
                    .expect("family is nonempty");
                (k, Some(fi))
            }
        };
        let (lo, hi) = wilson(successes, opts.trials);
        let pass = successes >= required;
        points.push(GridPoint {
            n,
            trials: opts.trials,
            successes,
            rate: successes as f64 / opts.trials as f64,
            wilson_lo: lo,
            wilson_hi: hi,
            pass,
            worst,
            millis: t0.elapsed().as_millis() as u64,
        });
        if pass && opts.early_stop {
            break;
        }
    }
    let n_star = points.iter().find(|p| p.pass).map(|p| p.n);
    let monotonicity_flags = points
        .windows(2)
        .filter(|w| {
            let se = |p: &GridPoint| (p.rate * (1.0 - p.rate) / p.trials as f64).sqrt();
            w[0].rate - w[1].rate > 2.0 * (se(&w[0]).powi(2) + se(&w[1]).powi(2)).sqrt()
        })
        .map(|w| w[1].n)
        .collect();
    Ok(EstimateReport {
        points,
        n_star,
        required,
        seed: opts.seed,
        mode: opts.mode,
        family_size: family.len(),
        monotonicity_flags,
        millis: start.elapsed().as_millis() as u64,
    })
}
