//! Config-driven experiment runs with CSV, JSON and plot-data output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::experiment::estimate::{
    estimate_sample_complexity, EstimateOptions, EstimateReport, Mode,
};
use crate::experiment::learner::{default_learner, Learner, LearnerKind};
use crate::experiment::scenario::{scenario, Direction, ScenarioName, TaskKind};

pub const REFERENCE_SUITE: &str = include_str!("../../configs/reference-suite.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<usize>),
    Range { from: usize, to: usize, step: usize },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<usize>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Range { from, to, step } => {
                if *step == 0 || from > to {
                    return invalid("grid range needs step > 0 and from ≤ to");
                }
                Ok((*from..=*to).step_by(*step).collect())
            }
        }
    }
}

fn default_random_marginals() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioName,
    pub m: Vec<usize>,
    pub direction: Direction,
    #[serde(default)]
    pub learner: Option<String>,
    pub grid: GridSpec,
    pub trials: usize,
    pub eps: f64,
    pub delta: f64,
    pub mode: Mode,
    #[serde(default)]
    pub early_stop: bool,
    #[serde(default = "default_random_marginals")]
    pub random_marginals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Record wall-clock milliseconds; replays are byte-identical only
    /// when this is off.
    #[serde(default)]
    pub timing: bool,
    pub runs: Vec<RunConfig>,
}

/// Parses and validates a config, reporting the line and column of
/// schema violations.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
    if cfg.runs.is_empty() {
        return invalid("config: runs must not be empty");
    }
    for (i, r) in cfg.runs.iter().enumerate() {
        let field = |f: &str, msg: &str| Error::Invalid(format!("config: runs[{i}].{f}: {msg}"));
        if r.m.is_empty() {
            return Err(field("m", "needs at least one size"));
        }
        if r.trials == 0 {
            return Err(field("trials", "must be positive"));
        }
        if !(r.eps >= 0.0) {
            return Err(field("eps", "must be nonnegative"));
        }
        if !(0.0..1.0).contains(&r.delta) {
            return Err(field("delta", "must lie in [0,1)"));
        }
        let grid = r.grid.values().map_err(|e| field("grid", &e.to_string()))?;
        if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(field("grid", "must be nonempty and strictly increasing"));
        }
        if let Some(l) = &r.learner {
            l.parse::<LearnerKind>()
                .map_err(|e| field("learner", &e.to_string()))?;
        }
    }
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: ScenarioName,
    pub direction: Direction,
    pub m: usize,
    pub task: TaskKind,
    pub learner: String,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    pub report: EstimateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub toolkit_version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub runs: Vec<RunSummary>,
}

/// Output files of one experiment, relative to the output directory.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub summary: Summary,
    pub files: Vec<(PathBuf, String)>,
}

/// Per-run seed derived from the config seed, run index and size.
pub fn run_seed(seed: u64, run: usize, m: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((run as u64).to_le_bytes());
    h.update((m as u64).to_le_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("digest has 8 bytes"))
}

/// Runs every configured estimate and renders the output files in memory.
/// All tasks and learners are built before any estimate runs.
pub fn build_bundle(text: &str) -> Result<Bundle> {
    let cfg = parse_config(text)?;
    let mut jobs = Vec::new();
    for (ri, r) in cfg.runs.iter().enumerate() {
        let kind = match &r.learner {
            Some(l) => l.parse()?,
            None => default_learner(r.scenario, r.direction),
        };
        for &m in &r.m {
            let spec = scenario(r.scenario, m, r.direction, r.eps, r.delta)?;
            let learner = Learner::new(&kind, &spec)?;
            let mut opts = EstimateOptions::new(
                r.grid.values()?,
                r.trials,
                run_seed(cfg.seed, ri, m),
                r.mode,
            );
            opts.early_stop = r.early_stop;
            opts.random_marginals = r.random_marginals;
            jobs.push((r, m, spec, learner, opts));
        }
    }
    let mut runs = Vec::new();
    for (r, m, spec, learner, opts) in jobs {
        let report = estimate_sample_complexity(&spec, &learner, &opts)?;
        runs.push(RunSummary {
            scenario: r.scenario,
            direction: r.direction,
            m,
            task: spec.task,
            learner: learner.kind().to_string(),
            eps: r.eps,
            delta: r.delta,
            seed: opts.seed,
            report,
        });
    }
    if !cfg.timing {
        for run in &mut runs {
            run.report.millis = 0;
            run.report.points.iter_mut().for_each(|p| p.millis = 0);
        }
    }
    let summary = Summary {
        name: cfg.name.clone(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        seed: cfg.seed,
        runs,
    };
    let files = render(&summary)?;
    Ok(Bundle { summary, files })
}

fn render(summary: &Summary) -> Result<Vec<(PathBuf, String)>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "direction",
        "m",
        "n",
        "trials",
        "successes",
        "wilson_lo",
        "wilson_hi",
        "seed",
        "millis",
    ])?;
    for run in &summary.runs {
        for p in &run.report.points {
            w.write_record([
                run.scenario.to_string(),
                run.direction.to_string(),
                run.m.to_string(),
                p.n.to_string(),
                p.trials.to_string(),
                p.successes.to_string(),
                format!("{:.6}", p.wilson_lo),
                format!("{:.6}", p.wilson_hi),
                run.seed.to_string(),
                p.millis.to_string(),
            ])?;
        }
    }
    let csv_text = String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?)
        .expect("csv output is utf-8");
    let mut files = vec![
        (PathBuf::from("results.csv"), csv_text),
        (
            PathBuf::from("summary.json"),
            serde_json::to_string_pretty(summary)? + "\n",
        ),
    ];
    let mut nstar: Vec<(String, String)> = Vec::new();
    for run in &summary.runs {
        let key = format!("{}-{}", run.scenario, run.direction);
        let mut dat = format!(
            "# {key} m={} learner={}\n# n rate wilson_lo wilson_hi\n",
            run.m, run.learner
        );
        for p in &run.report.points {
            dat.push_str(&format!(
                "{} {:.6} {:.6} {:.6}\n",
                p.n, p.rate, p.wilson_lo, p.wilson_hi
            ));
        }
        files.push((PathBuf::from(format!("curves/{key}-m{}.dat", run.m)), dat));
        let line = match run.report.n_star {
            Some(n) => format!("{} {n}\n", run.m),
            None => format!("{} NaN\n", run.m),
        };
        match nstar.iter_mut().find(|(k, _)| *k == key) {
            Some((_, body)) => body.push_str(&line),
            None => nstar.push((key, format!("# m n_star\n{line}"))),
        }
    }
    files.extend(
        nstar
            .into_iter()
            .map(|(k, body)| (PathBuf::from(format!("curves/{k}-nstar.dat")), body)),
    );
    Ok(files)
}

/// Runs the config and writes the bundle under `out`. Nothing is written
/// unless every run succeeds.
pub fn run_experiment(text: &str, out: &Path) -> Result<Summary> {
    let bundle = build_bundle(text)?;
    for (rel, body) in &bundle.files {
        let path = out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, body)?;
    }
    Ok(bundle.summary)
}
