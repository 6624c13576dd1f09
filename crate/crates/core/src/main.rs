use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use comparative::dimensions::{
    covering_exact, covering_upper, fat, ldim, mutual_fat, mutual_fat2, mutual_ldim, mutual_vc,
    packing_number, vc, DimensionResult, MistakeTree, COVERING_EXACT_MAX,
};
use comparative::domain::{BinClass, IntervalPartition, Labeling, RealClass};
use comparative::experiment::{
    default_learner, estimate_sample_complexity, run_experiment, scenario, Direction,
    EstimateOptions, Learner, LearnerKind, Marginal, Mode, ScenarioName, REFERENCE_SUITE,
};
use comparative::io::{self, ModelFile, ModelKind};
use comparative::offline::{
    boost, comparative_learn, corm_general, dcorm_real, ma_mc_learn, omnipredict, BoostParams,
    CormParams, DcormParams, ExactWeakOracle, LossFunction, MamcParams, OmniParams,
};
use comparative::online::{
    comp_online, run_sequence, LabeledSequence, OnlineLearner, OnlineRun, Rwm, Soa, TreeAdversary,
};
use comparative::stat_model::{self, DiscreteDistribution, DistributionFile};
use comparative::{rng, Error};

#[derive(Parser)]
#[command(name = "comparative", version, about = "Comparative learning toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimensions of one class, or mutual dimensions of a pair.
    Dims(DimsArgs),
    /// Evaluate error functionals of a model exactly.
    Eval(EvalArgs),
    /// Train an offline learner on a dataset.
    Learn(LearnArgs),
    /// Play an online learner against an adversary.
    Online(OnlineArgs),
    /// Estimate the sample complexity of one scenario.
    Estimate(EstimateArgs),
    /// Describe a scenario and optionally write its classes.
    Scenario(ScenarioArgs),
    /// Run an experiment config.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct DimsArgs {
    /// Class JSON.
    #[arg(long)]
    source: PathBuf,
    /// Second class JSON for mutual dimensions.
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Fat-shattering margin.
    #[arg(long, conflicts_with_all = ["margins", "ldim", "packing"])]
    margin: Option<f64>,
    /// Two margins η1,η2 for the mutual fat-shattering dimension.
    #[arg(long, value_delimiter = ',', num_args = 2, requires = "benchmark")]
    margins: Option<Vec<f64>>,
    /// Littlestone dimension instead of VC.
    #[arg(long, conflicts_with_all = ["margins", "packing"])]
    ldim: bool,
    /// Dual packing and covering numbers at this scale.
    #[arg(long, requires = "benchmark")]
    packing: Option<f64>,
    /// Marginal over X as a JSON array; uniform when absent.
    #[arg(long)]
    marginal: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    /// Benchmark class for class-relative functionals.
    #[arg(long)]
    class: Option<PathBuf>,
    /// Partition size for the Λ-versions of MC and calibration error.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Task {
    Comp,
    Dcorm,
    Corm,
    Mamc,
    Boost,
    Omni,
}

#[derive(clap::Args)]
struct LearnArgs {
    #[arg(long, value_enum)]
    task: Task,
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    benchmark: PathBuf,
    /// Task parameters as JSON.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Dataset CSV with columns x_index,y.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OnlineKind {
    Soa,
    Rwm,
    Comp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Adversary {
    Tree,
    Replay,
}

#[derive(clap::Args)]
struct OnlineArgs {
    #[arg(long, value_enum)]
    learner: OnlineKind,
    #[arg(long, value_enum)]
    adversary: Adversary,
    #[arg(long)]
    source: PathBuf,
    /// Benchmark class; the source class when absent.
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Mistake tree JSON, either a tree or a dimension result carrying one.
    /// Defaults to the witness of the (mutual) Littlestone dimension.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Labeled sequence CSV for the replay adversary.
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Truncate the game to this many rounds.
    #[arg(long)]
    rounds: Option<usize>,
    /// Directory for report.json and rounds.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ScenarioSel {
    #[arg(long)]
    scenario: ScenarioName,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "forward")]
    direction: Direction,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
}

#[derive(clap::Args)]
struct EstimateArgs {
    #[command(flatten)]
    sel: ScenarioSel,
    /// Learner name; the scenario default when absent.
    #[arg(long)]
    learner: Option<LearnerKind>,
    /// Comma-separated sizes or from:to:step.
    #[arg(long, default_value = "0")]
    grid: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "generator")]
    mode: ModeArg,
    #[arg(long)]
    early_stop: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Adversarial,
    Generator,
}

#[derive(clap::Args)]
struct ScenarioArgs {
    #[command(flatten)]
    sel: ScenarioSel,
    /// Write source.json and benchmark.json here.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Config JSON.
    #[arg(required_unless_present = "reference_suite")]
    config: Option<PathBuf>,
    /// Run the bundled suite instead of a file.
    #[arg(long, conflicts_with = "config")]
    reference_suite: bool,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn bin_class(path: &Path) -> anyhow::Result<BinClass> {
    io::parse_bin_class(&read(path)?).with_context(|| format!("class {}", path.display()))
}

fn real_class(path: &Path) -> anyhow::Result<RealClass> {
    io::parse_real_class(&read(path)?).with_context(|| format!("class {}", path.display()))
}

fn print_json(v: &impl serde::Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(std::io::stdout(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn dim_json(key: &str, r: &DimensionResult) -> Value {
    let mut m = Map::new();
    m.insert(key.into(), json!(r.value));
    m.insert("witness".into(), json!(r.witness));
    if !r.references.is_empty() {
        m.insert("references".into(), json!(r.references));
    }
    if let Some(t) = &r.tree {
        m.insert("tree".into(), json!(t));
    }
    Value::Object(m)
}

fn dims(a: DimsArgs) -> anyhow::Result<()> {
    let out = if let Some(eps) = a.packing {
        let s = real_class(&a.source)?;
        let b = real_class(a.benchmark.as_deref().expect("clap requires benchmark"))?;
        let mu_x = match &a.marginal {
            Some(p) => serde_json::from_str(&read(p)?)?,
            None => vec![1.0 / s.n() as f64; s.n()],
        };
        let m = packing_number(&s, &b, &mu_x, eps)?;
        let n_up = covering_upper(&s, &b, &mu_x, eps)?;
        let mut v = json!({"packing": m, "covering_upper": n_up});
        if s.len() <= COVERING_EXACT_MAX {
            v["covering"] = json!(covering_exact(&s, &b, &mu_x, eps)?);
        }
        v
    } else if let Some(m) = a.margins {
        let s = real_class(&a.source)?;
        let b = real_class(a.benchmark.as_deref().expect("clap requires benchmark"))?;
        dim_json("mutual_fat", &mutual_fat2(&s, &b, m[0], m[1])?)
    } else if let Some(eta) = a.margin {
        let s = real_class(&a.source)?;
        match &a.benchmark {
            Some(p) => dim_json("mutual_fat", &mutual_fat(&s, &real_class(p)?, eta)?),
            None => dim_json("fat", &fat(&s, eta)?),
        }
    } else {
        let s = bin_class(&a.source)?;
        match (&a.benchmark, a.ldim) {
            (Some(p), true) => dim_json("mutual_ldim", &mutual_ldim(&s, &bin_class(p)?)?),
            (None, true) => dim_json("ldim", &ldim(&s)?),
            (Some(p), false) => dim_json("mutual_vc", &mutual_vc(&s, &bin_class(p)?)?),
            (None, false) => dim_json("vc", &vc(&s)?),
        }
    };
    print_json(&out)
}

fn eval(a: EvalArgs) -> anyhow::Result<()> {
    let mf: ModelFile = serde_json::from_str(&read(&a.model)?)?;
    let f = mf.to_real()?;
    let df: DistributionFile = serde_json::from_str(&read(&a.dist)?)?;
    let mu = DiscreteDistribution::from_file(&df)?;
    if f.len() != mu.n() {
        return Err(Error::Invalid("model and distribution domains differ".into()).into());
    }
    let mut out = Map::new();
    let binary = mu.kind() == stat_model::LabelKind::Binary;
    out.insert(
        "correlation".into(),
        json!(stat_model::correlation(&f, &mu)),
    );
    out.insert(
        "squared_error".into(),
        json!(stat_model::squared_error(&f, &mu)),
    );
    out.insert("cal_error".into(), json!(stat_model::cal_error(&f, &mu)));
    out.insert(
        "sign_cal_error".into(),
        json!(stat_model::sign_cal_error(&f, &mu)),
    );
    out.insert("phi".into(), json!(stat_model::Phi(&f, &mu)));
    out.insert("rho".into(), json!(stat_model::rho(&f, &mu)));
    if binary && mf.kind == ModelKind::Binary {
        out.insert(
            "error".into(),
            json!(stat_model::model_error(&mf.to_bin()?, &mu)?),
        );
    }
    if binary {
        for loss in [LossFunction::squared(), LossFunction::absolute()] {
            let v = stat_model::regression_loss(&f, |y, q| loss.eval(y, q), &mu)?;
            out.insert(format!("loss_{}", loss.name()), json!(v));
        }
    }
    let lambda = a.k.map(IntervalPartition::new).transpose()?;
    if let Some(l) = &lambda {
        out.insert(
            "cal_error_lambda".into(),
            json!(stat_model::cal_error_lambda(&f, &mu, l)),
        );
    }
    if let Some(p) = &a.class {
        let b = real_class(p)?;
        out.insert(
            "sup_corr".into(),
            json!(stat_model::sup_corr_partial(&b, &mu)?),
        );
        out.insert("ma_error".into(), json!(stat_model::ma_error(&f, &b, &mu)?));
        out.insert("mc_error".into(), json!(stat_model::mc_error(&f, &b, &mu)?));
        if let Some(l) = &lambda {
            out.insert(
                "mc_error_lambda".into(),
                json!(stat_model::mc_error_lambda(&f, &b, &mu, l)?),
            );
        }
        if binary {
            if let Some(bb) = b.as_binary() {
                out.insert(
                    "inf_error".into(),
                    json!(stat_model::inf_class_error(&bb, &mu)?),
                );
            }
        }
    }
    print_json(&Value::Object(out))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DcormJson {
    eta1: f64,
    eta2: f64,
    n1: Option<usize>,
    t: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CormJson {
    eta1: f64,
    eta2: f64,
    n1: Option<usize>,
    t: Option<usize>,
    labels: Option<Vec<f64>>,
    #[serde(default = "default_corm_cap")]
    cap: u64,
}

fn default_corm_cap() -> u64 {
    1 << 20
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MamcJson {
    alpha: f64,
    gamma: f64,
    k: usize,
    n1: usize,
    n2: usize,
    w: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoostJson {
    alpha: f64,
    gamma: f64,
    eps: f64,
    n1: usize,
    n2: usize,
    n3: usize,
    w: Option<usize>,
    w_prime: Option<usize>,
    n0: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OmniJson {
    alpha: f64,
    gamma: f64,
    eps: f64,
    k: usize,
    n1: usize,
    n2: usize,
    n3: usize,
    loss: String,
    w: Option<usize>,
    w_prime: Option<usize>,
}

fn params<T: serde::de::DeserializeOwned>(text: &str) -> anyhow::Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("params: {e}")).into())
}

fn learn(a: LearnArgs) -> anyhow::Result<()> {
    let text = match &a.params {
        Some(p) => read(p)?,
        None => "{}".to_string(),
    };
    let (data, _) = stat_model::read_dataset(&a.data)?;
    let mut r = rng::stream(a.seed, 0);
    let oracle = ExactWeakOracle::new();
    let model = match a.task {
        Task::Comp => {
            let s = bin_class(&a.source)?;
            let b = bin_class(&a.benchmark)?;
            ModelFile::from_bin(&comparative_learn(&s, &b, &data)?, None)
        }
        Task::Dcorm => {
            let p: DcormJson = params(&text)?;
            let (s, b) = (real_class(&a.source)?, real_class(&a.benchmark)?);
            let p = DcormParams {
                eta1: p.eta1,
                eta2: p.eta2,
                n1: p.n1.unwrap_or(data.len().div_ceil(2)),
                t: p.t,
            };
            ModelFile::from_bin(&dcorm_real(&s, &b, &data, &p, &mut r)?, None)
        }
        Task::Corm => {
            let p: CormJson = params(&text)?;
            let (s, b) = (real_class(&a.source)?, real_class(&a.benchmark)?);
            let p = CormParams {
                eta1: p.eta1,
                eta2: p.eta2,
                n1: p.n1.unwrap_or(data.len().div_ceil(2)),
                t: p.t,
                labels: p.labels,
                cap: p.cap as u128,
            };
            ModelFile::from_bin(&corm_general(&s, &b, &data, &p, &mut r)?, None)
        }
        Task::Mamc => {
            let p: MamcJson = params(&text)?;
            let (s, b) = (real_class(&a.source)?, real_class(&a.benchmark)?);
            let mut mp = MamcParams::with_default_cap(p.alpha, p.gamma, p.n1, p.n2);
            if let Some(w) = p.w {
                mp.w = w;
            }
            let lambda = IntervalPartition::new(p.k)?;
            ModelFile::from_real(
                &ma_mc_learn(&s, &b, &data, &lambda, &mp, &oracle, &mut r)?,
                None,
            )
        }
        Task::Boost => {
            let p: BoostJson = params(&text)?;
            let (s, b) = (real_class(&a.source)?, real_class(&a.benchmark)?);
            let mut bp = BoostParams::with_default_caps(p.alpha, p.gamma, p.eps, p.n1, p.n2, p.n3);
            bp.w = p.w.unwrap_or(bp.w);
            bp.w_prime = p.w_prime.unwrap_or(bp.w_prime);
            bp.n0 = p.n0;
            ModelFile::from_bin(&boost(&s, &b, &data, &bp, &oracle, &mut r)?, None)
        }
        Task::Omni => {
            let p: OmniJson = params(&text)?;
            let (s, b) = (real_class(&a.source)?, real_class(&a.benchmark)?);
            let loss = match p.loss.as_str() {
                "squared" => LossFunction::squared(),
                "absolute" => LossFunction::absolute(),
                other => bail!(Error::Invalid(format!("params: unknown loss {other:?}"))),
            };
            let mut op =
                OmniParams::with_default_caps(p.alpha, p.gamma, p.eps, p.k, p.n1, p.n2, p.n3);
            op.w = p.w.unwrap_or(op.w);
            op.w_prime = p.w_prime.unwrap_or(op.w_prime);
            ModelFile::from_real(
                &omnipredict(&s, &b, &loss, &data, &op, &oracle, &mut r)?,
                None,
            )
        }
    };
    let provenance = json!({
        "task": format!("{:?}", a.task).to_lowercase(),
        "params_sha256": hex::encode(Sha256::digest(text.as_bytes())),
        "seed": a.seed,
    });
    let model = ModelFile {
        provenance: Some(provenance),
        ..model
    };
    fs::write(&a.out, serde_json::to_string_pretty(&model)? + "\n")
        .with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}

fn load_tree(path: &Path) -> anyhow::Result<MistakeTree> {
    let v: Value = serde_json::from_str(&read(path)?)?;
    let t = v.get("tree").cloned().unwrap_or(v);
    serde_json::from_value(t).map_err(|e| Error::Invalid(format!("tree: {e}")).into())
}

fn truncate_tree(t: MistakeTree, depth: usize) -> MistakeTree {
    let depth = depth.min(t.depth);
    MistakeTree {
        depth,
        nodes: t.nodes[..(1usize << depth) - 1].to_vec(),
    }
}

fn online(a: OnlineArgs) -> anyhow::Result<()> {
    let s = bin_class(&a.source)?;
    let b = match &a.benchmark {
        Some(p) => bin_class(p)?,
        None => s.clone(),
    };
    let horizon = |len: usize| a.rounds.map_or(len, |r| r.min(len)).max(1);
    let run: OnlineRun = match a.adversary {
        Adversary::Tree => {
            let tree = match &a.tree {
                Some(p) => load_tree(p)?,
                None => {
                    let d = if a.benchmark.is_some() {
                        mutual_ldim(&s, &b)?
                    } else {
                        ldim(&s)?
                    };
                    d.tree.ok_or_else(|| {
                        anyhow!(Error::Invalid("class has no mistake tree".into()))
                    })?
                }
            };
            let tree = match a.rounds {
                Some(r) => truncate_tree(tree, r),
                None => tree,
            };
            let classes: Vec<&BinClass> = if a.benchmark.is_some() {
                vec![&s, &b]
            } else {
                vec![&s]
            };
            let adv = TreeAdversary::new(&classes, tree)?;
            let mut l = online_learner(a.learner, &s, &b, horizon(adv.depth()))?;
            adv.play(l.as_mut(), &b)?
        }
        Adversary::Replay => {
            let path = a
                .sequence
                .as_deref()
                .ok_or_else(|| anyhow!(Error::Invalid("replay needs --sequence".into())))?;
            let (data, _) = stat_model::read_dataset(path)?;
            let mut points = Vec::with_capacity(data.len());
            for &(x, y) in data.points.iter().take(a.rounds.unwrap_or(usize::MAX)) {
                let y = match y {
                    1.0 => 1,
                    -1.0 => -1,
                    _ => bail!(Error::Invalid(format!("sequence label {y} must be ±1"))),
                };
                points.push((x, y));
            }
            let seq = LabeledSequence::new(s.n(), points)?;
            let mut l = online_learner(a.learner, &s, &b, horizon(seq.len()))?;
            run_sequence(l.as_mut(), &seq, &b)?
        }
    };
    fs::create_dir_all(&a.out)?;
    let mut w = csv::Writer::from_path(a.out.join("rounds.csv"))?;
    w.write_record(["round", "x", "p_plus", "y", "cum_expected_mistakes"])?;
    for r in &run.rounds {
        w.write_record([
            r.round.to_string(),
            r.x.to_string(),
            r.p_plus.to_string(),
            r.y.to_string(),
            r.cum_expected_mistakes.to_string(),
        ])?;
    }
    w.flush()?;
    let text = serde_json::to_string_pretty(&run.report)?;
    fs::write(a.out.join("report.json"), text + "\n")?;
    print_json(&run.report)
}

fn online_learner(
    kind: OnlineKind,
    s: &BinClass,
    b: &BinClass,
    horizon: usize,
) -> anyhow::Result<Box<dyn OnlineLearner>> {
    Ok(match kind {
        OnlineKind::Soa => Box::new(Soa::new(s)?),
        OnlineKind::Rwm => Box::new(Rwm::new(s, horizon)?),
        OnlineKind::Comp => Box::new(comp_online(s, b, horizon)?),
    })
}

fn parse_grid(g: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || {
        Error::Invalid(format!(
            "grid {g:?} must be a list like 0,1,2 or from:to:step"
        ))
    };
    let parts: Vec<&str> = g.split(':').collect();
    if let [from, to, step] = parts.as_slice() {
        let n = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (from, to, step) = (n(from)?, n(to)?, n(step)?);
        if step == 0 || from > to {
            return Err(bad().into());
        }
        return Ok((from..=to).step_by(step).collect());
    }
    g.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| bad().into()))
        .collect()
}

fn estimate(a: EstimateArgs) -> anyhow::Result<()> {
    let sel = &a.sel;
    let spec = scenario(sel.scenario, sel.m, sel.direction, sel.eps, sel.delta)?;
    let kind = a
        .learner
        .unwrap_or_else(|| default_learner(sel.scenario, sel.direction));
    let learner = Learner::new(&kind, &spec)?;
    let mode = match a.mode {
        ModeArg::Adversarial => Mode::Adversarial,
        ModeArg::Generator => Mode::Generator,
    };
    let mut opts = EstimateOptions::new(parse_grid(&a.grid)?, a.trials, a.seed, mode);
    opts.early_stop = a.early_stop;
    let report = estimate_sample_complexity(&spec, &learner, &opts)?;
    print_json(&json!({
        "scenario": sel.scenario,
        "direction": sel.direction,
        "m": sel.m,
        "learner": kind.to_string(),
        "report": report,
    }))
}

fn scenario_cmd(a: ScenarioArgs) -> anyhow::Result<()> {
    let sel = &a.sel;
    let spec = scenario(sel.scenario, sel.m, sel.direction, sel.eps, sel.delta)?;
    let marginal = match &spec.marginal {
        Marginal::Fixed(v) => json!(v),
        Marginal::Free => json!("free"),
    };
    if let Some(dir) = &a.emit {
        fs::create_dir_all(dir)?;
        fs::write(
            dir.join("source.json"),
            io::real_class_to_string(&spec.s) + "\n",
        )?;
        fs::write(
            dir.join("benchmark.json"),
            io::real_class_to_string(&spec.b) + "\n",
        )?;
    }
    print_json(&json!({
        "name": spec.name,
        "task": spec.task,
        "domain_size": spec.n(),
        "source_size": spec.s.len(),
        "benchmark_size": spec.b.len(),
        "loss": spec.loss.as_ref().map(|l| l.name().to_string()),
        "law": spec.law,
        "marginal": marginal,
        "eps": spec.eps,
        "delta": spec.delta,
        "default_learner": default_learner(sel.scenario, sel.direction).to_string(),
    }))
}

fn run(a: RunArgs) -> anyhow::Result<()> {
    let text = match (&a.config, a.reference_suite) {
        (_, true) => REFERENCE_SUITE.to_string(),
        (Some(p), false) => read(p)?,
        (None, false) => unreachable!("clap requires a config"),
    };
    let summary = run_experiment(&text, &a.out)?;
    for r in &summary.runs {
        let n = r
            .report
            .n_star
            .map_or("none".to_string(), |n| n.to_string());
        println!(
            "{} {} m={} learner={} n*={n}",
            r.scenario, r.direction, r.m, r.learner
        );
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::Guard(_) | Error::EnumerationCapExceeded { .. } | Error::RetryCapExceeded(_),
        ) => 3,
        Some(Error::Io(_)) => 1,
        Some(_) => 2,
        None if e.downcast_ref::<serde_json::Error>().is_some() => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Dims(a) => dims(a),
        Cmd::Eval(a) => eval(a),
        Cmd::Learn(a) => learn(a),
        Cmd::Online(a) => online(a),
        Cmd::Estimate(a) => estimate(a),
        Cmd::Scenario(a) => scenario_cmd(a),
        Cmd::Run(a) => run(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
