//! Losses, the optimal post-processing map τ, and the omnipredictor.

use std::fmt;
use std::sync::Arc;

use crate::domain::{proj_interval, IntervalPartition, Labeling, RealClass, RealModel};
use crate::error::{invalid, Result};
use crate::offline::corm::round_model;
use crate::offline::mamc::{check_partition, mc_step, WeakOracle};
use crate::offline::{first_integer_above, Blocks, Layout, Role, SplitBlocks};
use crate::rng::Rng;
use crate::stat_model::{Dataset, DiscreteDistribution};

/// Grid resolution for κ and the convexity check.
pub const LOSS_GRID: usize = 1000;
const TAU_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

type LossFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type TauFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A loss ℓ(y, q) for y ∈ {−1, 1} and q ∈ [−1, 1].
#[derive(Clone)]
pub struct LossFunction {
    name: String,
    eval: LossFn,
    kappa: f64,
    convex: bool,
    tau: Option<TauFn>,
}

impl fmt::Debug for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossFunction")
            .field("name", &self.name)
            .field("kappa", &self.kappa)
            .field("convex", &self.convex)
            .field("analytic_tau", &self.tau.is_some())
            .finish()
    }
}

fn grid(m: usize) -> impl Iterator<Item = f64> {
    (0..=m).map(move |i| -1.0 + 2.0 * i as f64 / m as f64)
}

/// Largest secant slope on the grid, with the end slopes extrapolated
/// linearly to the boundary.
fn grid_kappa(l: &dyn Fn(f64, f64) -> f64) -> f64 {
    let h = 2.0 / LOSS_GRID as f64;
    let q: Vec<f64> = grid(LOSS_GRID).collect();
    let mut kappa: f64 = 0.0;
    for y in [-1.0, 1.0] {
        let s: Vec<f64> = q
            .windows(2)
            .map(|w| (l(y, w[1]) - l(y, w[0])).abs() / h)
            .collect();
        let m = s.len();
        kappa = kappa.max(s.iter().copied().fold(0.0, f64::max));
        kappa = kappa.max(s[0] + (s[0] - s[1]) / 2.0);
        kappa = kappa.max(s[m - 1] + (s[m - 1] - s[m - 2]) / 2.0);
    }
    kappa
}

fn grid_convex(l: &dyn Fn(f64, f64) -> f64) -> bool {
    let q: Vec<f64> = grid(LOSS_GRID).collect();
    [-1.0, 1.0].iter().all(|&y| {
        q.windows(3)
            .all(|w| l(y, w[0]) - 2.0 * l(y, w[1]) + l(y, w[2]) >= -1e-9)
    })
}

impl LossFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        convex: bool,
        tau: Option<TauFn>,
    ) -> Result<Self> {
        let name = name.into();
        if convex && !grid_convex(&eval) {
            return invalid(format!(
                "loss {name} is flagged convex but fails the grid check"
            ));
        }
        let kappa = grid_kappa(&eval);
        if !kappa.is_finite() {
            return invalid(format!("loss {name} has a non-finite slope"));
        }
        Ok(LossFunction {
            name,
            eval: Arc::new(eval),
            kappa,
            convex,
            tau,
        })
    }

    /// (y − q)².
    pub fn squared() -> Self {
        Self::new(
            "squared",
            |y, q| (y - q) * (y - q),
            true,
            Some(Arc::new(|u| u)),
        )
        .expect("squared loss is convex")
    }

    /// |y − q|.
    pub fn absolute() -> Self {
        Self::new(
            "absolute",
            |y, q| (y - q).abs(),
            true,
            Some(Arc::new(|u| if u >= 0.0 { 1.0 } else { -1.0 })),
        )
        .expect("absolute loss is convex")
    }

    /// The same loss without its analytic τ, for numeric minimization.
    pub fn without_tau(&self) -> Self {
        LossFunction {
            tau: None,
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn eval(&self, y: f64, q: f64) -> f64 {
        (self.eval)(y, q)
    }

    /// E[ℓ(y, q)] for y drawn from Ber*(u).
    pub fn expected(&self, u: f64, q: f64) -> f64 {
        (1.0 + u) / 2.0 * self.eval(1.0, q) + (1.0 - u) / 2.0 * self.eval(-1.0, q)
    }
}

/// A minimizer of E_{Ber*(u)}[ℓ(y, q)] over q ∈ [−1, 1]. Numeric search
/// resolves near-ties toward the larger q.
pub fn tau(loss: &LossFunction, u: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return invalid(format!("τ needs u in [-1,1], got {u}"));
    }
    if let Some(t) = &loss.tau {
        return Ok(t(u));
    }
    if !loss.convex {
        return invalid(format!("loss {} is not flagged convex", loss.name));
    }
    let g = |q: f64| loss.expected(u, q);
    let m = 2 * LOSS_GRID;
    let mut best = (0usize, g(-1.0));
    for (i, q) in grid(m).enumerate().skip(1) {
        let v = g(q);
        if v <= best.1 + TIE_TOL {
            best = (i, v.min(best.1));
        }
    }
    let at = |i: usize| -1.0 + 2.0 * i as f64 / m as f64;
    let q0 = at(best.0);
    let (mut lo, mut hi) = (at(best.0.saturating_sub(1)), at((best.0 + 1).min(m)));
    while hi - lo > TAU_TOL / 10.0 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) - TIE_TOL {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let q1 = proj_interval((lo + hi) / 2.0);
    Ok(if g(q1) < g(q0) - TIE_TOL { q1 } else { q0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmniParams {
    pub alpha: f64,
    pub gamma: f64,
    pub eps: f64,
    pub k: usize,
    /// Number of check blocks (calibration tests).
    pub w: usize,
    /// Number of train/holdout pairs (multicalibration steps).
    pub w_prime: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl OmniParams {
    /// W′ = ⌊4/γ²⌋ + 1 and W = W′ + ⌊4/ε²⌋ + 1.
    #[allow(clippy::too_many_arguments)]
    pub fn with_default_caps(
        alpha: f64,
        gamma: f64,
        eps: f64,
        k: usize,
        n1: usize,
        n2: usize,
        n3: usize,
    ) -> Self {
        let w_prime = first_integer_above(4.0 / (gamma * gamma));
        let w = w_prime + first_integer_above(4.0 / (eps * eps));
        OmniParams {
            alpha,
            gamma,
            eps,
            k,
            w,
            w_prime,
            n1,
            n2,
            n3,
        }
    }

    pub fn layout(&self) -> Layout {
        Layout {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            pairs: self.w_prime,
            checks: self.w,
        }
    }

    fn validate(&self) -> Result<IntervalPartition> {
        if !(self.gamma > 0.0 && self.eps > 0.0 && self.alpha >= 0.0) {
            return invalid("need γ > 0, ε > 0 and α ≥ 0");
        }
        if self.w_prime < first_integer_above(4.0 / (self.gamma * self.gamma)) {
            return invalid("W′ must exceed 4/γ²");
        }
        if self.n3 == 0 {
            return invalid("calibration blocks must be nonempty");
        }
        let lambda = IntervalPartition::new(self.k)?;
        check_partition(&lambda)?;
        Ok(lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmniStepKind {
    Calibrate,
    Multicalibrate,
    Stop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmniStep {
    pub j: usize,
    pub j_prime: usize,
    pub kind: OmniStepKind,
    pub q_sigma: f64,
    pub q_oracle: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct OmniOutput {
    /// The loop's model, its rounding to cell midpoints, and τ of the rounding.
    pub raw: RealModel,
    pub rounded: RealModel,
    pub model: RealModel,
    pub steps: Vec<OmniStep>,
    pub oracle_calls: usize,
}

pub fn omnipredict(
    s: &RealClass,
    b: &RealClass,
    loss: &LossFunction,
    data: &Dataset,
    params: &OmniParams,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
) -> Result<RealModel> {
    let mut blocks = SplitBlocks::new(data, params.layout())?;
    Ok(omnipredict_run(s, b, loss, &mut blocks, params, oracle, rng, None)?.model)
}

#[allow(clippy::too_many_arguments)]
pub fn omnipredict_run(
    s: &RealClass,
    b: &RealClass,
    loss: &LossFunction,
    blocks: &mut dyn Blocks,
    params: &OmniParams,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
    probe: Option<&DiscreteDistribution>,
) -> Result<OmniOutput> {
    let lambda = params.validate()?;
    if s.n() != b.n() {
        return invalid("classes live on different domains");
    }
    let p = params;
    let k = p.k;
    let mut f = RealModel::zeros(s.n());
    let mut steps = Vec::new();
    let mut calls = 0;
    let (mut j, mut jp) = (0usize, 0usize);
    while j < p.w && jp < p.w_prime {
        let check = blocks.block(Role::Check, j)?;
        if check.points.iter().any(|&(_, y)| y != 1.0 && y != -1.0) {
            return invalid("omniprediction needs ±1 labels");
        }
        let mut cell = vec![0.0; k];
        for &(x, y) in &check.points {
            cell[lambda.cell(f.get(x))] += y - f.get(x);
        }
        let sigma: Vec<f64> = cell
            .iter()
            .map(|&c| if c >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let q_sigma = cell.iter().map(|c| c.abs()).sum::<f64>() / check.len() as f64;
        let mut step = OmniStep {
            j,
            j_prime: jp,
            kind: OmniStepKind::Calibrate,
            q_sigma,
            q_oracle: None,
        };
        if q_sigma >= 3.0 * p.eps / 4.0 {
            let h = p.eps / 2.0;
            f = f.map(|_, u| proj_interval(u + h * sigma[lambda.cell(u)]));
        } else {
            let train = blocks.block(Role::Train, jp)?;
            let holdout = blocks.block(Role::Holdout, jp)?;
            let st = mc_step(
                s, b, &f, &train, &holdout, &lambda, p.alpha, p.gamma, oracle, rng, probe,
                &mut calls,
            )?;
            step.q_oracle = Some(st.q);
            if st.q >= 3.0 * p.gamma / 4.0 {
                step.kind = OmniStepKind::Multicalibrate;
                let g = p.gamma / 2.0;
                f = f.map(|x, u| proj_interval(u + g * st.f_prime.get(x) as f64));
                jp += 1;
            } else {
                step.kind = OmniStepKind::Stop;
                steps.push(step);
                break;
            }
        }
        steps.push(step);
        j += 1;
    }
    let rounded = round_model(&f, &lambda);
    let mut vals = Vec::with_capacity(rounded.len());
    for &u in rounded.values() {
        vals.push(tau(loss, u)?);
    }
    Ok(OmniOutput {
        raw: f,
        rounded,
        model: RealModel::new(vals)?,
        steps,
        oracle_calls: calls,
    })
}
