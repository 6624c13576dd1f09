//! Weak correlation oracles and the multiaccuracy/multicalibration loop.

use crate::domain::{
    gen_product, proj_interval, shift_scale_class, sigma_mask_class, BinModel, IntervalPartition,
    RealClass, RealLabel, RealModel, SignVector,
};
use crate::error::{invalid, Error, Result};
use crate::offline::corm::{dcorm_real, DcormParams};
use crate::offline::{first_integer_above, Blocks, Layout, Role, SplitBlocks};
use crate::rng::Rng;
use crate::stat_model::{Dataset, DiscreteDistribution};

pub const MAX_PARTITION: usize = 20;

/// Declared weak-learning guarantee: when some benchmark reaches correlation
/// α, the output reaches γ, except with probability δ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contract {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: Option<f64>,
}

/// A learner for correlation maximization against a benchmark class.
pub trait WeakOracle {
    fn learn(
        &self,
        s: &RealClass,
        b: &RealClass,
        data: &Dataset,
        rng: &mut Rng,
    ) -> Result<BinModel>;

    fn contract(&self) -> Option<Contract> {
        None
    }
}

/// Exact empirical maximizer of Σᵢ yᵢ·c(xᵢ) over threshold cuts of the
/// benchmarks and the two constants.
///
/// For a benchmark b and threshold θ the cut is +1 where b(x) ≥ θ and −1
/// where b(x) < θ; points where b is STAR get whichever constant scores
/// higher there. Candidates are ordered +1, −1, then by benchmark and
/// increasing θ; the first maximizer wins.
#[derive(Clone, Debug, Default)]
pub struct ExactWeakOracle {
    contract: Option<Contract>,
}

impl ExactWeakOracle {
    pub fn new() -> Self {
        ExactWeakOracle { contract: None }
    }

    pub fn with_contract(contract: Contract) -> Self {
        ExactWeakOracle {
            contract: Some(contract),
        }
    }
}

impl WeakOracle for ExactWeakOracle {
    fn learn(
        &self,
        _s: &RealClass,
        b: &RealClass,
        data: &Dataset,
        _rng: &mut Rng,
    ) -> Result<BinModel> {
        exact_threshold_learn(b, data)
    }

    fn contract(&self) -> Option<Contract> {
        self.contract
    }
}

pub fn exact_threshold_learn(b: &RealClass, data: &Dataset) -> Result<BinModel> {
    let n = b.n();
    let mut ysum = vec![0.0; n];
    let mut total = 0.0;
    for &(x, y) in &data.points {
        if x >= n {
            return invalid(format!("data point {x} outside a domain of size {n}"));
        }
        ysum[x] += y;
        total += y;
    }
    // (score, benchmark, threshold position, star fill); None = constant.
    let mut best_score = total;
    let mut best: Option<(usize, usize, i8)> = None;
    let mut fill_const = 1i8;
    if -total > best_score {
        best_score = -total;
        fill_const = -1;
    }
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for (bi, h) in b.iter().enumerate() {
        order.clear();
        let mut star = 0.0;
        for x in 0..n {
            match h.get(x) {
                RealLabel::Val(v) => order.push((v, x)),
                RealLabel::Star => star += ysum[x],
            }
        }
        order.sort_by(|a, c| a.0.total_cmp(&c.0));
        let (fill, star_score) = if star >= 0.0 { (1, star) } else { (-1, -star) };
        // θ at the i-th distinct value: points i.. are +1, the rest −1.
        let mut above: f64 = order.iter().map(|&(_, x)| ysum[x]).sum();
        let mut below = 0.0;
        let mut i = 0;
        while i <= order.len() {
            let score = above - below + star_score;
            if score > best_score {
                best_score = score;
                best = Some((bi, i, fill));
            }
            if i == order.len() {
                break;
            }
            let v = order[i].0;
            while i < order.len() && order[i].0 == v {
                above -= ysum[order[i].1];
                below += ysum[order[i].1];
                i += 1;
            }
        }
    }
    match best {
        None => Ok(BinModel::constant(n, fill_const)),
        Some((bi, pos, fill)) => {
            let h = b.get(bi);
            let mut vals: Vec<(f64, usize)> = (0..n)
                .filter_map(|x| h.get(x).value().map(|v| (v, x)))
                .collect();
            vals.sort_by(|a, c| a.0.total_cmp(&c.0));
            let theta = vals.get(pos).map(|p| p.0).unwrap_or(f64::INFINITY);
            let out = (0..n)
                .map(|x| match h.get(x) {
                    RealLabel::Val(v) if v >= theta => 1,
                    RealLabel::Val(_) => -1,
                    RealLabel::Star => fill,
                })
                .collect();
            BinModel::new(out)
        }
    }
}

/// Correlation learner built on the thresholded rejection-sampling reduction.
#[derive(Clone, Debug)]
pub struct DcormOracle {
    pub params: DcormParams,
    /// Fraction of each dataset used for training; the rest is the holdout.
    pub train_fraction: f64,
}

impl WeakOracle for DcormOracle {
    fn learn(
        &self,
        s: &RealClass,
        b: &RealClass,
        data: &Dataset,
        rng: &mut Rng,
    ) -> Result<BinModel> {
        let mut p = self.params.clone();
        p.n1 = ((data.len() as f64) * self.train_fraction).round() as usize;
        dcorm_real(s, b, data, &p, rng)
    }
}

/// A strong learner viewed as a weak one with contract (α, γ).
pub struct Weakened<L> {
    inner: L,
    contract: Contract,
}

impl<L: WeakOracle> WeakOracle for Weakened<L> {
    fn learn(
        &self,
        s: &RealClass,
        b: &RealClass,
        data: &Dataset,
        rng: &mut Rng,
    ) -> Result<BinModel> {
        self.inner.learn(s, b, data, rng)
    }

    fn contract(&self) -> Option<Contract> {
        Some(self.contract)
    }
}

/// Wraps a learner that reaches correlation within α−γ of the benchmark.
pub fn weak_from_strong<L: WeakOracle>(strong: L, alpha: f64, gamma: f64) -> Result<Weakened<L>> {
    if !(gamma >= 0.0 && alpha >= 0.0) {
        return invalid("α and γ must be nonnegative");
    }
    if gamma > alpha {
        return invalid(format!("γ = {gamma} exceeds α = {alpha}"));
    }
    let delta = strong.contract().and_then(|c| c.delta);
    Ok(Weakened {
        inner: strong,
        contract: Contract {
            alpha,
            gamma,
            delta,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MamcParams {
    pub alpha: f64,
    pub gamma: f64,
    /// Number of train/holdout pairs, which caps the iterations.
    pub w: usize,
    pub n1: usize,
    pub n2: usize,
}

impl MamcParams {
    /// W = ⌊4/γ²⌋ + 1, the smallest admissible cap.
    pub fn with_default_cap(alpha: f64, gamma: f64, n1: usize, n2: usize) -> Self {
        let w = first_integer_above(4.0 / (gamma * gamma));
        MamcParams {
            alpha,
            gamma,
            w,
            n1,
            n2,
        }
    }

    pub fn layout(&self) -> Layout {
        Layout {
            n1: self.n1,
            n2: self.n2,
            n3: 0,
            pairs: self.w,
            checks: 0,
        }
    }

    fn validate(&self, lambda: &IntervalPartition) -> Result<()> {
        if !(self.gamma > 0.0 && self.alpha >= 0.0) {
            return invalid("need γ > 0 and α ≥ 0");
        }
        if self.w < first_integer_above(4.0 / (self.gamma * self.gamma)) {
            return invalid(format!(
                "W = {} must exceed 4/γ² = {}",
                self.w,
                4.0 / (self.gamma * self.gamma)
            ));
        }
        check_partition(lambda)
    }
}

pub(crate) fn check_partition(lambda: &IntervalPartition) -> Result<()> {
    if lambda.k() > MAX_PARTITION {
        return Err(Error::Guard(format!(
            "partition size {} exceeds {MAX_PARTITION}: the sweep visits 2^k sign vectors",
            lambda.k()
        )));
    }
    Ok(())
}

/// Exactly evaluated quantities of one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct MamcExact {
    /// E[(f−y)²] before and after the iteration.
    pub sq_before: f64,
    pub sq_after: f64,
    /// Some masked benchmark has correlation above α with y−f, yet every
    /// oracle output correlates below γ.
    pub e1: bool,
    /// Some oracle output has holdout score off by more than γ/4.
    pub e2: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MamcStep {
    pub round: usize,
    /// Best holdout score and the sign vector achieving it (bit set = −1).
    pub q: f64,
    pub sigma: u32,
    pub updated: bool,
    pub exact: Option<MamcExact>,
}

#[derive(Clone, Debug)]
pub struct MamcOutput {
    pub model: RealModel,
    pub steps: Vec<MamcStep>,
    pub oracle_calls: usize,
}

pub(crate) struct McStep {
    pub f_prime: BinModel,
    pub q: f64,
    pub sigma: u32,
    pub e1: bool,
    pub e2: bool,
}

/// One oracle sweep over all sign vectors, scored on the holdout.
#[allow(clippy::too_many_arguments)]
pub(crate) fn mc_step(
    s: &RealClass,
    b: &RealClass,
    f: &RealModel,
    train: &Dataset,
    holdout: &Dataset,
    lambda: &IntervalPartition,
    alpha: f64,
    gamma: f64,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
    probe: Option<&DiscreteDistribution>,
    calls: &mut usize,
) -> Result<McStep> {
    let shifted = shift_scale_class(s, f)?;
    let psi = Dataset::new(
        train
            .points
            .iter()
            .map(|&(x, y)| (x, (y - f.get(x)) / 2.0))
            .collect(),
    );
    let k = lambda.k();
    let mut best: Option<(f64, u32, BinModel)> = None;
    let mut any_above_alpha = false;
    let mut all_below_gamma = true;
    let mut e2 = false;
    for mask in 0..1u32 << k {
        let sigma = SignVector::from_mask(mask, k);
        let masked = sigma_mask_class(b, &sigma, f, lambda)?;
        let fs = oracle.learn(&shifted, &masked, &psi, rng)?;
        *calls += 1;
        let q = residual_q(holdout, f, &fs);
        if let Some(mu) = probe {
            any_above_alpha |= masked
                .iter()
                .any(|h| mu.expect(|x, y| gen_product(y - f.get(x), h.get(x))) > alpha);
            let truth = mu.expect(|x, y| (y - f.get(x)) * fs.get(x) as f64);
            all_below_gamma &= truth < gamma;
            e2 |= (q - truth).abs() > gamma / 4.0;
        }
        if best.as_ref().map_or(true, |(bq, _, _)| q > *bq) {
            best = Some((q, mask, fs));
        }
    }
    let (q, sigma, f_prime) = best.expect("at least one sign vector");
    Ok(McStep {
        f_prime,
        q,
        sigma,
        e1: probe.is_some() && any_above_alpha && all_below_gamma,
        e2,
    })
}

/// Mean of (y − f(x))·f′(x); zero on an empty dataset.
pub(crate) fn residual_q(data: &Dataset, f: &RealModel, fp: &BinModel) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.points
        .iter()
        .map(|&(x, y)| (y - f.get(x)) * fp.get(x) as f64)
        .sum::<f64>()
        / data.len() as f64
}

pub fn ma_mc_learn(
    s: &RealClass,
    b: &RealClass,
    data: &Dataset,
    lambda: &IntervalPartition,
    params: &MamcParams,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
) -> Result<RealModel> {
    let mut blocks = SplitBlocks::new(data, params.layout())?;
    Ok(ma_mc_run(s, b, &mut blocks, lambda, params, oracle, rng, None)?.model)
}

/// The multicalibration loop over any block source, with an optional exact
/// distribution for per-iteration diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn ma_mc_run(
    s: &RealClass,
    b: &RealClass,
    blocks: &mut dyn Blocks,
    lambda: &IntervalPartition,
    params: &MamcParams,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
    probe: Option<&DiscreteDistribution>,
) -> Result<MamcOutput> {
    params.validate(lambda)?;
    if s.n() != b.n() {
        return invalid("classes live on different domains");
    }
    let mut f = RealModel::zeros(s.n());
    let mut steps = Vec::new();
    let mut calls = 0;
    for j in 0..params.w {
        let train = blocks.block(Role::Train, j)?;
        let holdout = blocks.block(Role::Holdout, j)?;
        let sq_before = probe.map(|mu| sq(&f, mu));
        let st = mc_step(
            s,
            b,
            &f,
            &train,
            &holdout,
            lambda,
            params.alpha,
            params.gamma,
            oracle,
            rng,
            probe,
            &mut calls,
        )?;
        let updated = st.q >= 3.0 * params.gamma / 4.0;
        if updated {
            let g = params.gamma / 2.0;
            f = f.map(|x, u| proj_interval(u + g * st.f_prime.get(x) as f64));
        }
        steps.push(MamcStep {
            round: j,
            q: st.q,
            sigma: st.sigma,
            updated,
            exact: probe.map(|mu| MamcExact {
                sq_before: sq_before.unwrap(),
                sq_after: sq(&f, mu),
                e1: st.e1,
                e2: st.e2,
            }),
        });
        if !updated {
            break;
        }
    }
    Ok(MamcOutput {
        model: f,
        steps,
        oracle_calls: calls,
    })
}

fn sq(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| (f.get(x) - y).powi(2))
}
