//! Boosting a weak correlation oracle with sign calibration.

use rand::Rng as _;

use crate::domain::{gen_product, pi_proj, proj_interval, sign, BinModel, RealClass, RealModel};
use crate::error::{invalid, Result};
use crate::offline::mamc::WeakOracle;
use crate::offline::{first_integer_above, Blocks, Layout, Role, SplitBlocks};
use crate::rng::Rng;
use crate::stat_model::{reject_ratio, rho, Dataset, DiscreteDistribution, Phi};

#[derive(Clone, Debug, PartialEq)]
pub struct BoostParams {
    pub alpha: f64,
    pub gamma: f64,
    pub eps: f64,
    /// Number of check blocks (calibration tests).
    pub w: usize,
    /// Number of train/holdout pairs, which caps oracle calls.
    pub w_prime: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// Oracle sample size; ⌊n⁽¹⁾α/2⌋ when absent.
    pub n0: Option<usize>,
}

impl BoostParams {
    /// Iteration caps from the analysis with the unspecified absolute
    /// constant set to 1: W′ > α⁻¹γ⁻²ln(1/α) and W > W′ + 4/ε².
    pub fn with_default_caps(
        alpha: f64,
        gamma: f64,
        eps: f64,
        n1: usize,
        n2: usize,
        n3: usize,
    ) -> Self {
        let w_prime = first_integer_above((1.0 / alpha).ln() / (alpha * gamma * gamma));
        let w = w_prime + first_integer_above(4.0 / (eps * eps));
        BoostParams {
            alpha,
            gamma,
            eps,
            w,
            w_prime,
            n1,
            n2,
            n3,
            n0: None,
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

    pub fn n0(&self) -> usize {
        self.n0
            .unwrap_or((self.n1 as f64 * self.alpha / 2.0).floor() as usize)
    }

    /// W′(δ₁+δ₂+δ₄) + Wδ₃ with each δ obtained by inverting the sample-size
    /// conditions at constant 1, capped at 1.
    pub fn failure_budget(&self, delta1: f64) -> f64 {
        let d2 = (-(self.n2 as f64) * (self.alpha * self.gamma).powi(2)).exp();
        let d3 = (-(self.n3 as f64) * self.eps * self.eps).exp();
        let d4 = (-(self.n1 as f64) * self.alpha).exp();
        (self.w_prime as f64 * (delta1 + d2 + d4) + self.w as f64 * d3).min(1.0)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("α", self.alpha), ("γ", self.gamma), ("ε", self.eps)] {
            if !(v > 0.0 && v < 1.0) {
                return invalid(format!("{name} must lie in (0,1)"));
            }
        }
        if self.w == 0 || self.w_prime == 0 || self.n1 == 0 || self.n2 == 0 || self.n3 == 0 {
            return invalid("iteration caps and block sizes must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Sign-calibration update.
    Calibrate,
    /// Oracle output accepted.
    Update,
    /// Too few points survived rejection sampling.
    StopSample,
    /// Oracle output scored below the acceptance threshold.
    StopWeak,
}

/// Exact diagnostics of one loop iteration. Oracle-related events are None
/// when the oracle was not called.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostExact {
    pub phi_before: f64,
    pub phi_after: f64,
    pub rho: f64,
    pub e1: Option<bool>,
    pub e2: Option<bool>,
    pub e3: bool,
    pub e4: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoostStep {
    pub j: usize,
    pub j_prime: usize,
    pub kind: StepKind,
    /// Calibration test statistic.
    pub q: f64,
    pub n_prime: Option<usize>,
    pub q_oracle: Option<f64>,
    pub exact: Option<BoostExact>,
}

impl BoostStep {
    /// The potential drop promised when the step's bad events are absent,
    /// or None when no promise applies.
    pub fn promised_drop(&self, p: &BoostParams) -> Option<f64> {
        let ex = self.exact.as_ref()?;
        match self.kind {
            StepKind::Calibrate if !ex.e3 => Some(p.eps * p.eps / 8.0),
            StepKind::Update
                if ex.e1 == Some(false) && ex.e2 == Some(false) && ex.e4 == Some(false) =>
            {
                let g2 = p.gamma * p.gamma;
                Some((p.alpha * p.alpha * g2).max(g2 * ex.rho * ex.rho) / 162.0)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoostOutput {
    pub model: BinModel,
    pub raw: RealModel,
    pub steps: Vec<BoostStep>,
    pub oracle_calls: usize,
}

fn residual(y: f64, u: f64) -> f64 {
    y - pi_proj(y, u)
}

fn mean(data: &Dataset, g: impl Fn(usize, f64) -> f64) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.points.iter().map(|&(x, y)| g(x, y)).sum::<f64>() / data.len() as f64
}

pub fn boost(
    s: &RealClass,
    b: &RealClass,
    data: &Dataset,
    params: &BoostParams,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
) -> Result<BinModel> {
    let mut blocks = SplitBlocks::new(data, params.layout())?;
    Ok(boost_run(s, b, &mut blocks, params, oracle, rng, None)?.model)
}

pub fn boost_run(
    s: &RealClass,
    b: &RealClass,
    blocks: &mut dyn Blocks,
    params: &BoostParams,
    oracle: &dyn WeakOracle,
    rng: &mut Rng,
    probe: Option<&DiscreteDistribution>,
) -> Result<BoostOutput> {
    params.validate()?;
    if s.n() != b.n() {
        return invalid("classes live on different domains");
    }
    let p = params;
    let mut f = RealModel::zeros(s.n());
    let mut steps = Vec::new();
    let mut calls = 0usize;
    let (mut j, mut jp) = (0usize, 0usize);
    while j < p.w && jp < p.w_prime {
        let check = blocks.block(Role::Check, j)?;
        let q = mean(&check, |x, y| residual(y, f.get(x)) * sign(f.get(x)) as f64);
        let phi_before = probe.map(|mu| Phi(&f, mu));
        let rho_f = probe.map(|mu| rho(&f, mu));
        let e3 = probe.map(|mu| {
            let truth = mu.expect(|x, y| residual(y, f.get(x)) * sign(f.get(x)) as f64);
            (q - truth).abs() > p.eps / 4.0
        });
        let mut step = BoostStep {
            j,
            j_prime: jp,
            kind: StepKind::Calibrate,
            q,
            n_prime: None,
            q_oracle: None,
            exact: None,
        };
        let mut e1 = None;
        let mut e2 = None;
        let mut e4 = None;
        let mut stop = false;
        if q < -3.0 * p.eps / 4.0 {
            let h = p.eps / 2.0;
            f = f.map(|_, u| proj_interval(u - h * sign(u) as f64));
        } else {
            let train = blocks.block(Role::Train, jp)?;
            let holdout = blocks.block(Role::Holdout, jp)?;
            let mut psi = Vec::new();
            for &(x, y) in &train.points {
                let u: f64 = rng.gen();
                if u < reject_ratio(y, f.get(x)) {
                    psi.push((x, y));
                }
            }
            let n_prime = psi.len();
            step.n_prime = Some(n_prime);
            if let Some(r) = rho_f {
                let n1 = p.n1 as f64;
                let np = n_prime as f64;
                e4 = Some(r >= p.alpha && (np < n1 * r / 2.0 || np > 2.0 * n1 * r));
            }
            if (n_prime as f64) < p.n1 as f64 * p.alpha / 2.0 {
                step.kind = StepKind::StopSample;
                stop = true;
            } else {
                let above_alpha = probe.map(|mu| {
                    b.iter().any(|h| {
                        mu.expect(|x, y| gen_product(residual(y, f.get(x)), h.get(x))) > p.alpha
                    })
                });
                psi.truncate(p.n0().max(1));
                let fp = oracle.learn(s, b, &Dataset::new(psi), rng)?;
                calls += 1;
                assert!(calls <= p.w_prime, "oracle call budget exceeded");
                let qf = mean(&holdout, |x, y| residual(y, f.get(x)) * fp.get(x) as f64);
                step.q_oracle = Some(qf);
                if let Some(mu) = probe {
                    let truth = mu.expect(|x, y| residual(y, f.get(x)) * fp.get(x) as f64);
                    e1 = Some(above_alpha.unwrap() && truth < p.gamma * rho_f.unwrap());
                    e2 = Some((qf - truth).abs() > p.alpha * p.gamma / 9.0);
                }
                if qf >= 4.0 * p.gamma * n_prime as f64 / (9.0 * p.n1 as f64) {
                    step.kind = StepKind::Update;
                    f = f.map(|x, u| proj_interval(u + qf * fp.get(x) as f64 / 2.0));
                } else {
                    step.kind = StepKind::StopWeak;
                    stop = true;
                }
            }
            if !stop {
                jp += 1;
            }
        }
        if let Some(mu) = probe {
            step.exact = Some(BoostExact {
                phi_before: phi_before.unwrap(),
                phi_after: Phi(&f, mu),
                rho: rho_f.unwrap(),
                e1,
                e2,
                e3: e3.unwrap(),
                e4,
            });
        }
        steps.push(step);
        if stop {
            break;
        }
        j += 1;
    }
    Ok(BoostOutput {
        model: f.sign_model(),
        raw: f,
        steps,
        oracle_calls: calls,
    })
}
