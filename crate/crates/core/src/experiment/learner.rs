//! Learners the estimator can run against a task.

use std::fmt;
use std::str::FromStr;

use crate::domain::{binarize_class_const, BinClass, RealHypothesis, RealModel};
use crate::error::{invalid, Error, Result};
use crate::experiment::scenario::TaskSpec;
use crate::offline::{dcorm_real, erm_agnostic, ComparativeLearner, DcormParams};
use crate::rng::Rng;
use crate::stat_model::Dataset;

/// Largest |S|·|B| for which the agreement class is materialized.
pub const AGREEMENT_CAP: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub enum LearnerKind {
    /// Ignores the data and outputs this constant.
    Constant(f64),
    /// Agnostic ERM over the agreement class of the sign-binarized classes.
    Comparative,
    /// Agnostic ERM over the sign-binarized benchmark class.
    BenchmarkErm,
    /// Deterministic-label correlation maximization; half the data trains.
    Dcorm { eta1: f64, eta2: f64 },
    /// Constant 2·mean(y·b₀(x)) for the first benchmark member b₀.
    Moment,
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerKind::Constant(v) => write!(f, "const:{v:+}"),
            LearnerKind::Comparative => f.write_str("comp"),
            LearnerKind::BenchmarkErm => f.write_str("erm"),
            LearnerKind::Dcorm { eta1, eta2 } => write!(f, "dcorm:{eta1}:{eta2}"),
            LearnerKind::Moment => f.write_str("moment"),
        }
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    /// `const:<v>`, `comp`, `erm`, `dcorm[:<η1>:<η2>]` or `moment`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("bad number {t:?} in learner {s:?}")))
        };
        match parts.as_slice() {
            ["const", v] => {
                let v = num(v)?;
                if !(-1.0..=1.0).contains(&v) {
                    return invalid("constant learner value must lie in [-1,1]");
                }
                Ok(LearnerKind::Constant(v))
            }
            ["comp"] => Ok(LearnerKind::Comparative),
            ["erm"] => Ok(LearnerKind::BenchmarkErm),
            ["dcorm"] => Ok(LearnerKind::Dcorm {
                eta1: 0.0,
                eta2: 0.25,
            }),
            ["dcorm", a, b] => Ok(LearnerKind::Dcorm {
                eta1: num(a)?,
                eta2: num(b)?,
            }),
            ["moment"] => Ok(LearnerKind::Moment),
            _ => invalid(format!("unknown learner {s:?}")),
        }
    }
}

enum Prepared {
    Constant(f64),
    Comparative(ComparativeLearner),
    Erm(BinClass),
    Dcorm(DcormParams),
    Moment(RealHypothesis),
}

/// A learner bound to one task, with its per-task state built once.
pub struct Learner {
    kind: LearnerKind,
    spec: TaskSpec,
    prepared: Prepared,
}

impl Learner {
    pub fn new(kind: &LearnerKind, spec: &TaskSpec) -> Result<Self> {
        let prepared = match kind {
            LearnerKind::Constant(v) => Prepared::Constant(*v),
            LearnerKind::Comparative => {
                let pairs = spec.s.len().saturating_mul(spec.b.len());
                if pairs > AGREEMENT_CAP {
                    return Err(Error::Guard(format!(
                        "agreement class of {pairs} pairs exceeds the cap of {AGREEMENT_CAP}"
                    )));
                }
                Prepared::Comparative(ComparativeLearner::new(
                    &binarize_class_const(&spec.s, 0.0, 0.0),
                    &binarize_class_const(&spec.b, 0.0, 0.0),
                )?)
            }
            LearnerKind::BenchmarkErm => Prepared::Erm(binarize_class_const(&spec.b, 0.0, 0.0)),
            LearnerKind::Dcorm { eta1, eta2 } => {
                let p = DcormParams {
                    eta1: *eta1,
                    eta2: *eta2,
                    n1: 0,
                    t: None,
                };
                crate::offline::max_threshold_index(*eta2)?;
                Prepared::Dcorm(p)
            }
            LearnerKind::Moment => Prepared::Moment(spec.b.get(0).clone()),
        };
        Ok(Learner {
            kind: kind.clone(),
            spec: spec.clone(),
            prepared,
        })
    }

    pub fn kind(&self) -> &LearnerKind {
        &self.kind
    }

    pub fn learn(&self, data: &Dataset, rng: &mut Rng) -> Result<RealModel> {
        let n = self.spec.n();
        match &self.prepared {
            Prepared::Constant(v) => RealModel::constant(n, *v),
            Prepared::Comparative(l) => Ok(l.learn(&signs(data))?.to_real()),
            Prepared::Erm(b) => Ok(erm_agnostic(b, &signs(data))?.to_real()),
            Prepared::Dcorm(p) => {
                let p = DcormParams {
                    n1: data.len().div_ceil(2),
                    ..p.clone()
                };
                Ok(dcorm_real(&self.spec.s, &self.spec.b, data, &p, rng)?.to_real())
            }
            Prepared::Moment(b0) => {
                if data.is_empty() {
                    return RealModel::constant(n, 0.0);
                }
                let mut sum = 0.0;
                for &(x, y) in &data.points {
                    let Some(v) = b0.get(x).value() else {
                        return invalid("moment learner needs a total benchmark member");
                    };
                    sum += y * v;
                }
                RealModel::constant(n, (2.0 * sum / data.len() as f64).clamp(-1.0, 1.0))
            }
        }
    }
}

fn signs(data: &Dataset) -> Dataset {
    Dataset::new(
        data.points
            .iter()
            .map(|&(x, y)| (x, if y >= 0.0 { 1.0 } else { -1.0 }))
            .collect(),
    )
}

/// Learner used for a scenario direction when none is named.
pub fn default_learner(
    name: crate::experiment::scenario::ScenarioName,
    direction: crate::experiment::scenario::Direction,
) -> LearnerKind {
    use crate::experiment::scenario::{Direction::*, ScenarioName::*};
    match (name, direction) {
        (Figure1, _) => LearnerKind::Constant(1.0),
        (C1, Forward) => LearnerKind::Constant(-1.0),
        (C2, Forward) => LearnerKind::Constant(1.0),
        (C3, Forward) => LearnerKind::Constant(0.0),
        (C1, Reversed) => LearnerKind::BenchmarkErm,
        (C3, Reversed) => LearnerKind::Comparative,
        (C2, Reversed) => LearnerKind::Dcorm {
            eta1: 0.0,
            eta2: 0.25,
        },
        (C4, _) => LearnerKind::Moment,
    }
}
