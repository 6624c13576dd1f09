//! Task specifications and the constructions used to probe them.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::domain::{Class, Domain, RealClass, RealHypothesis, RealModel};
use crate::error::{invalid, Error, Result};
use crate::offline::LossFunction;
use crate::rng::Rng;
use crate::stat_model::{
    correlation, ma_error, make_distribution, mc_error, regression_loss, sup_corr_partial,
    DiscreteDistribution, SourceModel,
};

/// Largest size parameter for which scenario classes are enumerated.
pub const MAX_SCENARIO_M: usize = 4;
/// Slack allowed when comparing exact goal values.
pub const GOAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    CompL,
    CorM,
    DCorM,
    Ma,
    Mc,
    CompR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reversed,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Reversed => "reversed",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "reversed" => Ok(Direction::Reversed),
            other => invalid(format!("unknown direction {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    Figure1,
    C1,
    C2,
    C3,
    C4,
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioName::Figure1 => "figure1",
            ScenarioName::C1 => "c1",
            ScenarioName::C2 => "c2",
            ScenarioName::C3 => "c3",
            ScenarioName::C4 => "c4",
        })
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "figure1" => Ok(ScenarioName::Figure1),
            "c1" => Ok(ScenarioName::C1),
            "c2" => Ok(ScenarioName::C2),
            "c3" => Ok(ScenarioName::C3),
            "c4" => Ok(ScenarioName::C4),
            other => invalid(format!("unknown scenario {other:?}")),
        }
    }
}

/// How labels are drawn given the source value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Deterministic,
    BerStar,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Marginal {
    /// Distribution-specific task with this μ|_X.
    Fixed(Vec<f64>),
    /// Distribution-free task.
    Free,
}

#[derive(Clone, Debug)]
pub struct TaskSpec {
    pub name: String,
    pub task: TaskKind,
    /// Source class: every admissible μ is realized by one of its members.
    pub s: RealClass,
    /// Benchmark class.
    pub b: RealClass,
    pub loss: Option<LossFunction>,
    pub law: LawKind,
    pub marginal: Marginal,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalCheck {
    pub value: f64,
    pub target: f64,
    pub pass: bool,
}

fn at_most(value: f64, target: f64) -> GoalCheck {
    GoalCheck {
        value,
        target,
        pass: value <= target + GOAL_TOL,
    }
}

fn at_least(value: f64, target: f64) -> GoalCheck {
    GoalCheck {
        value,
        target,
        pass: value >= target - GOAL_TOL,
    }
}

/// Flat Dirichlet draw on `support`.
fn random_marginal(n: usize, support: &[usize], rng: &mut Rng) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let mut total = 0.0;
    for &x in support {
        let e = -(1.0 - rng.gen::<f64>()).ln();
        w[x] = e;
        total += e;
    }
    w.iter_mut().for_each(|v| *v /= total);
    w
}

impl TaskSpec {
    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn validate(&self) -> Result<()> {
        if self.s.n() != self.b.n() {
            return invalid("source and benchmark live on different domains");
        }
        self.s.require_nonempty()?;
        self.b.require_nonempty()?;
        if !(self.eps >= 0.0 && (0.0..1.0).contains(&self.delta)) {
            return invalid("goal needs ε ≥ 0 and δ in [0,1)");
        }
        if self.task == TaskKind::CompR && (self.loss.is_none() || !self.b.is_total()) {
            return invalid("regression tasks need a loss and a total benchmark");
        }
        if let Marginal::Fixed(m) = &self.marginal {
            if m.len() != self.n() {
                return invalid("fixed marginal must match the domain");
            }
        }
        Ok(())
    }

    fn source_model(&self, i: usize) -> SourceModel {
        let s = self.s.get(i).clone();
        match self.law {
            LawKind::Deterministic => SourceModel::deterministic(s),
            LawKind::BerStar => SourceModel::ber_star(s),
        }
    }

    fn defined_points(&self, i: usize) -> Vec<usize> {
        let s = self.s.get(i);
        (0..self.n())
            .filter(|&x| s.get(x).value().is_some())
            .collect()
    }

    /// Marginals tried against source `i` in adversarial mode: the fixed
    /// one, or else uniform on the defined points, every point mass and
    /// `random` flat Dirichlet draws.
    fn marginals_for(&self, i: usize, random: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
        let n = self.n();
        match &self.marginal {
            Marginal::Fixed(m) => {
                let ok = m
                    .iter()
                    .enumerate()
                    .all(|(x, &p)| p == 0.0 || self.s.get(i).get(x).value().is_some());
                if ok {
                    vec![m.clone()]
                } else {
                    Vec::new()
                }
            }
            Marginal::Free => {
                let def = self.defined_points(i);
                if def.is_empty() {
                    return Vec::new();
                }
                let mut out = Vec::new();
                let mut uni = vec![0.0; n];
                def.iter().for_each(|&x| uni[x] = 1.0 / def.len() as f64);
                out.push(uni);
                for &x in &def {
                    let mut point = vec![0.0; n];
                    point[x] = 1.0;
                    out.push(point);
                }
                out.extend((0..random).map(|_| random_marginal(n, &def, rng)));
                out
            }
        }
    }

    /// Enumerated family for adversarial estimation. When more than `cap`
    /// source members exist, a seeded random subset of `cap` members is used.
    pub fn enumerate(
        &self,
        random_marginals: usize,
        cap: usize,
        rng: &mut Rng,
    ) -> Result<Vec<DiscreteDistribution>> {
        let members: Vec<usize> = if self.s.len() > cap {
            let mut v = index::sample(rng, self.s.len(), cap).into_vec();
            v.sort_unstable();
            v
        } else {
            (0..self.s.len()).collect()
        };
        let mut out = Vec::new();
        for i in members {
            let src = self.source_model(i);
            for m in self.marginals_for(i, random_marginals, rng) {
                out.push(make_distribution(&m, &src)?);
            }
        }
        if out.is_empty() {
            return invalid("no source member is defined on the marginal's support");
        }
        Ok(out)
    }

    /// One admissible distribution: a uniformly random source member and,
    /// for distribution-free tasks, a flat Dirichlet marginal on its
    /// defined points.
    pub fn draw(&self, rng: &mut Rng) -> Result<DiscreteDistribution> {
        for _ in 0..1000 {
            let i = rng.gen_range(0..self.s.len());
            let m = match &self.marginal {
                Marginal::Fixed(m) => {
                    if m.iter()
                        .enumerate()
                        .any(|(x, &p)| p > 0.0 && self.s.get(i).get(x).value().is_none())
                    {
                        continue;
                    }
                    m.clone()
                }
                Marginal::Free => {
                    let def = self.defined_points(i);
                    if def.is_empty() {
                        continue;
                    }
                    random_marginal(self.n(), &def, rng)
                }
            };
            return make_distribution(&m, &self.source_model(i));
        }
        Err(Error::RetryCapExceeded(1000))
    }

    /// Exact check of the task goal for model `f` under `mu`.
    pub fn goal(&self, f: &RealModel, mu: &DiscreteDistribution) -> Result<GoalCheck> {
        Ok(match self.task {
            TaskKind::CompL => {
                let err = mu.expect(|x, y| (f.get(x) != y) as u8 as f64);
                let best = self
                    .b
                    .iter()
                    .map(|b| mu.expect(|x, y| (b.get(x).value() != Some(y)) as u8 as f64))
                    .fold(f64::INFINITY, f64::min);
                at_most(err, best + self.eps)
            }
            TaskKind::CorM | TaskKind::DCorM => at_least(
                correlation(f, mu),
                sup_corr_partial(&self.b, mu)? - self.eps,
            ),
            TaskKind::Ma => at_most(ma_error(f, &self.b, mu)?, self.eps),
            TaskKind::Mc => at_most(mc_error(f, &self.b, mu)?, self.eps),
            TaskKind::CompR => {
                let loss = self.loss.as_ref().expect("validated");
                let value = regression_loss(f, |y, u| loss.eval(y, u), mu)?;
                let mut best = f64::INFINITY;
                for b in self.b.iter() {
                    let vals: Vec<f64> = b.labels().iter().map(|l| l.value().unwrap()).collect();
                    let bm = RealModel::new(vals)?;
                    best = best.min(regression_loss(&bm, |y, u| loss.eval(y, u), mu)?);
                }
                at_most(value, best + self.eps)
            }
        })
    }
}

fn guard_m(m: usize) -> Result<()> {
    if m == 0 {
        return invalid("scenario size m must be positive");
    }
    if m > MAX_SCENARIO_M {
        return Err(Error::Guard(format!(
            "scenario classes are enumerated only for m ≤ {MAX_SCENARIO_M}, got {m}"
        )));
    }
    Ok(())
}

fn class_of(domain: Domain, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<RealClass> {
    let members = rows
        .into_iter()
        .map(|r| RealHypothesis::from_values(&r))
        .collect::<Result<Vec<_>>>()?;
    Class::new(domain, members)
}

/// All vectors in {lo, hi}^n, bit x of the index selecting hi at x.
fn cube(n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..1u64 << n)
        .map(|mask| {
            (0..n)
                .map(|x| if mask >> x & 1 == 1 { hi } else { lo })
                .collect()
        })
        .collect()
}

fn exactly_k_ones(n: usize, k: u32) -> Vec<Vec<f64>> {
    (0..1u64 << n)
        .filter(|mask| mask.count_ones() == k)
        .map(|mask| {
            (0..n)
                .map(|x| if mask >> x & 1 == 1 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect()
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Figure-one pair on 2m points: S is +1 on the first half, B is +1 on the
/// second half, and both are arbitrary elsewhere.
pub fn figure1_classes(m: usize) -> Result<(RealClass, RealClass)> {
    guard_m(m)?;
    let n = 2 * m;
    let half = cube(m, -1.0, 1.0);
    let s = half.iter().map(|t| [vec![1.0; m], t.clone()].concat());
    let b = half.iter().map(|t| [t.clone(), vec![1.0; m]].concat());
    Ok((class_of(Domain::new(n)?, s)?, class_of(Domain::new(n)?, b)?))
}

/// Point order of the c4 domain: ⊥ first, then a_{ij} at 1 + (i−1)m + (j−1).
pub fn c4_point(m: usize, i: usize, j: usize) -> usize {
    1 + (i - 1) * m + (j - 1)
}

pub fn c4_marginal(m: usize) -> Vec<f64> {
    let mut mu = vec![1.0 / (8.0 * m as f64); 4 * m + 1];
    mu[0] = 0.5;
    mu
}

/// The ⊥/a_ij construction: S = {s_h}, B = {b_{p,r}}.
pub fn c4_classes(m: usize) -> Result<(RealClass, RealClass)> {
    guard_m(m)?;
    let n = 4 * m + 1;
    let mut names = vec!["bot".to_string()];
    for i in 1..=4 {
        for j in 1..=m {
            names.push(format!("a{i}_{j}"));
        }
    }
    let signs = cube(m, -1.0, 1.0);
    let s = signs.iter().map(|h| {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for j in 1..=m {
            let hj = h[j - 1];
            v[c4_point(m, 1, j)] = (hj + 2.0) / 3.0;
            v[c4_point(m, 2, j)] = (-hj + 2.0) / 3.0;
            v[c4_point(m, 3, j)] = (hj - 2.0) / 3.0;
            v[c4_point(m, 4, j)] = (-hj - 2.0) / 3.0;
        }
        v
    });
    let mut b = Vec::new();
    for p in &signs {
        for r in &signs {
            let mut v = vec![0.0; n];
            for j in 1..=m {
                v[c4_point(m, 1, j)] = r[j - 1];
                v[c4_point(m, 2, j)] = p[j - 1];
                v[c4_point(m, 3, j)] = -r[j - 1];
                v[c4_point(m, 4, j)] = -p[j - 1];
            }
            b.push(v);
        }
    }
    Ok((
        class_of(Domain::with_names(names.clone())?, s)?,
        class_of(Domain::with_names(names)?, b)?,
    ))
}

/// E_{μX}[s(x)b(x)] for every (s, b) pair of total classes.
pub fn pair_correlations(s: &RealClass, b: &RealClass, mu_x: &[f64]) -> Result<Vec<Vec<f64>>> {
    if !s.is_total() || !b.is_total() || mu_x.len() != s.n() || s.n() != b.n() {
        return invalid("pair correlations need total classes on the marginal's domain");
    }
    Ok(s.iter()
        .map(|sh| {
            b.iter()
                .map(|bh| {
                    (0..s.n())
                        .map(|x| mu_x[x] * sh.get(x).value().unwrap() * bh.get(x).value().unwrap())
                        .sum()
                })
                .collect()
        })
        .collect())
}

/// The named construction at size `m` in the given direction. The reversed
/// direction swaps the source and benchmark classes.
pub fn scenario(
    name: ScenarioName,
    m: usize,
    direction: Direction,
    eps: f64,
    delta: f64,
) -> Result<TaskSpec> {
    guard_m(m)?;
    let fwd = direction == Direction::Forward;
    let (s, b, task, loss, law, marginal) = match name {
        ScenarioName::Figure1 => {
            let (s, b) = figure1_classes(m)?;
            (
                s,
                b,
                TaskKind::CompL,
                None,
                LawKind::Deterministic,
                Marginal::Free,
            )
        }
        ScenarioName::C1 => {
            let n = 4 * m;
            let s = class_of(Domain::new(n)?, exactly_k_ones(n, m as u32))?;
            let b = class_of(Domain::new(n)?, exactly_k_ones(n, 2 * m as u32))?;
            (
                s,
                b,
                TaskKind::CompL,
                None,
                LawKind::Deterministic,
                Marginal::Fixed(uniform(n)),
            )
        }
        ScenarioName::C2 => {
            let n = 2 * m;
            let s = class_of(Domain::new(n)?, cube(n, 0.0, 1.0))?;
            let b = class_of(Domain::new(n)?, cube(n, -1.0, 1.0))?;
            if fwd {
                (s, b, TaskKind::CorM, None, LawKind::BerStar, Marginal::Free)
            } else {
                (
                    s,
                    b,
                    TaskKind::DCorM,
                    None,
                    LawKind::Deterministic,
                    Marginal::Fixed(uniform(n)),
                )
            }
        }
        ScenarioName::C3 => {
            let s = class_of(Domain::new(m)?, cube(m, -0.5, 0.5))?;
            let b = class_of(Domain::new(m)?, cube(m, -1.0, 1.0))?;
            let loss = Some(LossFunction::squared());
            if fwd {
                (
                    s,
                    b,
                    TaskKind::CompR,
                    loss,
                    LawKind::BerStar,
                    Marginal::Free,
                )
            } else {
                (
                    s,
                    b,
                    TaskKind::CompR,
                    loss,
                    LawKind::BerStar,
                    Marginal::Fixed(uniform(m)),
                )
            }
        }
        ScenarioName::C4 => {
            let (s, b) = c4_classes(m)?;
            (
                s,
                b,
                TaskKind::Mc,
                None,
                LawKind::BerStar,
                Marginal::Fixed(c4_marginal(m)),
            )
        }
    };
    // The c4 forward task learns with B as the source class.
    let swap = if name == ScenarioName::C4 { fwd } else { !fwd };
    let (s, b) = if swap { (b, s) } else { (s, b) };
    let spec = TaskSpec {
        name: format!("{name}-{direction}-m{m}"),
        task,
        s,
        b,
        loss,
        law,
        marginal,
        eps,
        delta,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn constant(n: usize, v: f64) -> RealModel {
        RealModel::constant(n, v).unwrap()
    }

    #[test]
    fn class_sizes() {
        let (s, b) = figure1_classes(3).unwrap();
        assert_eq!((s.len(), b.len(), s.n()), (8, 8, 6));
        let c1 = scenario(ScenarioName::C1, 2, Direction::Forward, 0.1, 0.25).unwrap();
        assert_eq!((c1.s.len(), c1.b.len()), (28, 70));
        let rev = scenario(ScenarioName::C1, 2, Direction::Reversed, 0.1, 0.25).unwrap();
        assert_eq!((rev.s.len(), rev.b.len()), (70, 28));
        let (s4, b4) = c4_classes(2).unwrap();
        assert_eq!((s4.len(), b4.len(), s4.n()), (4, 16, 9));
        assert!((c4_marginal(3).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(matches!(
            scenario(ScenarioName::C2, 5, Direction::Forward, 0.1, 0.1),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn c1_constant_minus_matches_the_benchmark() {
        let spec = scenario(ScenarioName::C1, 1, Direction::Forward, 0.0, 0.0).unwrap();
        let fam = spec
            .enumerate(0, usize::MAX, &mut rng::stream(0, 0))
            .unwrap();
        assert_eq!(fam.len(), 4);
        for mu in &fam {
            let g = spec.goal(&constant(4, -1.0), mu).unwrap();
            assert!((g.value - 0.25).abs() < 1e-12);
            assert!((g.target - 0.25).abs() < 1e-12);
            assert!(g.pass);
        }
    }

    #[test]
    fn forward_constants_pass_every_enumerated_distribution() {
        let cases = [
            (ScenarioName::Figure1, 1.0),
            (ScenarioName::C2, 1.0),
            (ScenarioName::C3, 0.0),
        ];
        for (name, v) in cases {
            for m in 1..=3 {
                let spec = scenario(name, m, Direction::Forward, 0.0, 0.0).unwrap();
                let fam = spec
                    .enumerate(8, usize::MAX, &mut rng::stream(1, m as u64))
                    .unwrap();
                for mu in &fam {
                    assert!(
                        spec.goal(&constant(spec.n(), v), mu).unwrap().pass,
                        "{name} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn c4_correlation_does_not_depend_on_the_source() {
        let m = 3;
        let (s, b) = c4_classes(m).unwrap();
        let table = pair_correlations(&s, &b, &c4_marginal(m)).unwrap();
        for (k, bh) in b.iter().enumerate() {
            let sum: f64 = (1..=m)
                .map(|j| {
                    bh.get(c4_point(m, 1, j)).value().unwrap()
                        + bh.get(c4_point(m, 2, j)).value().unwrap()
                })
                .sum();
            let expect = sum * 4.0 / 3.0 / (8.0 * m as f64);
            for row in &table {
                assert!((row[k] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn draws_are_admissible_and_reproducible() {
        let spec = scenario(ScenarioName::Figure1, 2, Direction::Forward, 0.0, 0.1).unwrap();
        let a = spec.draw(&mut rng::stream(3, 0)).unwrap();
        let b = spec.draw(&mut rng::stream(3, 0)).unwrap();
        assert_eq!(a, b);
        assert!((a.marginal().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
