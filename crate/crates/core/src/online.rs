//! Online prediction with exact expected-mistake accounting.

use serde::{Deserialize, Serialize};

use crate::dimensions::{verify_tree, MistakeTree, VersionSpace};
use crate::domain::{agreement_class, BinClass};
use crate::error::{invalid, Error, Result};

/// A learner that reports the probability of predicting +1 at a point and
/// then sees the true label.
pub trait OnlineLearner {
    fn domain_size(&self) -> usize;
    /// Probability of predicting +1 at `x`. Never changes learner state.
    fn predict(&self, x: usize) -> f64;
    fn update(&mut self, x: usize, y: i8);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSequence {
    pub points: Vec<(usize, i8)>,
    /// Name of the member that realizes the sequence, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl LabeledSequence {
    pub fn new(n: usize, points: Vec<(usize, i8)>) -> Result<Self> {
        for &(x, y) in &points {
            if x >= n {
                return invalid(format!("sequence point {x} outside a domain of size {n}"));
            }
            if y != 1 && y != -1 {
                return invalid(format!("sequence label {y} must be ±1"));
            }
        }
        Ok(LabeledSequence {
            points,
            source: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub n: usize,
    pub expected_mistakes: f64,
    pub benchmark_mistakes: usize,
    pub learner_rate: f64,
    pub benchmark_rate: f64,
    /// learner_rate − benchmark_rate; can be negative.
    pub regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub x: usize,
    pub p_plus: f64,
    pub y: i8,
    pub cum_expected_mistakes: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OnlineRun {
    pub report: RegretReport,
    pub rounds: Vec<RoundRecord>,
    pub sequence: LabeledSequence,
}

fn mistake_prob(p_plus: f64, y: i8) -> f64 {
    if y > 0 {
        1.0 - p_plus
    } else {
        p_plus
    }
}

/// Exact mistakes of every member on the sequence, STAR counted as wrong.
pub fn member_mistakes(h: &BinClass, seq: &LabeledSequence) -> Vec<usize> {
    h.iter()
        .map(|m| {
            seq.points
                .iter()
                .filter(|&&(x, y)| m.get(x).value() != Some(y))
                .count()
        })
        .collect()
}

struct Tally {
    rounds: Vec<RoundRecord>,
    points: Vec<(usize, i8)>,
    cum: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            rounds: Vec::new(),
            points: Vec::new(),
            cum: 0.0,
        }
    }

    fn play(&mut self, learner: &mut dyn OnlineLearner, x: usize, y: i8) -> f64 {
        let p = learner.predict(x);
        self.cum += mistake_prob(p, y);
        self.rounds.push(RoundRecord {
            round: self.rounds.len() + 1,
            x,
            p_plus: p,
            y,
            cum_expected_mistakes: self.cum,
        });
        self.points.push((x, y));
        learner.update(x, y);
        p
    }

    fn finish(self, benchmark: &BinClass) -> Result<OnlineRun> {
        if benchmark.is_empty() {
            return Err(Error::EmptyClass);
        }
        let sequence = LabeledSequence {
            points: self.points,
            source: None,
        };
        let best = member_mistakes(benchmark, &sequence)
            .into_iter()
            .min()
            .unwrap();
        let n = sequence.len();
        let rate = |v: f64| if n == 0 { 0.0 } else { v / n as f64 };
        let learner_rate = rate(self.cum);
        let benchmark_rate = rate(best as f64);
        Ok(OnlineRun {
            report: RegretReport {
                n,
                expected_mistakes: self.cum,
                benchmark_mistakes: best,
                learner_rate,
                benchmark_rate,
                regret: learner_rate - benchmark_rate,
            },
            rounds: self.rounds,
            sequence,
        })
    }
}

/// Feeds `seq` to the learner and compares against the best member of
/// `benchmark`.
pub fn run_sequence(
    learner: &mut dyn OnlineLearner,
    seq: &LabeledSequence,
    benchmark: &BinClass,
) -> Result<OnlineRun> {
    if benchmark.n() != learner.domain_size() {
        return invalid("benchmark and learner live on different domains");
    }
    let mut t = Tally::new();
    for &(x, y) in &seq.points {
        if x >= benchmark.n() {
            return invalid(format!("sequence point {x} outside the domain"));
        }
        t.play(learner, x, y);
    }
    let mut run = t.finish(benchmark)?;
    run.sequence.source = seq.source.clone();
    Ok(run)
}

/// Standard optimal algorithm over a binary class: keep the members that
/// match every label so far and predict the label whose restriction has
/// the larger Littlestone dimension.
#[derive(Clone)]
pub struct Soa {
    n: usize,
    space: VersionSpace,
    next: Vec<f64>,
}

impl Soa {
    pub fn new(h: &BinClass) -> Result<Self> {
        h.require_nonempty()?;
        let mut s = Soa {
            n: h.n(),
            space: VersionSpace::new(h)?,
            next: Vec::new(),
        };
        s.refresh();
        Ok(s)
    }

    /// Indices of the members consistent with the history.
    pub fn version_space(&self) -> Vec<usize> {
        self.space.members()
    }

    fn refresh(&mut self) {
        self.next = (0..self.n)
            .map(|x| {
                let plus = self.space.restricted_ldim(x, 1);
                let minus = self.space.restricted_ldim(x, -1);
                match (plus, minus) {
                    (_, None) => 1.0,
                    (None, Some(_)) => 0.0,
                    (Some(a), Some(b)) => {
                        if a >= b {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            })
            .collect();
    }
}

impl OnlineLearner for Soa {
    fn domain_size(&self) -> usize {
        self.n
    }

    fn predict(&self, x: usize) -> f64 {
        self.next[x]
    }

    fn update(&mut self, x: usize, y: i8) {
        if self.space.size() == 0 {
            return;
        }
        self.space.restrict(x, y);
        self.refresh();
    }
}

/// Randomized weighted majority over a finite binary class with a fixed
/// learning rate.
#[derive(Clone, Debug)]
pub struct Rwm {
    class: BinClass,
    eta: f64,
    losses: Vec<u64>,
}

impl Rwm {
    /// Learning rate √(8 ln|H| / n) for horizon n.
    pub fn new(h: &BinClass, horizon: usize) -> Result<Self> {
        h.require_nonempty()?;
        let eta = if horizon == 0 {
            0.0
        } else {
            (8.0 * (h.len() as f64).ln() / horizon as f64).sqrt()
        };
        Self::with_rate(h, eta)
    }

    pub fn with_rate(h: &BinClass, eta: f64) -> Result<Self> {
        h.require_nonempty()?;
        if !(eta >= 0.0 && eta.is_finite()) {
            return invalid("learning rate must be finite and nonnegative");
        }
        Ok(Rwm {
            class: h.clone(),
            eta,
            losses: vec![0; h.len()],
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn class(&self) -> &BinClass {
        &self.class
    }

    /// Regret-rate bound √(ln|H| / (2n)).
    pub fn regret_bound(class_size: usize, horizon: usize) -> f64 {
        if horizon == 0 {
            return 0.0;
        }
        ((class_size as f64).ln() / (2.0 * horizon as f64)).sqrt()
    }
}

impl OnlineLearner for Rwm {
    fn domain_size(&self) -> usize {
        self.class.n()
    }

    fn predict(&self, x: usize) -> f64 {
        let min = *self.losses.iter().min().unwrap();
        let (mut plus, mut total) = (0.0, 0.0);
        for (h, &l) in self.class.iter().zip(&self.losses) {
            let Some(v) = h.get(x).value() else { continue };
            let w = (-self.eta * (l - min) as f64).exp();
            total += w;
            if v > 0 {
                plus += w;
            }
        }
        if total == 0.0 {
            0.5
        } else {
            plus / total
        }
    }

    fn update(&mut self, x: usize, y: i8) {
        for (h, l) in self.class.iter().zip(self.losses.iter_mut()) {
            if h.get(x).value() != Some(y) {
                *l += 1;
            }
        }
    }
}

/// Comparative online learner: weighted majority over the agreement class.
pub fn comp_online(s: &BinClass, b: &BinClass, horizon: usize) -> Result<Rwm> {
    s.require_nonempty()?;
    b.require_nonempty()?;
    Rwm::new(&agreement_class(s, b)?, horizon)
}

/// Adversary that walks a mistake tree shattered by every given class,
/// always labelling against the learner's more likely prediction.
#[derive(Clone, Debug)]
pub struct TreeAdversary {
    tree: MistakeTree,
}

impl TreeAdversary {
    pub fn new(classes: &[&BinClass], tree: MistakeTree) -> Result<Self> {
        if classes.is_empty() || !verify_tree(classes, &tree) {
            return invalid("mistake tree is not shattered by every class");
        }
        Ok(TreeAdversary { tree })
    }

    pub fn depth(&self) -> usize {
        self.tree.depth
    }

    pub fn play(&self, learner: &mut dyn OnlineLearner, benchmark: &BinClass) -> Result<OnlineRun> {
        let mut t = Tally::new();
        let mut node = 0;
        for _ in 0..self.tree.depth {
            let x = self.tree.nodes[node];
            if x >= learner.domain_size() {
                return invalid("tree point outside the learner's domain");
            }
            let y = if learner.predict(x) >= 0.5 { -1 } else { 1 };
            t.play(learner, x, y);
            node = MistakeTree::child(node, y);
        }
        t.finish(benchmark)
    }
}
