//! Finite-class empirical risk minimization and the agreement reduction.

use crate::domain::{agreement_class, multi_agreement_class, BinClass, BinModel};
use crate::error::{invalid, Error, Result};
use crate::stat_model::Dataset;

/// Per-point label counts of a binary dataset, stored as bit planes.
struct Counts {
    words: usize,
    plus: Vec<Vec<u64>>,
    minus: Vec<Vec<u64>>,
    total: usize,
}

impl Counts {
    fn new(n: usize, data: &Dataset) -> Result<Self> {
        let mut plus = vec![0usize; n];
        let mut minus = vec![0usize; n];
        for &(x, y) in &data.points {
            if x >= n {
                return invalid(format!("data point {x} outside a domain of size {n}"));
            }
            if y == 1.0 {
                plus[x] += 1;
            } else if y == -1.0 {
                minus[x] += 1;
            } else {
                return invalid(format!("binary label {y} must be ±1"));
            }
        }
        let words = n.div_ceil(64).max(1);
        Ok(Counts {
            words,
            plus: planes(&plus, words),
            minus: planes(&minus, words),
            total: data.len(),
        })
    }

    /// Number of points on which `h` does not output the observed label.
    fn mistakes(&self, def: &[u64], pos: &[u64]) -> usize {
        let mut hit = 0usize;
        for (k, plane) in self.plus.iter().enumerate() {
            let c: u32 = (0..self.words)
                .map(|w| (plane[w] & pos[w]).count_ones())
                .sum();
            hit += (c as usize) << k;
        }
        for (k, plane) in self.minus.iter().enumerate() {
            let c: u32 = (0..self.words)
                .map(|w| (plane[w] & def[w] & !pos[w]).count_ones())
                .sum();
            hit += (c as usize) << k;
        }
        self.total - hit
    }
}

fn planes(counts: &[usize], words: usize) -> Vec<Vec<u64>> {
    let max = counts.iter().copied().max().unwrap_or(0);
    let bits = (usize::BITS - max.leading_zeros()) as usize;
    let mut out = vec![vec![0u64; words]; bits];
    for (x, &c) in counts.iter().enumerate() {
        for (k, plane) in out.iter_mut().enumerate() {
            if c >> k & 1 == 1 {
                plane[x / 64] |= 1 << (x % 64);
            }
        }
    }
    out
}

/// Empirical mistake count of every member, STAR counted as a mistake.
pub fn empirical_errors(h: &BinClass, data: &Dataset) -> Result<Vec<usize>> {
    let counts = Counts::new(h.n(), data)?;
    Ok(h.iter()
        .map(|m| counts.mistakes(m.def_words(), m.pos_words()))
        .collect())
}

/// Index of the first member with the fewest empirical mistakes, and that count.
pub fn erm_index(h: &BinClass, data: &Dataset) -> Result<(usize, usize)> {
    h.require_nonempty()?;
    let errs = empirical_errors(h, data)?;
    let mut best = (0, errs[0]);
    for (i, &e) in errs.iter().enumerate().skip(1) {
        if e < best.1 {
            best = (i, e);
        }
    }
    Ok(best)
}

pub fn erm_agnostic(h: &BinClass, data: &Dataset) -> Result<BinModel> {
    let (i, _) = erm_index(h, data)?;
    Ok(BinModel::complete(h.get(i), 1))
}

pub fn erm_realizable(h: &BinClass, data: &Dataset) -> Result<BinModel> {
    let (i, e) = erm_index(h, data)?;
    if e > 0 {
        return Err(Error::NoConsistentHypothesis);
    }
    Ok(BinModel::complete(h.get(i), 1))
}

/// Agnostic ERM over the agreement class A_{S,B}.
pub fn comparative_learn(s: &BinClass, b: &BinClass, data: &Dataset) -> Result<BinModel> {
    ComparativeLearner::new(s, b)?.learn(data)
}

/// Agnostic ERM over the agreement class of several classes.
pub fn agreement_learn(classes: &[&BinClass], data: &Dataset) -> Result<BinModel> {
    for c in classes {
        c.require_nonempty()?;
    }
    erm_agnostic(&multi_agreement_class(classes)?, data)
}

/// Comparative learner with its agreement class built once.
#[derive(Clone, Debug)]
pub struct ComparativeLearner {
    agreement: BinClass,
}

impl ComparativeLearner {
    pub fn new(s: &BinClass, b: &BinClass) -> Result<Self> {
        s.require_nonempty()?;
        b.require_nonempty()?;
        Ok(ComparativeLearner {
            agreement: agreement_class(s, b)?,
        })
    }

    pub fn agreement(&self) -> &BinClass {
        &self.agreement
    }

    pub fn learn(&self, data: &Dataset) -> Result<BinModel> {
        erm_agnostic(&self.agreement, data)
    }

    pub fn domain_size(&self) -> usize {
        self.agreement.n()
    }
}

/// Advisory sample size for agnostic ERM over a finite class:
/// n ≥ 2·ln(2|H|/δ)/ε².
pub fn erm_sample_size(class_size: usize, eps: f64, delta: f64) -> Result<usize> {
    if class_size == 0 {
        return Err(Error::EmptyClass);
    }
    if !(eps > 0.0 && delta > 0.0 && delta < 1.0) {
        return invalid("sample planner needs ε > 0 and δ in (0,1)");
    }
    Ok((2.0 * (2.0 * class_size as f64 / delta).ln() / (eps * eps)).ceil() as usize)
}

/// Advisory sample size for the rejection-sampling correlation learner on
/// top of agreement ERM. The supremum over ε′ ≥ ε of (ε′/ε)·n_ERM(ε′/4, δ/2)
/// is attained at ε′ = ε for the log|H| bound.
pub fn rejection_sample_size(agreement_size: usize, eps: f64, delta: f64) -> Result<usize> {
    erm_sample_size(agreement_size, eps / 4.0, delta / 2.0)
}
