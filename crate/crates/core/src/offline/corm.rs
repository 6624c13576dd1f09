//! Correlation maximization by rejection sampling into comparative learning.

use std::collections::HashMap;

use rand::Rng as _;

use crate::domain::{
    binarize_class_const, discretize_labels, sign, BinClass, BinModel, IntervalPartition,
    RealClass, RealModel,
};
use crate::error::{invalid, Error, Result};
use crate::offline::erm::ComparativeLearner;
use crate::rng::Rng;
use crate::stat_model::Dataset;

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Keeps each point with |y| > η with probability |y|, relabelled sign(y).
/// One uniform is drawn per input point.
pub fn rejection_sample(data: &Dataset, eta: f64, rng: &mut Rng) -> Dataset {
    let mut out = Vec::new();
    for &(x, y) in &data.points {
        let u: f64 = rng.gen();
        if y.abs() > eta && u < y.abs() {
            out.push((x, sign(y) as f64));
        }
    }
    Dataset::new(out)
}

fn check_data(n: usize, data: &Dataset) -> Result<()> {
    for &(x, y) in &data.points {
        if x >= n {
            return invalid(format!("data point {x} outside a domain of size {n}"));
        }
        if !(-1.0..=1.0).contains(&y) {
            return invalid(format!("label {y} outside [-1,1]"));
        }
    }
    Ok(())
}

fn learn_or_fixed(l: &ComparativeLearner, psi: &Dataset) -> Result<BinModel> {
    if psi.is_empty() {
        Ok(BinModel::constant(l.domain_size(), 1))
    } else {
        l.learn(psi)
    }
}

/// Deterministic-label correlation maximization against a binary benchmark.
pub fn dcorm_binary_b(
    s: &RealClass,
    b: &BinClass,
    data: &Dataset,
    eta: f64,
    rng: &mut Rng,
) -> Result<BinModel> {
    if s.n() != b.n() {
        return invalid("classes live on different domains");
    }
    if eta < 0.0 {
        return invalid("η must be nonnegative");
    }
    check_data(s.n(), data)?;
    let l = ComparativeLearner::new(&binarize_class_const(s, eta, 0.0), b)?;
    learn_or_fixed(&l, &rejection_sample(data, eta, rng))
}

/// Largest t with (2t+1)·η₂ < 1.
pub fn max_threshold_index(eta2: f64) -> Result<usize> {
    if !(eta2 > 0.0 && eta2 < 1.0) {
        return invalid("η₂ must lie in (0,1)");
    }
    let mut t = 0usize;
    while (2.0 * (t + 1) as f64 + 1.0) * eta2 < 1.0 {
        t += 1;
    }
    Ok(t)
}

/// B_{η₂}^{2η₂j} for j = −t..t.
pub fn threshold_classes(b: &RealClass, eta2: f64, t: usize) -> Vec<BinClass> {
    let t = t as i64;
    (-t..=t)
        .map(|j| binarize_class_const(b, eta2, 2.0 * eta2 * j as f64))
        .collect()
}

/// Q_f = mean of y·f(x) over a holdout.
pub fn holdout_q(f: &BinModel, data: &Dataset) -> f64 {
    data.mean_corr(|x| f.get(x) as f64)
}

/// Index of the first candidate with the largest holdout correlation.
fn select(cands: &[BinModel], holdout: &Dataset) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, f) in cands.iter().enumerate() {
        let q = holdout_q(f, holdout);
        if q > best.1 {
            best = (i, q);
        }
    }
    best.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct DcormParams {
    pub eta1: f64,
    pub eta2: f64,
    /// Size of the training part; the rest of the data is the holdout.
    pub n1: usize,
    /// Threshold index bound; the largest admissible value when absent.
    pub t: Option<usize>,
}

impl DcormParams {
    fn resolve_t(&self) -> Result<usize> {
        let tmax = max_threshold_index(self.eta2)?;
        match self.t {
            Some(t) if t > tmax => {
                invalid(format!("t = {t} exceeds the largest admissible {tmax}"))
            }
            Some(t) => Ok(t),
            None => Ok(tmax),
        }
    }
}

struct Thresholded {
    learners: Vec<ComparativeLearner>,
}

impl Thresholded {
    fn new(s: &RealClass, b: &RealClass, eta1: f64, eta2: f64, t: usize) -> Result<Self> {
        if s.n() != b.n() {
            return invalid("classes live on different domains");
        }
        let s_bin = binarize_class_const(s, eta1, 0.0);
        let learners = threshold_classes(b, eta2, t)
            .iter()
            .map(|bj| ComparativeLearner::new(&s_bin, bj))
            .collect::<Result<_>>()?;
        Ok(Thresholded { learners })
    }

    fn models(&self, psi: &Dataset) -> Result<Vec<BinModel>> {
        self.learners
            .iter()
            .map(|l| learn_or_fixed(l, psi))
            .collect()
    }
}

/// Deterministic-label correlation maximization against a real benchmark.
pub fn dcorm_real(
    s: &RealClass,
    b: &RealClass,
    data: &Dataset,
    p: &DcormParams,
    rng: &mut Rng,
) -> Result<BinModel> {
    let t = p.resolve_t()?;
    if p.n1 > data.len() {
        return invalid("training split exceeds the data size");
    }
    check_data(s.n(), data)?;
    let th = Thresholded::new(s, b, p.eta1, p.eta2, t)?;
    let train = data.slice(0, p.n1);
    let holdout = data.slice(p.n1, data.len());
    let psi = rejection_sample(&train, p.eta1, rng);
    let n = s.n();
    let mut cands = vec![BinModel::constant(n, -1)];
    cands.extend(th.models(&psi)?);
    cands.push(BinModel::constant(n, 1));
    Ok(cands.swap_remove(select(&cands, &holdout)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CormParams {
    pub eta1: f64,
    pub eta2: f64,
    pub n1: usize,
    pub t: Option<usize>,
    /// Label grid Y; multiples of η₁ in [−1,1] when absent.
    pub labels: Option<Vec<f64>>,
    pub cap: u128,
}

/// |Y|^{n₁}, saturating.
pub fn enumeration_count(ylen: usize, n1: usize) -> u128 {
    let mut c: u128 = 1;
    for _ in 0..n1 {
        c = c.saturating_mul(ylen as u128);
    }
    c
}

/// Correlation maximization for general labels by enumerating label vectors.
///
/// All label vectors share one uniform per training index for the rejection
/// step, and identical rejection samples share their learned models.
pub fn corm_general(
    s: &RealClass,
    b: &RealClass,
    data: &Dataset,
    p: &CormParams,
    rng: &mut Rng,
) -> Result<BinModel> {
    let ys = match &p.labels {
        Some(ys) if ys.is_empty() => return invalid("label grid is empty"),
        Some(ys) if ys.iter().any(|y| !(-1.0..=1.0).contains(y)) => {
            return invalid("label grid must lie in [-1,1]")
        }
        Some(ys) => ys.clone(),
        None => discretize_labels(p.eta1)?,
    };
    let count = enumeration_count(ys.len(), p.n1);
    if count > p.cap {
        return Err(Error::EnumerationCapExceeded { count, cap: p.cap });
    }
    let t = DcormParams {
        eta1: p.eta1,
        eta2: p.eta2,
        n1: p.n1,
        t: p.t,
    }
    .resolve_t()?;
    if p.n1 > data.len() {
        return invalid("training split exceeds the data size");
    }
    check_data(s.n(), data)?;
    let th = Thresholded::new(s, b, p.eta1, p.eta2, t)?;
    let train = data.slice(0, p.n1);
    let holdout = data.slice(p.n1, data.len());
    let u: Vec<f64> = (0..p.n1).map(|_| rng.gen()).collect();
    let n = s.n();

    let mut best = BinModel::constant(n, 1);
    let mut best_q = holdout_q(&best, &holdout);
    let minus = BinModel::constant(n, -1);
    let q = holdout_q(&minus, &holdout);
    if q > best_q {
        best = minus;
        best_q = q;
    }
    let mut seen: HashMap<Vec<(usize, i8)>, ()> = HashMap::new();
    let mut digits = vec![0usize; p.n1];
    loop {
        let psi: Vec<(usize, i8)> = (0..p.n1)
            .filter(|&i| u[i] < ys[digits[i]].abs())
            .map(|i| (train.points[i].0, sign(ys[digits[i]])))
            .collect();
        if seen.insert(psi.clone(), ()).is_none() {
            let psi = Dataset::new(psi.into_iter().map(|(x, y)| (x, y as f64)).collect());
            for f in th.models(&psi)? {
                let q = holdout_q(&f, &holdout);
                if q > best_q {
                    best = f;
                    best_q = q;
                }
            }
        }
        // Mixed-radix increment, first index fastest.
        let mut i = 0;
        while i < p.n1 {
            digits[i] += 1;
            if digits[i] < ys.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == p.n1 {
            break;
        }
    }
    Ok(best)
}

/// Snaps every value to the midpoint of its cell.
pub fn round_model(f: &RealModel, lambda: &IntervalPartition) -> RealModel {
    f.map(|_, u| lambda.midpoint(lambda.cell(u)))
}
