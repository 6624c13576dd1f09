//! Explicit discrete distributions over (individual, label), sampling, and
//! exact evaluation of every error functional used by the learners.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{
    gen_product, pi_proj, sign, BinClass, BinHypothesis, BinModel, IntervalPartition, Labeling,
    RealClass, RealHypothesis, RealLabel, RealModel,
};
use crate::error::{invalid, Error, Result};
use crate::io::DomainSpec;

pub const MASS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Binary,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub x: usize,
    pub y: f64,
    pub p: f64,
}

/// Finite-support joint law over X × [−1,1].
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    n: usize,
    kind: LabelKind,
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    /// Zero-mass atoms are dropped; the remaining masses must sum to 1.
    pub fn new(n: usize, kind: LabelKind, atoms: Vec<Atom>) -> Result<Self> {
        let mut kept = Vec::with_capacity(atoms.len());
        let mut total = 0.0;
        for a in atoms {
            if a.x >= n {
                return invalid(format!("atom index {} outside domain of size {n}", a.x));
            }
            if !a.p.is_finite() || a.p < 0.0 {
                return invalid(format!("atom mass {} must be nonnegative", a.p));
            }
            if !a.y.is_finite() || !(-1.0..=1.0).contains(&a.y) {
                return invalid(format!("label {} outside [-1,1]", a.y));
            }
            if kind == LabelKind::Binary && a.y != 1.0 && a.y != -1.0 {
                return invalid(format!("binary distribution has label {}", a.y));
            }
            if a.p > 0.0 {
                total += a.p;
                kept.push(a);
            }
        }
        if (total - 1.0).abs() > MASS_TOL {
            return invalid(format!("masses sum to {total}, not 1"));
        }
        Ok(DiscreteDistribution {
            n,
            kind,
            atoms: kept,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n];
        for a in &self.atoms {
            m[a.x] += a.p;
        }
        m
    }

    /// E[y | x] on the support, `None` off it.
    pub fn conditional_mean(&self) -> Vec<Option<f64>> {
        let m = self.marginal();
        let mut s = vec![0.0; self.n];
        for a in &self.atoms {
            s[a.x] += a.p * a.y;
        }
        (0..self.n)
            .map(|x| if m[x] > 0.0 { Some(s[x] / m[x]) } else { None })
            .collect()
    }

    pub fn expect(&self, mut g: impl FnMut(usize, f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.p * g(a.x, a.y)).sum()
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            domain: DomainSpec {
                size: self.n,
                names: None,
            },
            kind: self.kind,
            atoms: self.atoms.iter().map(|a| (a.x, a.y, a.p)).collect(),
        }
    }

    pub fn from_file(f: &DistributionFile) -> Result<Self> {
        Self::new(
            f.domain.size,
            f.kind,
            f.atoms.iter().map(|&(x, y, p)| Atom { x, y, p }).collect(),
        )
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash_hex(&self) -> String {
        let text = serde_json::to_string(&self.to_file()).expect("distribution serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub domain: DomainSpec,
    pub kind: LabelKind,
    pub atoms: Vec<(usize, f64, f64)>,
}

/// The ±1 law with mean `u`, as (label, mass) pairs with positive mass.
pub fn ber_star(u: f64) -> Result<Vec<(f64, f64)>> {
    if !(-1.0..=1.0).contains(&u) {
        return invalid(format!("Ber* mean {u} outside [-1,1]"));
    }
    Ok([(1.0, (1.0 + u) / 2.0), (-1.0, (1.0 - u) / 2.0)]
        .into_iter()
        .filter(|&(_, p)| p > 0.0)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum LabelLaw {
    /// y = s(x).
    Deterministic,
    /// y ∈ {±1} with E[y|x] = s(x).
    BerStar,
    /// Per-point (label, mass) lists, each with mean s(x).
    Custom(Vec<Vec<(f64, f64)>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceModel {
    s: RealHypothesis,
    law: LabelLaw,
}

impl SourceModel {
    pub fn new(s: RealHypothesis, law: LabelLaw) -> Result<Self> {
        if let LabelLaw::Custom(laws) = &law {
            if laws.len() != s.len() {
                return invalid("custom law needs one conditional law per point");
            }
            for (x, law_x) in laws.iter().enumerate() {
                let Some(sx) = s.get(x).value() else {
                    continue;
                };
                let total: f64 = law_x.iter().map(|l| l.1).sum();
                let mean: f64 = law_x.iter().map(|l| l.0 * l.1).sum();
                if (total - 1.0).abs() > MASS_TOL || law_x.iter().any(|l| l.1 < 0.0) {
                    return invalid(format!("conditional law at {x} is not a distribution"));
                }
                if (mean - sx).abs() > MASS_TOL {
                    return invalid(format!(
                        "conditional mean {mean} at {x} differs from s(x) = {sx}"
                    ));
                }
            }
        }
        Ok(SourceModel { s, law })
    }

    pub fn deterministic(s: RealHypothesis) -> Self {
        SourceModel {
            s,
            law: LabelLaw::Deterministic,
        }
    }

    pub fn ber_star(s: RealHypothesis) -> Self {
        SourceModel {
            s,
            law: LabelLaw::BerStar,
        }
    }

    pub fn source(&self) -> &RealHypothesis {
        &self.s
    }

    pub fn law(&self) -> &LabelLaw {
        &self.law
    }
}

fn check_marginal(mu_x: &[f64]) -> Result<()> {
    if mu_x.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return invalid("marginal masses must be nonnegative");
    }
    let total: f64 = mu_x.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return invalid(format!("marginal masses sum to {total}, not 1"));
    }
    Ok(())
}

pub fn make_distribution(mu_x: &[f64], source: &SourceModel) -> Result<DiscreteDistribution> {
    let n = source.s.len();
    if mu_x.len() != n {
        return invalid("marginal length must match the domain");
    }
    check_marginal(mu_x)?;
    let mut atoms = Vec::new();
    for (x, &m) in mu_x.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let Some(sx) = source.s.get(x).value() else {
            return invalid(format!("source is undefined at support point {x}"));
        };
        match &source.law {
            LabelLaw::Deterministic => atoms.push(Atom { x, y: sx, p: m }),
            LabelLaw::BerStar => {
                for (y, q) in ber_star(sx)? {
                    atoms.push(Atom { x, y, p: m * q });
                }
            }
            LabelLaw::Custom(laws) => {
                for &(y, q) in &laws[x] {
                    atoms.push(Atom { x, y, p: m * q });
                }
            }
        }
    }
    let binary = atoms.iter().all(|a| a.y == 1.0 || a.y == -1.0);
    let kind = if binary {
        LabelKind::Binary
    } else {
        LabelKind::Real
    };
    DiscreteDistribution::new(n, kind, atoms)
}

/// i.i.d. sample of (x, y) pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub points: Vec<(usize, f64)>,
}

impl Dataset {
    pub fn new(points: Vec<(usize, f64)>) -> Self {
        Dataset { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn slice(&self, start: usize, end: usize) -> Dataset {
        Dataset {
            points: self.points[start..end].to_vec(),
        }
    }

    /// Consecutive chunks of the given sizes; errors if the data runs out.
    pub fn split(&self, sizes: &[usize]) -> Result<Vec<Dataset>> {
        let need: usize = sizes.iter().sum();
        if need > self.len() {
            return invalid(format!(
                "split needs {need} points, dataset has {}",
                self.len()
            ));
        }
        let mut at = 0;
        Ok(sizes
            .iter()
            .map(|&k| {
                let d = self.slice(at, at + k);
                at += k;
                d
            })
            .collect())
    }

    /// Mean of y·f(x).
    pub fn mean_corr(&self, f: impl Fn(usize) -> f64) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().map(|&(x, y)| y * f(x)).sum::<f64>() / self.len() as f64
    }
}

pub fn sample<R: Rng + ?Sized>(dist: &DiscreteDistribution, n: usize, rng: &mut R) -> Dataset {
    if n == 0 {
        return Dataset::default();
    }
    let w = WeightedIndex::new(dist.atoms.iter().map(|a| a.p)).expect("masses are positive");
    Dataset {
        points: (0..n)
            .map(|_| {
                let a = dist.atoms[w.sample(rng)];
                (a.x, a.y)
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub stream: u64,
    pub distribution_hash: String,
    pub label_kind: LabelKind,
    pub domain_size: usize,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Serialize, Deserialize)]
struct Row {
    x_index: usize,
    y: f64,
}

pub fn write_dataset(path: &Path, data: &Dataset, meta: &DatasetMeta) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for &(x, y) in &data.points {
        w.serialize(Row { x_index: x, y })?;
    }
    if data.is_empty() {
        w.write_record(["x_index", "y"])?;
    }
    w.flush()?;
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

/// Reads the CSV and, when present, its JSON sidecar.
pub fn read_dataset(path: &Path) -> Result<(Dataset, Option<DatasetMeta>)> {
    let mut r = csv::Reader::from_path(path)?;
    let mut points = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        if !(-1.0..=1.0).contains(&row.y) {
            return invalid(format!("label {} outside [-1,1]", row.y));
        }
        points.push((row.x_index, row.y));
    }
    let side = sidecar_path(path);
    let meta = if side.exists() {
        Some(serde_json::from_str(&std::fs::read_to_string(side)?)?)
    } else {
        None
    };
    Ok((Dataset { points }, meta))
}

fn check_len(len: usize, mu: &DiscreteDistribution) -> Result<()> {
    if len != mu.n() {
        return invalid("hypothesis length must match the distribution's domain");
    }
    Ok(())
}

/// Pr[h(x) ≠ y] with STAR counted as a mistake.
pub fn class_error(h: &BinHypothesis, mu: &DiscreteDistribution) -> Result<f64> {
    check_len(h.len(), mu)?;
    if mu.kind() != LabelKind::Binary {
        return invalid("classification error needs binary labels");
    }
    Ok(mu.expect(|x, y| match h.get(x).value() {
        Some(v) if v as f64 == y => 0.0,
        _ => 1.0,
    }))
}

pub fn model_error(f: &BinModel, mu: &DiscreteDistribution) -> Result<f64> {
    class_error(&f.to_hypothesis(), mu)
}

pub fn inf_class_error(b: &BinClass, mu: &DiscreteDistribution) -> Result<f64> {
    b.require_nonempty()?;
    let mut best = f64::INFINITY;
    for h in b.iter() {
        best = best.min(class_error(h, mu)?);
    }
    Ok(best)
}

/// E[y·f(x)].
pub fn correlation(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| y * f.get(x))
}

/// E[y ⋄ b(x)].
pub fn corr_partial(b: &RealHypothesis, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| gen_product(y, b.get(x)))
}

pub fn sup_corr_partial(b: &RealClass, mu: &DiscreteDistribution) -> Result<f64> {
    b.require_nonempty()?;
    Ok(b.iter()
        .map(|h| corr_partial(h, mu))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Per point: w[x] = E[(f(x)−y)·1(x)] and a[x] = E[|f(x)−y|·1(x)].
fn residual_tables(f: &RealModel, mu: &DiscreteDistribution) -> (Vec<f64>, Vec<f64>) {
    let mut w = vec![0.0; mu.n()];
    let mut a = vec![0.0; mu.n()];
    for at in mu.atoms() {
        let r = f.get(at.x) - at.y;
        w[at.x] += at.p * r;
        a[at.x] += at.p * r.abs();
    }
    (w, a)
}

/// sup_b Σ_g sup_σ E[((f−y)·1(x∈g)·σ) ⋄ b(x)] for a grouping of points.
fn grouped_mc(
    f: &RealModel,
    b: &RealClass,
    mu: &DiscreteDistribution,
    groups: &[usize],
    ngroups: usize,
) -> Result<f64> {
    check_len(f.len(), mu)?;
    check_len(b.n(), mu)?;
    b.require_nonempty()?;
    let (w, a) = residual_tables(f, mu);
    let mut best = f64::NEG_INFINITY;
    let mut def = vec![0.0; ngroups];
    let mut undef = vec![0.0; ngroups];
    for h in b.iter() {
        def.iter_mut().for_each(|v| *v = 0.0);
        undef.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..mu.n() {
            match h.get(x) {
                RealLabel::Val(v) => def[groups[x]] += w[x] * v,
                RealLabel::Star => undef[groups[x]] += a[x],
            }
        }
        let total: f64 = def.iter().zip(&undef).map(|(d, u)| d.abs() - u).sum();
        best = best.max(total);
    }
    Ok(best)
}

/// sup over b ∈ B and σ ∈ {±1} of E[((f(x)−y)σ) ⋄ b(x)].
pub fn ma_error(f: &RealModel, b: &RealClass, mu: &DiscreteDistribution) -> Result<f64> {
    grouped_mc(f, b, mu, &vec![0; mu.n()], 1)
}

fn level_groups(f: &RealModel) -> (Vec<usize>, usize) {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let groups = f
        .values()
        .iter()
        .map(|v| {
            let next = ids.len();
            *ids.entry(v.to_bits()).or_insert(next)
        })
        .collect();
    (groups, ids.len())
}

/// Multicalibration error over the exact level sets of f.
pub fn mc_error(f: &RealModel, b: &RealClass, mu: &DiscreteDistribution) -> Result<f64> {
    let (groups, k) = level_groups(f);
    grouped_mc(f, b, mu, &groups, k)
}

/// Multicalibration error over the cells of Λ.
pub fn mc_error_lambda(
    f: &RealModel,
    b: &RealClass,
    mu: &DiscreteDistribution,
    lambda: &IntervalPartition,
) -> Result<f64> {
    let groups: Vec<usize> = f.values().iter().map(|&u| lambda.cell(u)).collect();
    grouped_mc(f, b, mu, &groups, lambda.k())
}

/// Σ_v |E[(y−f(x))·1(f(x)=v)]|.
pub fn cal_error(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    let (groups, k) = level_groups(f);
    grouped_cal(f, mu, &groups, k)
}

/// Σ_i |E[(y−f(x))·1(f(x)∈Λᵢ)]|.
pub fn cal_error_lambda(
    f: &RealModel,
    mu: &DiscreteDistribution,
    lambda: &IntervalPartition,
) -> f64 {
    let groups: Vec<usize> = f.values().iter().map(|&u| lambda.cell(u)).collect();
    grouped_cal(f, mu, &groups, lambda.k())
}

fn grouped_cal(f: &RealModel, mu: &DiscreteDistribution, groups: &[usize], k: usize) -> f64 {
    let (w, _) = residual_tables(f, mu);
    let mut per = vec![0.0; k];
    for x in 0..mu.n() {
        per[groups[x]] += w[x];
    }
    per.iter().map(|v| v.abs()).sum()
}

/// |E[(y−f(x))·sign(f(x))]|.
pub fn sign_cal_error(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| (y - f.get(x)) * sign(f.get(x)) as f64)
        .abs()
}

/// E[ℓ(y, f(x))] over a binary-label distribution.
pub fn regression_loss(
    f: &RealModel,
    loss: impl Fn(f64, f64) -> f64,
    mu: &DiscreteDistribution,
) -> Result<f64> {
    check_len(f.len(), mu)?;
    if mu.kind() != LabelKind::Binary {
        return Err(Error::Invalid("regression loss needs binary labels".into()));
    }
    Ok(mu.expect(|x, y| loss(y, f.get(x))))
}

/// E[(f(x)−y)²].
pub fn squared_error(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| (f.get(x) - y).powi(2))
}

/// φ(y,u) = ∫_y^u (π(y,t) − y) dt in closed form.
pub fn phi(y: f64, u: f64) -> f64 {
    let (lo, hi) = (y.min(0.0), y.max(0.0));
    if (lo..=hi).contains(&u) {
        0.5 * (y - u) * (y - u)
    } else if (y >= 0.0 && u > hi) || (y < 0.0 && u < lo) {
        0.0
    } else {
        0.5 * y * y - y * u
    }
}

/// Φ(f) = E[φ(y, f(x))].
#[allow(non_snake_case)]
pub fn Phi(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| phi(y, f.get(x)))
}

/// |y − π(y,u)| / |y|, zero when y = 0.
pub fn reject_ratio(y: f64, u: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        (y - pi_proj(y, u)).abs() / y.abs()
    }
}

/// ρ(f) = E[|y − π(y,f(x))| / |y|].
pub fn rho(f: &RealModel, mu: &DiscreteDistribution) -> f64 {
    mu.expect(|x, y| reject_ratio(y, f.get(x)))
}
