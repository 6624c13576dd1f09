//! Finite domains, partial hypotheses, hypothesis classes and the class-level
//! transforms (binarization, agreement, shift-scale, sign masking).

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    size: usize,
    names: Option<Vec<String>>,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return invalid("domain size must be at least 1");
        }
        Ok(Domain { size, names: None })
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return invalid("domain size must be at least 1");
        }
        Ok(Domain {
            size: names.len(),
            names: Some(names),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn name(&self, x: usize) -> String {
        match &self.names {
            Some(n) => n[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinLabel {
    Minus,
    Plus,
    Star,
}

impl BinLabel {
    pub fn from_sign(v: i8) -> Self {
        if v >= 0 {
            BinLabel::Plus
        } else {
            BinLabel::Minus
        }
    }

    pub fn value(self) -> Option<i8> {
        match self {
            BinLabel::Minus => Some(-1),
            BinLabel::Plus => Some(1),
            BinLabel::Star => None,
        }
    }

    pub fn as_real(self) -> RealLabel {
        match self.value() {
            Some(v) => RealLabel::Val(v as f64),
            None => RealLabel::Star,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RealLabel {
    Val(f64),
    Star,
}

impl RealLabel {
    pub fn value(self) -> Option<f64> {
        match self {
            RealLabel::Val(v) => Some(v),
            RealLabel::Star => None,
        }
    }

    pub fn is_star(self) -> bool {
        matches!(self, RealLabel::Star)
    }
}

/// Row length (in labels) shared by hypotheses and models.
pub trait Labeling {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Partial binary hypothesis, bit-packed: `def` marks defined points,
/// `pos` marks the +1 points (always a subset of `def`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinHypothesis {
    n: usize,
    def: Vec<u64>,
    pos: Vec<u64>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl BinHypothesis {
    pub fn from_labels(labels: &[BinLabel]) -> Self {
        let n = labels.len();
        let mut def = vec![0u64; words(n)];
        let mut pos = vec![0u64; words(n)];
        for (i, l) in labels.iter().enumerate() {
            match l {
                BinLabel::Plus => {
                    def[i / 64] |= 1 << (i % 64);
                    pos[i / 64] |= 1 << (i % 64);
                }
                BinLabel::Minus => def[i / 64] |= 1 << (i % 64),
                BinLabel::Star => {}
            }
        }
        BinHypothesis { n, def, pos }
    }

    /// Total hypothesis from ±1 values (anything ≥ 0 counts as +1).
    pub fn from_signs(signs: &[i8]) -> Self {
        let labels: Vec<BinLabel> = signs.iter().map(|&s| BinLabel::from_sign(s)).collect();
        Self::from_labels(&labels)
    }

    pub fn constant(n: usize, label: BinLabel) -> Self {
        Self::from_labels(&vec![label; n])
    }

    /// Build from 64-bit masks; requires `n <= 64`.
    pub fn from_masks(n: usize, def: u64, pos: u64) -> Self {
        assert!(n <= 64 && n > 0);
        let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let def = def & keep;
        BinHypothesis {
            n,
            def: vec![def],
            pos: vec![pos & def],
        }
    }

    pub fn get(&self, x: usize) -> BinLabel {
        let bit = 1u64 << (x % 64);
        if self.def[x / 64] & bit == 0 {
            BinLabel::Star
        } else if self.pos[x / 64] & bit != 0 {
            BinLabel::Plus
        } else {
            BinLabel::Minus
        }
    }

    pub fn labels(&self) -> Vec<BinLabel> {
        (0..self.n).map(|x| self.get(x)).collect()
    }

    pub fn is_total(&self) -> bool {
        (0..self.n).all(|x| self.get(x) != BinLabel::Star)
    }

    pub fn def_words(&self) -> &[u64] {
        &self.def
    }

    pub fn pos_words(&self) -> &[u64] {
        &self.pos
    }

    pub fn to_real(&self) -> RealHypothesis {
        RealHypothesis {
            vals: self.labels().into_iter().map(BinLabel::as_real).collect(),
        }
    }
}

impl Labeling for BinHypothesis {
    fn len(&self) -> usize {
        self.n
    }
}

/// Partial real hypothesis with values in [−1,1] or STAR.
#[derive(Clone, Debug)]
pub struct RealHypothesis {
    vals: Vec<RealLabel>,
}

fn norm_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl RealHypothesis {
    pub fn new(vals: Vec<RealLabel>) -> Result<Self> {
        let mut out = Vec::with_capacity(vals.len());
        for v in vals {
            match v {
                RealLabel::Val(u) => {
                    if !u.is_finite() || !(-1.0..=1.0).contains(&u) {
                        return invalid(format!("real label {u} outside [-1,1]"));
                    }
                    out.push(RealLabel::Val(norm_zero(u)));
                }
                RealLabel::Star => out.push(RealLabel::Star),
            }
        }
        Ok(RealHypothesis { vals: out })
    }

    pub fn from_values(vals: &[f64]) -> Result<Self> {
        Self::new(vals.iter().map(|&v| RealLabel::Val(v)).collect())
    }

    pub fn star(n: usize) -> Self {
        RealHypothesis {
            vals: vec![RealLabel::Star; n],
        }
    }

    pub fn get(&self, x: usize) -> RealLabel {
        self.vals[x]
    }

    pub fn labels(&self) -> &[RealLabel] {
        &self.vals
    }

    pub fn is_total(&self) -> bool {
        self.vals.iter().all(|v| !v.is_star())
    }

    /// Binary view when every defined value is ±1.
    pub fn as_binary(&self) -> Option<BinHypothesis> {
        let mut labels = Vec::with_capacity(self.vals.len());
        for v in &self.vals {
            labels.push(match v {
                RealLabel::Star => BinLabel::Star,
                RealLabel::Val(u) if *u == 1.0 => BinLabel::Plus,
                RealLabel::Val(u) if *u == -1.0 => BinLabel::Minus,
                _ => return None,
            });
        }
        Some(BinHypothesis::from_labels(&labels))
    }
}

impl Labeling for RealHypothesis {
    fn len(&self) -> usize {
        self.vals.len()
    }
}

impl PartialEq for RealHypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.vals.len() == other.vals.len()
            && self
                .vals
                .iter()
                .zip(&other.vals)
                .all(|(a, b)| match (a, b) {
                    (RealLabel::Star, RealLabel::Star) => true,
                    (RealLabel::Val(u), RealLabel::Val(v)) => u.to_bits() == v.to_bits(),
                    _ => false,
                })
    }
}

impl Eq for RealHypothesis {}

impl Hash for RealHypothesis {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for v in &self.vals {
            match v {
                RealLabel::Star => 2u64.hash(state),
                RealLabel::Val(u) => u.to_bits().hash(state),
            }
        }
    }
}

/// Finite, deduplicated, indexed set of hypotheses over one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Class<H> {
    domain: Domain,
    members: Vec<H>,
}

pub type BinClass = Class<BinHypothesis>;
pub type RealClass = Class<RealHypothesis>;

impl<H: Clone + Eq + Hash + Labeling> Class<H> {
    /// Keeps the first occurrence of each label array.
    pub fn new(domain: Domain, members: impl IntoIterator<Item = H>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for h in members {
            if h.len() != domain.size() {
                return invalid(format!(
                    "hypothesis has {} labels, domain has {}",
                    h.len(),
                    domain.size()
                ));
            }
            if seen.insert(h.clone()) {
                out.push(h);
            }
        }
        Ok(Class {
            domain,
            members: out,
        })
    }

    pub fn empty(domain: Domain) -> Self {
        Class {
            domain,
            members: Vec::new(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.size()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[H] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &H {
        &self.members[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, H> {
        self.members.iter()
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.members.is_empty() {
            Err(Error::EmptyClass)
        } else {
            Ok(())
        }
    }
}

impl BinClass {
    pub fn to_real(&self) -> RealClass {
        Class {
            domain: self.domain.clone(),
            members: self.members.iter().map(|h| h.to_real()).collect(),
        }
    }
}

impl RealClass {
    pub fn as_binary(&self) -> Option<BinClass> {
        let members: Option<Vec<_>> = self.members.iter().map(|h| h.as_binary()).collect();
        Some(Class {
            domain: self.domain.clone(),
            members: members?,
        })
    }

    pub fn is_total(&self) -> bool {
        self.members.iter().all(|h| h.is_total())
    }
}

/// Total binary model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinModel {
    vals: Vec<i8>,
}

impl BinModel {
    pub fn new(vals: Vec<i8>) -> Result<Self> {
        if vals.iter().any(|&v| v != 1 && v != -1) {
            return invalid("binary model values must be ±1");
        }
        Ok(BinModel { vals })
    }

    pub fn constant(n: usize, v: i8) -> Self {
        BinModel {
            vals: vec![if v >= 0 { 1 } else { -1 }; n],
        }
    }

    /// Completion of a partial hypothesis: STAR becomes `fill`.
    pub fn complete(h: &BinHypothesis, fill: i8) -> Self {
        BinModel {
            vals: h
                .labels()
                .into_iter()
                .map(|l| l.value().unwrap_or(fill))
                .collect(),
        }
    }

    pub fn get(&self, x: usize) -> i8 {
        self.vals[x]
    }

    pub fn values(&self) -> &[i8] {
        &self.vals
    }

    pub fn to_real(&self) -> RealModel {
        RealModel {
            vals: self.vals.iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn to_hypothesis(&self) -> BinHypothesis {
        BinHypothesis::from_signs(&self.vals)
    }
}

impl Labeling for BinModel {
    fn len(&self) -> usize {
        self.vals.len()
    }
}

/// Total real model with values in [−1,1].
#[derive(Clone, Debug, PartialEq)]
pub struct RealModel {
    vals: Vec<f64>,
}

impl RealModel {
    pub fn new(vals: Vec<f64>) -> Result<Self> {
        if vals
            .iter()
            .any(|v| !v.is_finite() || !(-1.0..=1.0).contains(v))
        {
            return invalid("real model values must lie in [-1,1]");
        }
        Ok(RealModel {
            vals: vals.into_iter().map(norm_zero).collect(),
        })
    }

    pub fn constant(n: usize, v: f64) -> Result<Self> {
        Self::new(vec![v; n])
    }

    pub fn zeros(n: usize) -> Self {
        RealModel { vals: vec![0.0; n] }
    }

    pub fn get(&self, x: usize) -> f64 {
        self.vals[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    /// Pointwise map followed by clamping into [−1,1].
    pub fn map(&self, mut g: impl FnMut(usize, f64) -> f64) -> RealModel {
        RealModel {
            vals: self
                .vals
                .iter()
                .enumerate()
                .map(|(x, &v)| norm_zero(proj_interval(g(x, v))))
                .collect(),
        }
    }

    pub fn sign_model(&self) -> BinModel {
        BinModel {
            vals: self.vals.iter().map(|&v| sign(v)).collect(),
        }
    }

    pub fn to_hypothesis(&self) -> RealHypothesis {
        RealHypothesis {
            vals: self.vals.iter().map(|&v| RealLabel::Val(v)).collect(),
        }
    }
}

impl Labeling for RealModel {
    fn len(&self) -> usize {
        self.vals.len()
    }
}

/// Partition of [−1,1] into k intervals: Λ₁ = [−1, −1+2/k] and
/// Λᵢ = (−1+(2i−2)/k, −1+2i/k] for i ≥ 2.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalPartition {
    k: usize,
    bps: Vec<f64>,
}

impl IntervalPartition {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("partition needs k >= 1");
        }
        let bps = (0..=k).map(|i| -1.0 + 2.0 * i as f64 / k as f64).collect();
        Ok(IntervalPartition { k, bps })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.bps
    }

    /// Zero-based index of the interval containing `u`.
    pub fn cell(&self, u: f64) -> usize {
        let upper = &self.bps[1..];
        upper.partition_point(|&b| b < u).min(self.k - 1)
    }

    /// Midpoint −1 + (2i−1)/k of the (one-based) i-th interval.
    pub fn midpoint(&self, cell: usize) -> f64 {
        -1.0 + (2 * cell + 1) as f64 / self.k as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
            return invalid("sign vector entries must be ±1");
        }
        Ok(SignVector { signs })
    }

    /// Bit i of `mask` set means σᵢ = −1; mask 0 is all +1.
    pub fn from_mask(mask: u32, k: usize) -> Self {
        SignVector {
            signs: (0..k)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.signs.len()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

pub fn sign(u: f64) -> i8 {
    if u >= 0.0 {
        1
    } else {
        -1
    }
}

/// u1 ⋄ u2: the product when u2 is defined, −|u1| when u2 is STAR.
pub fn gen_product(u1: f64, u2: RealLabel) -> f64 {
    match u2 {
        RealLabel::Val(v) => u1 * v,
        RealLabel::Star => -u1.abs(),
    }
}

pub fn binarize_hypothesis(h: &RealHypothesis, eta: f64, r: &[f64]) -> BinHypothesis {
    assert_eq!(h.len(), r.len(), "reference length must match the domain");
    let labels: Vec<BinLabel> = h
        .labels()
        .iter()
        .zip(r)
        .map(|(v, &rx)| match v {
            RealLabel::Val(u) if *u > rx + eta => BinLabel::Plus,
            RealLabel::Val(u) if *u < rx - eta => BinLabel::Minus,
            _ => BinLabel::Star,
        })
        .collect();
    BinHypothesis::from_labels(&labels)
}

pub fn binarize_class(h: &RealClass, eta: f64, r: &[f64]) -> Result<BinClass> {
    if r.len() != h.n() {
        return invalid("reference length must match the domain");
    }
    Class::new(
        h.domain().clone(),
        h.iter().map(|m| binarize_hypothesis(m, eta, r)),
    )
}

/// Constant-reference binarization H_η^θ.
pub fn binarize_class_const(h: &RealClass, eta: f64, theta: f64) -> BinClass {
    let r = vec![theta; h.n()];
    binarize_class(h, eta, &r).expect("reference matches the domain")
}

pub fn agreement(s: &BinHypothesis, b: &BinHypothesis) -> BinHypothesis {
    assert_eq!(s.n, b.n, "agreement needs a shared domain");
    let mut def = Vec::with_capacity(s.def.len());
    let mut pos = Vec::with_capacity(s.def.len());
    for w in 0..s.def.len() {
        let d = s.def[w] & b.def[w] & !(s.pos[w] ^ b.pos[w]);
        def.push(d);
        pos.push(s.pos[w] & d);
    }
    BinHypothesis { n: s.n, def, pos }
}

/// A_{S,B}: all pairwise agreements, deduplicated, in (s, b) order.
pub fn agreement_class(s: &BinClass, b: &BinClass) -> Result<BinClass> {
    if s.n() != b.n() {
        return invalid("classes live on different domains");
    }
    let mut seen = HashSet::with_capacity(s.len() * b.len());
    let mut out = Vec::new();
    for hs in s.iter() {
        for hb in b.iter() {
            let a = agreement(hs, hb);
            if seen.insert(a.clone()) {
                out.push(a);
            }
        }
    }
    Ok(Class {
        domain: s.domain().clone(),
        members: out,
    })
}

/// Agreement class of several classes: label y at x iff every member agrees on y.
pub fn multi_agreement_class(classes: &[&BinClass]) -> Result<BinClass> {
    let (first, rest) = classes
        .split_first()
        .ok_or_else(|| Error::Invalid("empty list of classes".into()))?;
    let mut acc = (*first).clone();
    for c in rest {
        acc = agreement_class(&acc, c)?;
    }
    Ok(acc)
}

/// (S−f)/2.
pub fn shift_scale_class(s: &RealClass, f: &RealModel) -> Result<RealClass> {
    if f.len() != s.n() {
        return invalid("model length must match the domain");
    }
    let members = s.iter().map(|h| RealHypothesis {
        vals: h
            .labels()
            .iter()
            .enumerate()
            .map(|(x, v)| match v {
                RealLabel::Val(u) => RealLabel::Val(norm_zero((u - f.get(x)) / 2.0)),
                RealLabel::Star => RealLabel::Star,
            })
            .collect(),
    });
    Class::new(s.domain().clone(), members)
}

pub fn chi(sigma: &SignVector, lambda: &IntervalPartition, u: f64) -> i8 {
    sigma.get(lambda.cell(u))
}

/// B_{σ,f}: member(x) = χ_σ(f(x))·b(x), STAR kept.
pub fn sigma_mask_class(
    b: &RealClass,
    sigma: &SignVector,
    f: &RealModel,
    lambda: &IntervalPartition,
) -> Result<RealClass> {
    if sigma.k() != lambda.k() {
        return invalid("sign vector length must equal the partition size");
    }
    if f.len() != b.n() {
        return invalid("model length must match the domain");
    }
    let mask: Vec<f64> = f
        .values()
        .iter()
        .map(|&u| chi(sigma, lambda, u) as f64)
        .collect();
    let members = b.iter().map(|h| RealHypothesis {
        vals: h
            .labels()
            .iter()
            .zip(&mask)
            .map(|(v, m)| match v {
                RealLabel::Val(u) => RealLabel::Val(norm_zero(u * m)),
                RealLabel::Star => RealLabel::Star,
            })
            .collect(),
    });
    Class::new(b.domain().clone(), members)
}

pub fn proj_interval(u: f64) -> f64 {
    u.clamp(-1.0, 1.0)
}

/// Projection of u onto [min(0,y), max(0,y)].
pub fn pi_proj(y: f64, u: f64) -> f64 {
    u.clamp(y.min(0.0), y.max(0.0))
}

/// Multiples of η₁ clipped to [−1,1]; sorted, contains 0.
pub fn discretize_labels(eta1: f64) -> Result<Vec<f64>> {
    if !(eta1 > 0.0 && eta1 < 1.0) {
        return invalid("discretization step must lie in (0,1)");
    }
    let kmax = (1.0 / eta1).ceil() as i64;
    let mut ys: Vec<f64> = (-kmax..=kmax)
        .map(|k| norm_zero((k as f64 * eta1).clamp(-1.0, 1.0)))
        .collect();
    ys.dedup();
    Ok(ys)
}
