//! Exact brute-force dimensions: (mutual) VC, fat-shattering and Littlestone
//! dimensions, dual packing/covering numbers, and a random-code packing.

use std::collections::{HashMap, HashSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::domain::{
    binarize_class_const, BinClass, BinLabel, BinModel, Labeling, RealClass, RealLabel,
};
use crate::error::{invalid, Error, Result};
use crate::rng;

pub const MAX_SUBSET: usize = 30;
pub const MAX_MASK_DOMAIN: usize = 64;
pub const LDIM_MAX_CLASS: usize = 4096;
pub const LDIM_MAX_DOMAIN: usize = 24;
pub const PACKING_EXACT_MAX: usize = 24;
pub const COVERING_EXACT_MAX: usize = 20;
pub const GV_MAX_CANDIDATES: usize = 4096;

/// Mistake tree in heap order: node i has children 2i+1 (label −1) and
/// 2i+2 (label +1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MistakeTree {
    pub depth: usize,
    pub nodes: Vec<usize>,
}

impl MistakeTree {
    pub fn child(node: usize, y: i8) -> usize {
        if y < 0 {
            2 * node + 1
        } else {
            2 * node + 2
        }
    }

    /// The (x, y) sequence along the path labelled by the low `depth` bits
    /// of `mask` (bit i set means the i-th label is +1).
    pub fn path(&self, mask: u64) -> Vec<(usize, i8)> {
        let mut node = 0;
        let mut out = Vec::with_capacity(self.depth);
        for i in 0..self.depth {
            let y = if mask >> i & 1 == 1 { 1 } else { -1 };
            out.push((self.nodes[node], y));
            node = Self::child(node, y);
        }
        out
    }

    fn well_formed(&self, n: usize) -> bool {
        self.depth < 63
            && self.nodes.len() == (1usize << self.depth) - 1
            && self.nodes.iter().all(|&x| x < n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionResult {
    /// `None` means UNDEFINED (some class is empty).
    pub value: Option<usize>,
    pub witness: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<MistakeTree>,
}

impl DimensionResult {
    pub fn undefined() -> Self {
        DimensionResult {
            value: None,
            witness: Vec::new(),
            references: Vec::new(),
            tree: None,
        }
    }

    fn with_witness(witness: Vec<usize>) -> Self {
        DimensionResult {
            value: Some(witness.len()),
            witness,
            references: Vec::new(),
            tree: None,
        }
    }
}

fn floor_log2(v: usize) -> usize {
    if v == 0 {
        0
    } else {
        (usize::BITS - 1 - v.leading_zeros()) as usize
    }
}

fn same_domain(a: usize, b: usize) -> Result<()> {
    if a != b {
        return invalid("classes live on different domains");
    }
    Ok(())
}

fn check_subset(n: usize, subset: &[usize]) -> Result<()> {
    if subset.len() > MAX_SUBSET {
        return Err(Error::Guard(format!(
            "subset of {} points exceeds the limit of {MAX_SUBSET}",
            subset.len()
        )));
    }
    let mut seen = HashSet::new();
    for &x in subset {
        if x >= n {
            return invalid(format!("point {x} outside domain of size {n}"));
        }
        if !seen.insert(x) {
            return invalid(format!("point {x} repeated in subset"));
        }
    }
    Ok(())
}

/// Every ±1 labeling of `subset` is realized by some member. STAR never
/// matches a defined label, and the empty class shatters nothing.
pub fn is_shattered(h: &BinClass, subset: &[usize]) -> Result<bool> {
    check_subset(h.n(), subset)?;
    let d = subset.len();
    let need = 1usize << d;
    if h.len() < need {
        return Ok(false);
    }
    let mut seen = vec![false; need];
    let mut count = 0;
    'members: for m in h.iter() {
        let mut p = 0usize;
        for (i, &x) in subset.iter().enumerate() {
            match m.get(x) {
                BinLabel::Plus => p |= 1 << i,
                BinLabel::Minus => {}
                BinLabel::Star => continue 'members,
            }
        }
        if !seen[p] {
            seen[p] = true;
            count += 1;
            if count == need {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

type Masks = Vec<(u64, u64)>;

fn masks(h: &BinClass) -> Result<Masks> {
    if h.n() > MAX_MASK_DOMAIN {
        return Err(Error::Guard(format!(
            "domain of size {} exceeds the limit of {MAX_MASK_DOMAIN}",
            h.n()
        )));
    }
    Ok(h.iter()
        .map(|m| (m.def_words()[0], m.pos_words()[0]))
        .collect())
}

fn extract(v: u64, points: &[usize]) -> usize {
    points
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (((v >> x) & 1) as usize) << i)
}

fn shatters(ms: &[(u64, u64)], points: &[usize]) -> bool {
    let need = 1usize << points.len();
    if ms.len() < need {
        return false;
    }
    let t: u64 = points.iter().fold(0, |acc, &x| acc | 1 << x);
    let mut seen = vec![false; need];
    let mut count = 0;
    for &(def, pos) in ms {
        if def & t == t {
            let p = extract(pos, points);
            if !seen[p] {
                seen[p] = true;
                count += 1;
                if count == need {
                    return true;
                }
            }
        }
    }
    false
}

/// Level-wise search over a downward-closed family of subsets. Returns the
/// first member of the largest nonempty level, or `None` if even the empty
/// set fails `pred`.
fn levelwise(n: usize, max_d: usize, mut pred: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    if !pred(&[]) {
        return None;
    }
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for d in 1..=max_d.min(n) {
        let keys: HashSet<u64> = current
            .iter()
            .map(|t| t.iter().fold(0u64, |a, &x| a | 1 << x))
            .collect();
        let mut next = Vec::new();
        for t in &current {
            let start = t.last().map_or(0, |&l| l + 1);
            let base: u64 = t.iter().fold(0, |a, &x| a | 1 << x);
            for x in start..n {
                let cand = base | 1 << x;
                let closed = d == 1 || t.iter().all(|&y| keys.contains(&(cand & !(1u64 << y))));
                if !closed {
                    continue;
                }
                let mut pts = t.clone();
                pts.push(x);
                if pred(&pts) {
                    next.push(pts);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        current = next;
    }
    current.into_iter().next()
}

pub fn vc(h: &BinClass) -> Result<DimensionResult> {
    if h.is_empty() {
        return Ok(DimensionResult::undefined());
    }
    let ms = masks(h)?;
    let max_d = floor_log2(h.len()).min(MAX_SUBSET);
    Ok(levelwise(h.n(), max_d, |t| shatters(&ms, t))
        .map(DimensionResult::with_witness)
        .unwrap_or_else(DimensionResult::undefined))
}

/// Largest subset shattered by both classes.
pub fn mutual_vc(s: &BinClass, b: &BinClass) -> Result<DimensionResult> {
    same_domain(s.n(), b.n())?;
    if s.is_empty() || b.is_empty() {
        return Ok(DimensionResult::undefined());
    }
    let ms = masks(s)?;
    let mb = masks(b)?;
    let max_d = floor_log2(s.len().min(b.len())).min(MAX_SUBSET);
    Ok(
        levelwise(s.n(), max_d, |t| shatters(&ms, t) && shatters(&mb, t))
            .map(DimensionResult::with_witness)
            .unwrap_or_else(DimensionResult::undefined),
    )
}

/// ξ(x)(h(x) − r(x)) > η on `subset` is realizable for every ξ.
pub fn is_fat_shattered(h: &RealClass, subset: &[usize], eta: f64, r: &[f64]) -> Result<bool> {
    if r.len() != h.n() {
        return invalid("reference length must match the domain");
    }
    let bin = crate::domain::binarize_class(h, eta, r)?;
    is_shattered(&bin, subset)
}

/// Candidate reference values at one point: the breakpoints v ± η of the
/// defined values, midpoints between consecutive breakpoints, and one point
/// beyond each end.
pub fn candidate_references(h: &RealClass, x: usize, eta: f64) -> Vec<f64> {
    let mut bps: Vec<f64> = h
        .iter()
        .filter_map(|m| m.get(x).value())
        .flat_map(|v| [v - eta, v + eta])
        .collect();
    if bps.is_empty() {
        return vec![0.0];
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut out = Vec::with_capacity(2 * bps.len() + 1);
    out.push(bps[0] - 1.0);
    for w in bps.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*bps.last().unwrap());
    out.push(bps.last().unwrap() + 1.0);
    out
}

/// One binarized column at a point: member bitsets for "defined" and "+1".
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Column {
    def: Vec<u64>,
    pos: Vec<u64>,
}

impl Column {
    fn dominated_by(&self, other: &Column) -> bool {
        self.def
            .iter()
            .zip(&other.def)
            .zip(self.pos.iter().zip(&other.pos))
            .all(|((d, od), (p, op))| d & !od == 0 && (p ^ op) & d == 0)
    }

    fn get(&self, m: usize) -> Option<bool> {
        let bit = 1u64 << (m % 64);
        if self.def[m / 64] & bit == 0 {
            None
        } else {
            Some(self.pos[m / 64] & bit != 0)
        }
    }
}

/// Distinct, undominated columns at each point, each with one reference.
fn fat_columns(h: &RealClass, eta: f64) -> Vec<Vec<(f64, Column)>> {
    let words = h.len().div_ceil(64).max(1);
    (0..h.n())
        .map(|x| {
            let mut seen = HashSet::new();
            let mut cols: Vec<(f64, Column)> = Vec::new();
            for r in candidate_references(h, x, eta) {
                let mut c = Column {
                    def: vec![0; words],
                    pos: vec![0; words],
                };
                for (m, hm) in h.iter().enumerate() {
                    if let RealLabel::Val(v) = hm.get(x) {
                        if v > r + eta {
                            c.def[m / 64] |= 1 << (m % 64);
                            c.pos[m / 64] |= 1 << (m % 64);
                        } else if v < r - eta {
                            c.def[m / 64] |= 1 << (m % 64);
                        }
                    }
                }
                if seen.insert(c.clone()) {
                    cols.push((r, c));
                }
            }
            let keep: Vec<bool> = (0..cols.len())
                .map(|i| !(0..cols.len()).any(|j| j != i && cols[i].1.dominated_by(&cols[j].1)))
                .collect();
            cols.into_iter()
                .zip(keep)
                .filter_map(|(c, k)| k.then_some(c))
                .collect()
        })
        .collect()
}

/// Searches reference choices for `points`; returns the per-point
/// references of the first choice that fat-shatters them.
fn fat_shatter_refs(
    members: usize,
    cols: &[Vec<(f64, Column)>],
    points: &[usize],
) -> Option<Vec<f64>> {
    let d = points.len();
    let need = 1usize << d;
    if members < need {
        return None;
    }
    let radix: Vec<usize> = points.iter().map(|&x| cols[x].len()).collect();
    let mut choice = vec![0usize; d];
    let mut seen = vec![false; need];
    loop {
        seen.iter_mut().for_each(|s| *s = false);
        let mut count = 0;
        'members: for m in 0..members {
            let mut p = 0usize;
            for (i, &x) in points.iter().enumerate() {
                match cols[x][choice[i]].1.get(m) {
                    Some(true) => p |= 1 << i,
                    Some(false) => {}
                    None => continue 'members,
                }
            }
            if !seen[p] {
                seen[p] = true;
                count += 1;
            }
        }
        if count == need {
            return Some(
                points
                    .iter()
                    .zip(&choice)
                    .map(|(&x, &c)| cols[x][c].0)
                    .collect(),
            );
        }
        let mut i = 0;
        loop {
            if i == d {
                return None;
            }
            choice[i] += 1;
            if choice[i] < radix[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn fat_search(classes: &[(&RealClass, f64)]) -> Result<DimensionResult> {
    let n = classes[0].0.n();
    for (c, eta) in classes {
        same_domain(n, c.n())?;
        if !(*eta >= 0.0) {
            return invalid("margin must be nonnegative");
        }
    }
    if n > MAX_MASK_DOMAIN {
        return Err(Error::Guard(format!(
            "domain of size {n} exceeds the limit of {MAX_MASK_DOMAIN}"
        )));
    }
    if classes.iter().any(|(c, _)| c.is_empty()) {
        return Ok(DimensionResult::undefined());
    }
    let cols: Vec<_> = classes
        .iter()
        .map(|(c, eta)| fat_columns(c, *eta))
        .collect();
    let max_d = classes
        .iter()
        .map(|(c, _)| floor_log2(c.len()))
        .min()
        .unwrap()
        .min(MAX_SUBSET);
    let witness = levelwise(n, max_d, |t| {
        classes
            .iter()
            .zip(&cols)
            .all(|((c, _), col)| fat_shatter_refs(c.len(), col, t).is_some())
    });
    let Some(witness) = witness else {
        return Ok(DimensionResult::undefined());
    };
    let references = classes
        .iter()
        .zip(&cols)
        .map(|((c, _), col)| {
            let local = fat_shatter_refs(c.len(), col, &witness).expect("witness re-verifies");
            let mut r = vec![0.0; n];
            for (&x, v) in witness.iter().zip(local) {
                r[x] = v;
            }
            r
        })
        .collect();
    let mut out = DimensionResult::with_witness(witness);
    out.references = references;
    Ok(out)
}

pub fn fat(h: &RealClass, eta: f64) -> Result<DimensionResult> {
    fat_search(&[(h, eta)])
}

/// Largest subset η-fat-shattered by both classes, each with its own reference.
pub fn mutual_fat(s: &RealClass, b: &RealClass, eta: f64) -> Result<DimensionResult> {
    fat_search(&[(s, eta), (b, eta)])
}

/// Margin η₁ for S and η₂ for B.
pub fn mutual_fat2(s: &RealClass, b: &RealClass, eta1: f64, eta2: f64) -> Result<DimensionResult> {
    fat_search(&[(s, eta1), (b, eta2)])
}

/// Candidate constant references for a whole class.
pub fn candidate_thresholds(b: &RealClass, eta: f64) -> Vec<f64> {
    let mut bps: Vec<f64> = b
        .iter()
        .flat_map(|m| {
            m.labels()
                .iter()
                .filter_map(|l| l.value())
                .collect::<Vec<_>>()
        })
        .flat_map(|v| [v - eta, v + eta])
        .collect();
    if bps.is_empty() {
        return vec![0.0];
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut out = vec![bps[0] - 1.0];
    for w in bps.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*bps.last().unwrap());
    out.push(bps.last().unwrap() + 1.0);
    out
}

/// sup over θ of VC(S_bin, B_{η}^{θ}).
pub fn sup_theta_mutual_vc(s_bin: &BinClass, b: &RealClass, eta: f64) -> Result<DimensionResult> {
    same_domain(s_bin.n(), b.n())?;
    let mut best = DimensionResult::undefined();
    let mut seen = HashSet::new();
    for theta in candidate_thresholds(b, eta) {
        let bt = binarize_class_const(b, eta, theta);
        if !seen.insert(bt.members().to_vec()) {
            continue;
        }
        let r = mutual_vc(s_bin, &bt)?;
        if r.value > best.value {
            best = r;
            best.references = vec![vec![theta; b.n()]];
        }
    }
    Ok(best)
}

fn bitset_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bitset_count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

fn full_bitset(len: usize) -> Vec<u64> {
    let mut v = vec![u64::MAX; len.div_ceil(64)];
    if len % 64 != 0 {
        *v.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
    }
    v
}

/// Per-point member bitsets for the +1 and −1 labels.
fn label_sets(h: &BinClass) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let words = h.len().div_ceil(64).max(1);
    let mut plus = vec![vec![0u64; words]; h.n()];
    let mut minus = vec![vec![0u64; words]; h.n()];
    for (m, hm) in h.iter().enumerate() {
        for (x, (p, q)) in plus.iter_mut().zip(minus.iter_mut()).enumerate() {
            match hm.get(x) {
                BinLabel::Plus => p[m / 64] |= 1 << (m % 64),
                BinLabel::Minus => q[m / 64] |= 1 << (m % 64),
                BinLabel::Star => {}
            }
        }
    }
    (plus, minus)
}

fn ldim_guard(h: &BinClass) -> Result<()> {
    if h.len() > LDIM_MAX_CLASS || h.n() > LDIM_MAX_DOMAIN {
        return Err(Error::Guard(format!(
            "Littlestone search limited to {LDIM_MAX_CLASS} members on {LDIM_MAX_DOMAIN} points, got {} on {}",
            h.len(),
            h.n()
        )));
    }
    Ok(())
}

/// Memoized Littlestone recursion over one or two version spaces.
#[derive(Clone)]
struct Ldim {
    n: usize,
    sets: Vec<(Vec<Vec<u64>>, Vec<Vec<u64>>)>,
    words: Vec<usize>,
    memo: HashMap<Vec<u64>, usize>,
}

impl Ldim {
    fn new(classes: &[&BinClass]) -> Self {
        Ldim {
            n: classes[0].n(),
            sets: classes.iter().map(|c| label_sets(c)).collect(),
            words: classes
                .iter()
                .map(|c| c.len().div_ceil(64).max(1))
                .collect(),
            memo: HashMap::new(),
        }
    }

    fn full(&self, classes: &[&BinClass]) -> Vec<u64> {
        classes
            .iter()
            .zip(&self.words)
            .flat_map(|(c, &w)| {
                let mut v = full_bitset(c.len());
                v.resize(w, 0);
                v
            })
            .collect()
    }

    fn parts<'a>(&self, v: &'a [u64]) -> Vec<&'a [u64]> {
        let mut out = Vec::with_capacity(self.words.len());
        let mut at = 0;
        for &w in &self.words {
            out.push(&v[at..at + w]);
            at += w;
        }
        out
    }

    /// Restrictions of every version space to label y at x, concatenated,
    /// plus the smallest part size.
    fn restrict(&self, v: &[u64], x: usize, y: i8) -> (Vec<u64>, usize) {
        let mut out = Vec::with_capacity(v.len());
        let mut min = usize::MAX;
        for (part, (plus, minus)) in self.parts(v).into_iter().zip(&self.sets) {
            let lab = if y > 0 { &plus[x] } else { &minus[x] };
            let r = bitset_and(part, lab);
            min = min.min(bitset_count(&r));
            out.extend(r);
        }
        (out, min)
    }

    fn min_count(&self, v: &[u64]) -> usize {
        self.parts(v).into_iter().map(bitset_count).min().unwrap()
    }

    fn value(&mut self, v: &[u64]) -> usize {
        let c = self.min_count(v);
        if c <= 1 {
            return 0;
        }
        if let Some(&d) = self.memo.get(v) {
            return d;
        }
        let bound = floor_log2(c);
        let mut best = 0;
        for x in 0..self.n {
            let (vp, cp) = self.restrict(v, x, 1);
            let (vm, cm) = self.restrict(v, x, -1);
            if cp == 0 || cm == 0 || 1 + floor_log2(cp.min(cm)) <= best {
                continue;
            }
            let (small, large) = if cp <= cm { (vp, vm) } else { (vm, vp) };
            let a = self.value(&small);
            if 1 + a <= best {
                continue;
            }
            let b = self.value(&large);
            best = best.max(1 + a.min(b));
            if best == bound {
                break;
            }
        }
        self.memo.insert(v.to_vec(), best);
        best
    }

    fn build(&mut self, v: &[u64], d: usize, node: usize, nodes: &mut [usize]) {
        if d == 0 {
            return;
        }
        for x in 0..self.n {
            let (vp, cp) = self.restrict(v, x, 1);
            let (vm, cm) = self.restrict(v, x, -1);
            if cp == 0 || cm == 0 {
                continue;
            }
            if self.value(&vp) + 1 >= d && self.value(&vm) + 1 >= d {
                nodes[node] = x;
                self.build(&vm, d - 1, MistakeTree::child(node, -1), nodes);
                self.build(&vp, d - 1, MistakeTree::child(node, 1), nodes);
                return;
            }
        }
        unreachable!("a version space of Littlestone dimension {d} has a splitting point");
    }
}

/// Version space of one class, with memoized Littlestone values of its
/// one-point restrictions.
#[derive(Clone)]
pub(crate) struct VersionSpace {
    ldim: Ldim,
    v: Vec<u64>,
}

impl VersionSpace {
    pub(crate) fn new(h: &BinClass) -> Result<Self> {
        ldim_guard(h)?;
        let ldim = Ldim::new(&[h]);
        let v = ldim.full(&[h]);
        Ok(VersionSpace { ldim, v })
    }

    pub(crate) fn size(&self) -> usize {
        bitset_count(&self.v)
    }

    pub(crate) fn members(&self) -> Vec<usize> {
        (0..self.v.len() * 64)
            .filter(|&i| self.v[i / 64] >> (i % 64) & 1 == 1)
            .collect()
    }

    /// Littlestone dimension of the members labelling x with y, or None
    /// when there are none.
    pub(crate) fn restricted_ldim(&mut self, x: usize, y: i8) -> Option<usize> {
        let (r, c) = self.ldim.restrict(&self.v, x, y);
        (c > 0).then(|| self.ldim.value(&r))
    }

    pub(crate) fn restrict(&mut self, x: usize, y: i8) {
        self.v = self.ldim.restrict(&self.v, x, y).0;
    }
}

fn ldim_of(classes: &[&BinClass]) -> Result<DimensionResult> {
    for c in classes {
        ldim_guard(c)?;
        same_domain(classes[0].n(), c.n())?;
    }
    if classes.iter().any(|c| c.is_empty()) {
        return Ok(DimensionResult::undefined());
    }
    let mut l = Ldim::new(classes);
    let root = l.full(classes);
    let d = l.value(&root);
    let mut nodes = vec![0usize; (1usize << d) - 1];
    l.build(&root, d, 0, &mut nodes);
    Ok(DimensionResult {
        value: Some(d),
        witness: Vec::new(),
        references: Vec::new(),
        tree: Some(MistakeTree { depth: d, nodes }),
    })
}

pub fn ldim(h: &BinClass) -> Result<DimensionResult> {
    ldim_of(&[h])
}

/// Depth of the deepest mistake tree shattered by both classes.
pub fn mutual_ldim(s: &BinClass, b: &BinClass) -> Result<DimensionResult> {
    ldim_of(&[s, b])
}

/// Every root-to-leaf labeling is realized by some member of every class.
pub fn verify_tree(classes: &[&BinClass], tree: &MistakeTree) -> bool {
    let Some(first) = classes.first() else {
        return false;
    };
    if !tree.well_formed(first.n()) {
        return false;
    }
    (0..1u64 << tree.depth).all(|mask| {
        let path = tree.path(mask);
        classes.iter().all(|c| {
            c.iter()
                .any(|h| path.iter().all(|&(x, y)| h.get(x).value() == Some(y)))
        })
    })
}

fn check_total(c: &RealClass, what: &str) -> Result<()> {
    if !c.is_total() {
        return invalid(format!("{what} must be total for packing and covering"));
    }
    Ok(())
}

/// d(s₁,s₂) = sup_b |E_{μX}[(s₁ − s₂)·b]| for all pairs of members of S.
pub fn dual_distances(s: &RealClass, b: &RealClass, mu_x: &[f64]) -> Result<Vec<Vec<f64>>> {
    same_domain(s.n(), b.n())?;
    if mu_x.len() != s.n() {
        return invalid("marginal length must match the domain");
    }
    check_total(s, "source class")?;
    check_total(b, "benchmark class")?;
    b.require_nonempty()?;
    let vals: Vec<Vec<f64>> = s
        .iter()
        .map(|h| h.labels().iter().map(|l| l.value().unwrap()).collect())
        .collect();
    let bvals: Vec<Vec<f64>> = b
        .iter()
        .map(|h| h.labels().iter().map(|l| l.value().unwrap()).collect())
        .collect();
    let k = s.len();
    let mut d = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let dist = bvals
                .iter()
                .map(|bv| {
                    (0..s.n())
                        .map(|x| mu_x[x] * (vals[i][x] - vals[j][x]) * bv[x])
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max);
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetResult {
    pub value: usize,
    pub members: Vec<usize>,
    pub exact: bool,
}

fn max_clique(adj: &[u32], cand: u32, cur: u32, best: &mut u32) {
    if cand == 0 {
        if cur.count_ones() > best.count_ones() {
            *best = cur;
        }
        return;
    }
    if cur.count_ones() + cand.count_ones() <= best.count_ones() {
        return;
    }
    let v = cand.trailing_zeros() as usize;
    max_clique(adj, cand & adj[v], cur | 1 << v, best);
    max_clique(adj, cand & !(1 << v), cur, best);
}

/// Packing number M: the largest subset with pairwise distance > ε. Exact
/// for |S| ≤ 24, a greedy lower bound beyond.
pub fn packing_number(s: &RealClass, b: &RealClass, mu_x: &[f64], eps: f64) -> Result<SetResult> {
    let d = dual_distances(s, b, mu_x)?;
    let k = s.len();
    if k <= PACKING_EXACT_MAX {
        let adj: Vec<u32> = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != i && d[i][j] > eps)
                    .fold(0, |a, j| a | 1 << j)
            })
            .collect();
        let mut best = 0u32;
        let all = if k == 0 { 0 } else { u32::MAX >> (32 - k) };
        max_clique(&adj, all, 0, &mut best);
        let members: Vec<usize> = (0..k).filter(|&i| best >> i & 1 == 1).collect();
        return Ok(SetResult {
            value: members.len(),
            members,
            exact: true,
        });
    }
    let mut members: Vec<usize> = Vec::new();
    for i in 0..k {
        if members.iter().all(|&j| d[i][j] > eps) {
            members.push(i);
        }
    }
    Ok(SetResult {
        value: members.len(),
        members,
        exact: false,
    })
}

/// Greedy cover: an upper bound on the covering number N.
pub fn covering_upper(s: &RealClass, b: &RealClass, mu_x: &[f64], eps: f64) -> Result<SetResult> {
    let d = dual_distances(s, b, mu_x)?;
    let k = s.len();
    let mut covered = vec![false; k];
    let mut members = Vec::new();
    while covered.iter().any(|c| !c) {
        let (best, _) = (0..k)
            .map(|i| {
                (
                    i,
                    (0..k)
                        .filter(|&j| !covered[j] && (i == j || d[i][j] <= eps))
                        .count(),
                )
            })
            .fold((0, 0), |acc, (i, c)| if c > acc.1 { (i, c) } else { acc });
        members.push(best);
        for j in 0..k {
            if best == j || d[best][j] <= eps {
                covered[j] = true;
            }
        }
    }
    Ok(SetResult {
        value: members.len(),
        members,
        exact: false,
    })
}

/// Exact covering number by subset enumeration, |S| ≤ 20.
pub fn covering_exact(s: &RealClass, b: &RealClass, mu_x: &[f64], eps: f64) -> Result<SetResult> {
    let k = s.len();
    if k > COVERING_EXACT_MAX {
        return Err(Error::Guard(format!(
            "exact covering limited to {COVERING_EXACT_MAX} members, got {k}"
        )));
    }
    let d = dual_distances(s, b, mu_x)?;
    let reach: Vec<u32> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| i == j || d[i][j] <= eps)
                .fold(0, |a, j| a | 1 << j)
        })
        .collect();
    let all: u32 = if k == 0 { 0 } else { u32::MAX >> (32 - k) };
    for size in 0..=k {
        for mask in 0u32..(1u32 << k) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let cover = (0..k)
                .filter(|&i| mask >> i & 1 == 1)
                .fold(0, |a, i| a | reach[i]);
            if cover == all {
                let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
                return Ok(SetResult {
                    value: size,
                    members,
                    exact: true,
                });
            }
        }
    }
    unreachable!("the whole class covers itself")
}

pub fn normalized_hamming(a: &BinModel, b: &BinModel) -> f64 {
    let diff = a
        .values()
        .iter()
        .zip(b.values())
        .filter(|(u, v)| u != v)
        .count();
    diff as f64 / a.len() as f64
}

/// Random code with pairwise normalized Hamming distance ≥ 1/2 − ε. Draws
/// N = ⌊2^{cε²n/2}⌋ − 1 uniform words per attempt and retries on any
/// violating pair; attempt i uses stream i of `seed`.
pub fn gv_packing(
    n: usize,
    eps: f64,
    seed: u64,
    c: f64,
    retry_cap: usize,
) -> Result<Vec<BinModel>> {
    if n == 0 || !(eps > 0.0 && eps < 0.5) || !(c > 0.0) {
        return invalid("need n ≥ 1, 0 < ε < 1/2 and c > 0");
    }
    let expo = c * eps * eps * n as f64 / 2.0;
    if expo > (GV_MAX_CANDIDATES as f64 + 1.0).log2() {
        return Err(Error::Guard(format!(
            "code would need more than {GV_MAX_CANDIDATES} words"
        )));
    }
    let count = (2f64.powf(expo).floor() as usize).saturating_sub(1);
    if count < 2 {
        return Ok(vec![BinModel::constant(n, 1), BinModel::constant(n, -1)]);
    }
    for attempt in 0..retry_cap {
        let mut r = rng::stream(seed, attempt as u64);
        let words: Vec<BinModel> = (0..count)
            .map(|_| {
                BinModel::new(
                    (0..n)
                        .map(|_| if r.gen::<bool>() { 1 } else { -1 })
                        .collect(),
                )
                .expect("±1 values")
            })
            .collect();
        let ok = (0..count)
            .all(|i| (i + 1..count).all(|j| normalized_hamming(&words[i], &words[j]) >= 0.5 - eps));
        if ok {
            return Ok(words);
        }
    }
    Err(Error::RetryCapExceeded(retry_cap))
}
