//! Batch learners: ERM bases, correlation maximization, multicalibration,
//! boosting and omniprediction.

pub mod boost;
pub mod corm;
pub mod erm;
pub mod mamc;
pub mod omni;

use crate::error::{invalid, Result};
use crate::rng;
use crate::stat_model::{sample, Dataset, DiscreteDistribution};

pub use boost::{boost, boost_run, BoostOutput, BoostParams, BoostStep};
pub use corm::{
    corm_general, dcorm_binary_b, dcorm_real, max_threshold_index, round_model, CormParams,
    DcormParams,
};
pub use erm::{
    agreement_learn, comparative_learn, erm_agnostic, erm_realizable, ComparativeLearner,
};
pub use mamc::{
    ma_mc_learn, ma_mc_run, weak_from_strong, Contract, DcormOracle, ExactWeakOracle, MamcOutput,
    MamcParams, MamcStep, WeakOracle,
};
pub use omni::{omnipredict, omnipredict_run, tau, LossFunction, OmniOutput, OmniParams};

/// Smallest integer strictly above `v`, treating values within a relative
/// 1e-9 of an integer as that integer.
pub(crate) fn first_integer_above(v: f64) -> usize {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r as usize + 1
    } else {
        v.floor() as usize + 1
    }
}

/// The three kinds of data blocks the iterative learners consume.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// n⁽¹⁾-point blocks handed to the oracle.
    Train,
    /// n⁽²⁾-point blocks scoring the oracle output.
    Holdout,
    /// n⁽³⁾-point blocks for the calibration tests.
    Check,
}

/// Block sizes and counts. Train/holdout pairs come first, interleaved,
/// followed by the check blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub pairs: usize,
    pub checks: usize,
}

impl Layout {
    pub fn total(&self) -> usize {
        self.pairs * (self.n1 + self.n2) + self.checks * self.n3
    }

    fn range(&self, role: Role, index: usize) -> Result<(usize, usize)> {
        let pair = self.n1 + self.n2;
        let (start, len, count) = match role {
            Role::Train => (index * pair, self.n1, self.pairs),
            Role::Holdout => (index * pair + self.n1, self.n2, self.pairs),
            Role::Check => (self.pairs * pair + index * self.n3, self.n3, self.checks),
        };
        if index >= count {
            return invalid(format!(
                "{role:?} block {index} beyond the {count} available"
            ));
        }
        Ok((start, start + len))
    }
}

/// Source of data blocks for the iterative learners.
pub trait Blocks {
    fn layout(&self) -> Layout;
    fn block(&mut self, role: Role, index: usize) -> Result<Dataset>;
}

/// Blocks cut from one dataset in layout order.
pub struct SplitBlocks<'a> {
    data: &'a Dataset,
    layout: Layout,
}

impl<'a> SplitBlocks<'a> {
    pub fn new(data: &'a Dataset, layout: Layout) -> Result<Self> {
        if data.len() < layout.total() {
            return invalid(format!(
                "need {} data points for the block layout, got {}",
                layout.total(),
                data.len()
            ));
        }
        Ok(SplitBlocks { data, layout })
    }
}

impl Blocks for SplitBlocks<'_> {
    fn layout(&self) -> Layout {
        self.layout
    }

    fn block(&mut self, role: Role, index: usize) -> Result<Dataset> {
        let (a, b) = self.layout.range(role, index)?;
        Ok(self.data.slice(a, b))
    }
}

/// Blocks drawn on demand from a distribution; block (role, index) always
/// uses its own RNG stream, so the result does not depend on access order.
pub struct SampledBlocks<'a> {
    dist: &'a DiscreteDistribution,
    seed: u64,
    layout: Layout,
}

impl<'a> SampledBlocks<'a> {
    pub fn new(dist: &'a DiscreteDistribution, seed: u64, layout: Layout) -> Self {
        SampledBlocks { dist, seed, layout }
    }
}

impl Blocks for SampledBlocks<'_> {
    fn layout(&self) -> Layout {
        self.layout
    }

    fn block(&mut self, role: Role, index: usize) -> Result<Dataset> {
        let (a, b) = self.layout.range(role, index)?;
        let tag = match role {
            Role::Train => 1u64,
            Role::Holdout => 2,
            Role::Check => 3,
        };
        let mut r = rng::stream(self.seed, (tag << 48) | index as u64);
        Ok(sample(self.dist, b - a, &mut r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_layout_order() {
        let data = Dataset::new((0..11).map(|i| (i, 1.0)).collect());
        let layout = Layout {
            n1: 2,
            n2: 1,
            n3: 2,
            pairs: 2,
            checks: 2,
        };
        assert_eq!(layout.total(), 10);
        let mut b = SplitBlocks::new(&data, layout).unwrap();
        let xs = |d: Dataset| d.points.iter().map(|p| p.0).collect::<Vec<_>>();
        assert_eq!(xs(b.block(Role::Train, 1).unwrap()), vec![3, 4]);
        assert_eq!(xs(b.block(Role::Holdout, 1).unwrap()), vec![5]);
        assert_eq!(xs(b.block(Role::Check, 0).unwrap()), vec![6, 7]);
        assert!(b.block(Role::Check, 2).is_err());
        let short = Dataset::new(vec![(0, 1.0)]);
        assert!(SplitBlocks::new(&short, layout).is_err());
    }
}
