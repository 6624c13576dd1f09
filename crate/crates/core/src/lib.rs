//! Finite-domain toolkit for learning with a source class and a benchmark
//! class: mutual dimensions, agreement reductions, correlation maximization,
//! multicalibration, boosting, omniprediction and online learning, plus a
//! seeded experiment harness.
//!
//! Everything is exact over explicit finite supports. Sampling only feeds
//! learners; every guarantee check evaluates expectations by summation.

pub mod dimensions;
pub mod domain;
pub mod error;
pub mod experiment;
pub mod io;
pub mod offline;
pub mod online;
pub mod rng;
pub mod stat_model;

pub use domain::{
    BinClass, BinHypothesis, BinLabel, BinModel, Class, Domain, IntervalPartition, Labeling,
    RealClass, RealHypothesis, RealLabel, RealModel, SignVector,
};
pub use error::{Error, Result};
