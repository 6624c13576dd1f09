//! Scenario generators, the sample-complexity estimator and config runs.

pub mod config;
pub mod estimate;
pub mod learner;
pub mod scenario;

pub use config::{
    build_bundle, parse_config, run_experiment, ExperimentConfig, Summary, REFERENCE_SUITE,
};
pub use estimate::{
    estimate_sample_complexity, wilson, EstimateOptions, EstimateReport, GridPoint, Mode,
};
pub use learner::{default_learner, Learner, LearnerKind};
pub use scenario::{
    scenario, Direction, GoalCheck, LawKind, Marginal, ScenarioName, TaskKind, TaskSpec,
};
