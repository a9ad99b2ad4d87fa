//! Cross-validation, grid search and the experiment harnesses.

mod cv;
mod experiments;
pub mod fixture;
mod metrics;

pub use cv::{CvOptions, CvReport, Experiment, FoldResult, GridSpec, PredictionRecord};
pub use experiments::{
    benchmark, sweep_csv, AblationReport, AblationRow, Baseline, Benchmark, MethodSummary, Removal,
    SweepRow, TopicResult,
};
pub use fixture::{Fixture, FixtureSpec};
pub use metrics::{paired_t_test, positive_class_metrics, MeanMetrics, Metrics, PairedTTest};
