//! Stability and welfare experiments over full and subsampled profiles.

mod entropy;
mod heatmap;
pub mod sampling;
mod stability;
mod welfare;

use thiserror::Error;

use crate::aggregation::AggregationError;
use crate::model::Format;

pub use entropy::{binary_entropy, entropy};
pub use heatmap::{frequency_heatmap, Heatmap, HeatmapRow};
pub use stability::{
    run_stability, run_stability_sweep, ProjectFrequency, RepetitionRecord, SamplingPool, StabilityConfig,
    StabilityReport,
};
pub use welfare::{average_welfare, cross_format_welfare, WelfareEntry, WelfareMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("cannot sample {n_prime} ballots from a pool of {pool}")]
    SampleTooLarge { n_prime: usize, pool: usize },
    #[error("at least one repetition is required")]
    NoRepetitions,
    #[error("no {0} profile provided to measure welfare against")]
    MissingReference(Format),
    #[error("profile in format {0} is over a different project set than the reference")]
    InstanceMismatch(Format),
    #[error("reports cover different elections: `{0}` and `{1}`")]
    MixedElections(String, String),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
}
