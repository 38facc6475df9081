//! Location-homophily measurement on mutual-friend social graphs.
//!
//! A user's home location is estimated by a majority vote over the labels of
//! their mutual friends, with the user's own label hidden. Filtering the set
//! of estimation targets by a profile attribute (`#friends`, `#followers`, or
//! the follow ratio) and watching how accuracy and coverage move tells how
//! well that attribute indicates location homophily.
//!
//! The pipeline:
//!
//! * [`graph`] loads the undirected mutual-friend graph and its statistics.
//! * [`attributes`] and [`stats`] hold per-user profile counts, box statistics
//!   and Spearman rank correlations.
//! * [`estimator`] runs leave-one-out majority-vote inference and scores it.
//! * [`filter`] builds HighCut/LowCut filters and sweeps a logarithmic
//!   threshold grid under a coverage floor.
//! * [`significance`] tests whether a filtered accuracy beats the baseline.
//! * [`experiment`] assembles the five-row per-dataset report.
//! * [`synth`] generates seeded datasets with a planted ratio/locality link.

pub mod attributes;
pub mod dataset;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod filter;
pub mod graph;
pub mod significance;
pub mod stats;
pub mod synth;
mod text;

pub use attributes::{follow_ratio, Attribute, AttributeRecord, AttributeTable};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use estimator::{evaluate, infer_one, EvalResult, Evaluator, LabelMap, Outcome};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, ExperimentRow};
pub use filter::{apply_filter, sweep, threshold_grid, CurvePoint, Direction, FilterSpec, SweepResult};
pub use graph::{GraphStats, SocialGraph, UserId};
pub use significance::{compare_accuracy, ProportionSample, SignificanceResult};
pub use stats::{box_stats, spearman, BoxStats, CorrelationMatrix};
pub use synth::{generate, SynthConfig, SynthDataset};

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;
