//! Monte Carlo drivers, result records and their persistence.

mod coupling;
mod drivers;
mod record;
mod spec;
mod stats;

use thiserror::Error;

use crate::percolation::EmbeddingError;
use crate::process::ProcessError;

pub use coupling::{run_replicate, CouplingParams, ReplicateTrace};
pub use drivers::{
    bisect_level, crossing_curve, gw_survival_experiment, gw_tree_seed, lambda_c_bisect, lambda_u_proxy,
    measure_verify, verify_boxes, offspring_count, run_experiment, two_arm_curve, vacant_decay,
    GwSurvival, MeasureCheck, TripleSource,
};
pub use record::{
    check_writable, csv_row, load, output_paths, persist, ResultPoint, ResultRecord, Threshold,
    CSV_COLUMNS, SCHEMA,
};
pub use spec::{parse_lines, ExperimentKind, ExperimentSpec, Grid, KEYS};
pub use stats::{
    binomial_stderr, chi_square_p, grouped_jackknife, mean_stderr, scaling_fit, ScalingFit,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid {key}: {message}")]
    Invalid { key: String, message: String },
    #[error("bracket [{lo}, {hi}] does not straddle the level {target}: frequencies {f_lo} and {f_hi}")]
    NonBracketing {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
}

impl ExperimentError {
    pub fn invalid(key: &str, message: String) -> ExperimentError {
        ExperimentError::Invalid {
            key: key.to_string(),
            message,
        }
    }

    /// The offending key of a validation error.
    pub fn key(&self) -> Option<&str> {
        match self {
            ExperimentError::Invalid { key, .. } => Some(key),
            _ => None,
        }
    }

    /// Whether the error is a problem with the input rather than the run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            ExperimentError::Invalid { .. }
                | ExperimentError::NonBracketing { .. }
                | ExperimentError::Degenerate(_)
                | ExperimentError::Process(ProcessError::InvalidParameter { .. })
                | ExperimentError::Process(ProcessError::InvalidBox(_))
        )
    }
}
