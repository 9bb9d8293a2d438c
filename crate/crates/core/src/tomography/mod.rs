//! Sixteen-projector two-photon polarization tomography.

mod counts;
mod linear;
mod mle;
pub mod nelder_mead;
mod projectors;

use thiserror::Error;

use crate::state::{DensityMatrix, StateError};

pub use counts::{parse_count_file, simulate_counts, simulate_from_probabilities, write_count_file, CountVector};
pub use linear::{linear_reconstruct, physical_projection, DualBasis};
pub use mle::{
    mle_reconstruct, mle_reconstruct_with, params_from_state, state_from_params, Likelihood, MleFit, MleOptions,
    NUM_PARAMS,
};
pub use projectors::{
    expected_probabilities, AnalyzerState, CircularConvention, ProjectionSet, Projector, CANONICAL_LABELS,
    MAX_GRAM_CONDITION, NUM_PROJECTORS,
};

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("degenerate input: {0}")]
    DegenerateCounts(String),
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("unknown projector label {0:?}")]
    UnknownLabel(String),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("optimizer did not converge after {evaluations} evaluations (objective {likelihood:e}, simplex size {step:e})")]
    NotConverged {
        best: Box<DensityMatrix>,
        likelihood: f64,
        step: f64,
        evaluations: usize,
    },
    #[error(transparent)]
    State(#[from] StateError),
}
