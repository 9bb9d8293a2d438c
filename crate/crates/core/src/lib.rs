//! Two-photon polarization density matrices for entangled-pair sources.
//!
//! - [`state`] and [`metrics`]: density matrices, Werner states, fidelity,
//!   concurrence/tangle, linear entropy and Werner fits.
//! - [`tomography`]: 16-projector coincidence tomography with linear and
//!   maximum-likelihood reconstruction.
//! - [`multipair`]: coincidence probabilities of a Poissonian multi-pair
//!   source seen by threshold detectors, and the Werner parameter they imply.
//! - [`pipeline`]: batch runs behind the `pairstate` command-line tool.

pub mod metrics;
pub mod multipair;
pub mod pipeline;
pub mod state;
pub mod tomography;

pub use metrics::StateMetrics;
pub use state::{DensityMatrix, Diagnostics, PureState, StateError};
