//! Batch runs behind the command-line tool: tomography over count files,
//! synthetic count generation, model sweeps and single-state metrics.

mod config;
mod metrics;
mod simulate;
mod sweep;
mod table;
mod tomo;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::multipair::ModelError;
use crate::state::StateError;
use crate::tomography::TomographyError;

pub use config::{Mode, RunConfig, DEFAULT_SCALE};
pub use metrics::run_metrics;
pub use simulate::{point_seed, run_simulate, SimulatedPoint, MANIFEST_FILE};
pub use sweep::{run_sweep, sibling_path, sweep_rows, SweepOutput, SweepRow, FIDELITY_REFERENCES, SWEEP_COLUMNS};
pub use table::Table;
pub use tomo::{analyze_counts, analyze_file, run_tomo, AnalysisRecord, FileFailure, RecordDiagnostics, TomoOutcome};

pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;
pub const EXIT_DEGENERATE: i32 = 6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}, line {line}: {message}")]
    Parse { origin: String, line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Validation(String),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<PipelineError>,
    },
    #[error(transparent)]
    Tomography(#[from] TomographyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    State(#[from] StateError),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn in_file(path: &Path, source: impl Into<PipelineError>) -> Self {
        Self::File {
            path: path.to_path_buf(),
            source: Box::new(source.into()),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => EXIT_IO,
            Self::Parse { .. } => EXIT_PARSE,
            Self::Config(_) | Self::Validation(_) => EXIT_VALIDATION,
            Self::File { source, .. } => source.exit_code(),
            Self::Tomography(e) => match e {
                TomographyError::Parse { .. } | TomographyError::UnknownLabel(_) => EXIT_PARSE,
                TomographyError::NotConverged { .. } => EXIT_NOT_CONVERGED,
                TomographyError::DegenerateCounts(_) => EXIT_DEGENERATE,
                TomographyError::Configuration(_) | TomographyError::InvalidCounts(_) => EXIT_VALIDATION,
                TomographyError::State(s) => state_code(s),
            },
            Self::Model(e) => match e {
                ModelError::Domain(_) => EXIT_VALIDATION,
                ModelError::Degenerate(_) => EXIT_DEGENERATE,
                ModelError::State(s) => state_code(s),
            },
            Self::State(s) => state_code(s),
        }
    }
}

fn state_code(e: &StateError) -> i32 {
    match e {
        StateError::Parse { .. } => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

/// `#` comment lines identifying the producing build and configuration.
pub fn provenance(config: &RunConfig) -> Vec<String> {
    vec![
        format!("pairstate {}", env!("CARGO_PKG_VERSION")),
        format!("config_sha256={}", config.config_hash()),
        format!("seed={}", config.seed),
    ]
}

pub(crate) fn read_file(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| PipelineError::io(path, e))
}
