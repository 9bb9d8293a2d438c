use super::{read_file, Mode, PipelineError, RunConfig};
use crate::metrics::StateMetrics;
use crate::state::DensityMatrix;

/// Reads the single input as a density matrix, validates it and computes
/// its metrics.
pub fn run_metrics(config: &RunConfig) -> Result<StateMetrics, PipelineError> {
    config.validate_for(Mode::Metrics)?;
    let path = &config.inputs[0];
    let text = read_file(path)?;
    let rho = DensityMatrix::parse_text(&text).map_err(|e| PipelineError::in_file(path, e))?;
    let diag = rho.validate();
    if !diag.passes() {
        return Err(PipelineError::in_file(
            path,
            PipelineError::Validation(format!("not a valid density matrix: {diag}")),
        ));
    }
    StateMetrics::evaluate(&rho).map_err(|e| PipelineError::in_file(path, e))
}
