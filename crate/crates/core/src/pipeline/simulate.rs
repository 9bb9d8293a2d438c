use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{provenance, write_file, Mode, PipelineError, RunConfig, Table};
use crate::multipair::{effective_g, projection_probabilities_16, rates_primed, ModelError, RateTriple, SourceParams};
use crate::state::DensityMatrix;
use crate::tomography::{simulate_from_probabilities, write_count_file, CountVector, ProjectionSet, NUM_PROJECTORS};

/// Index of the written count files, next to them in the output directory.
pub const MANIFEST_FILE: &str = "manifest.csv";

/// One synthetic count file.
#[derive(Clone, Debug)]
pub struct SimulatedPoint {
    pub index: usize,
    /// `None` when the point comes from `source.mu` rather than a power grid.
    pub power: Option<f64>,
    pub mu: f64,
    pub rates: RateTriple,
    pub g: f64,
    pub counts: CountVector,
    pub path: Option<PathBuf>,
}

/// Seed of the `index`-th point: the first output of ChaCha8 stream
/// `index` under `seed`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Projector probabilities and Werner parameter of the model state.
///
/// With no pairs at all there are no rates to normalize; for η > 0 the
/// model state tends to the ideal Bell state as μ → 0, and that limit is
/// used.
fn model_probabilities(
    p: &SourceParams,
    set: &ProjectionSet,
) -> Result<(RateTriple, f64, [f64; NUM_PROJECTORS]), PipelineError> {
    let rates = rates_primed(p)?.rates;
    if p.mu == 0.0 {
        if p.eta == 0.0 {
            return Err(ModelError::Degenerate("no pairs (μ = 0) and no true coincidences (η = 0)".into()).into());
        }
        return Ok((rates, 0.0, set.expected_probabilities(&DensityMatrix::ideal_bell())));
    }
    let g = effective_g(&rates)?;
    Ok((rates, g, projection_probabilities_16(&rates, set)?))
}

/// Synthesizes one count file per power-grid point (or a single one at
/// `source.mu` without a grid). With an output directory set, writes
/// `point_NNNN.counts` files and [`MANIFEST_FILE`].
pub fn run_simulate(config: &RunConfig) -> Result<Vec<SimulatedPoint>, PipelineError> {
    config.validate_for(Mode::Simulate)?;
    let set = config.projection_set();
    let grid: Vec<(Option<f64>, f64)> = if config.power_grid.is_empty() {
        vec![(None, config.source.mu)]
    } else {
        let cal = config.calibration()?;
        let mut powers = config.power_grid.clone();
        powers.sort_by(f64::total_cmp);
        powers.into_iter().map(|p| (Some(p), cal.mu_at(p))).collect()
    };
    let header = provenance(config);
    let mut points = Vec::with_capacity(grid.len());
    for (index, (power, mu)) in grid.into_iter().enumerate() {
        let params = SourceParams { mu, ..config.source };
        let (rates, g, probs) = model_probabilities(&params, &set)?;
        let counts = simulate_from_probabilities(&probs, config.scale, point_seed(config.seed, index))?;
        let path = match &config.output {
            Some(dir) => {
                let path = dir.join(format!("point_{index:04}.counts"));
                let mut comments = header.clone();
                if let Some(p) = power {
                    comments.push(format!("power={p} {}", config.power_unit));
                }
                comments.push(format!("mu={mu}, eta={}, alpha={}", params.eta, params.alpha));
                comments.push(format!("model_g={g}"));
                write_file(&path, &write_count_file(&counts, &set, &comments))?;
                Some(path)
            }
            None => None,
        };
        points.push(SimulatedPoint {
            index,
            power,
            mu,
            rates,
            g,
            counts,
            path,
        });
    }
    if let Some(dir) = &config.output {
        let mut manifest = Table::new(&["index", "power", "mu", "r_hh", "r_hv", "r_hr", "g", "file"]);
        for line in header {
            manifest.comment(line);
        }
        manifest.comment(format!("power_unit={}", config.power_unit));
        for pt in &points {
            let file = pt
                .path
                .as_ref()
                .and_then(|p| p.file_name())
                .map_or_else(String::new, |f| f.to_string_lossy().into_owned());
            manifest.push_row(vec![
                pt.index.to_string(),
                pt.power.map_or_else(String::new, |p| p.to_string()),
                pt.mu.to_string(),
                pt.rates.r_hh.to_string(),
                pt.rates.r_hv.to_string(),
                pt.rates.r_hr.to_string(),
                pt.g.to_string(),
                file,
            ]);
        }
        manifest.write(&dir.join(MANIFEST_FILE))?;
    }
    Ok(points)
}
