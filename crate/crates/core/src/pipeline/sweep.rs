use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{provenance, Mode, PipelineError, RunConfig, Table};
use crate::metrics::{werner_curve, StateMetrics};
use crate::multipair::{g_vs_power_curve, RateTriple, SourceParams};
use crate::state::DensityMatrix;

pub const SWEEP_COLUMNS: [&str; 11] = [
    "power",
    "mu",
    "eta",
    "alpha",
    "r_hh",
    "r_hv",
    "r_hr",
    "g",
    "tangle",
    "linear_entropy",
    "fidelity",
];

/// Reference fidelities: ideal state, separable upper limit, totally mixed.
pub const FIDELITY_REFERENCES: [(&str, f64); 3] = [("ideal", 1.0), ("separable_limit", 0.5), ("totally_mixed", 0.25)];

/// One (η, power) grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub power: f64,
    pub mu: f64,
    pub eta: f64,
    pub alpha: f64,
    pub rates: RateTriple,
    pub g: f64,
    pub metrics: StateMetrics,
    pub truncation_adequate: bool,
}

/// The three tables of a sweep.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// One row per grid point, grouped by η.
    pub table: Table,
    /// Werner (g, S_L, T) line.
    pub trajectory: Table,
    /// Fidelity against power per η with reference levels.
    pub fidelity: Table,
}

/// `<stem>_<suffix>.<ext>` next to `path`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "sweep".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

/// Grid points sorted by η, then power. No randomness is involved.
pub fn sweep_rows(config: &RunConfig) -> Result<Vec<SweepRow>, PipelineError> {
    config.validate_for(Mode::Sweep)?;
    let cal = config.calibration()?;
    let mut powers = config.power_grid.clone();
    powers.sort_by(f64::total_cmp);
    let blocks: Vec<Result<Vec<SweepRow>, PipelineError>> = config
        .sweep_etas()
        .into_par_iter()
        .map(|eta| {
            let template = SourceParams { eta, ..config.source };
            g_vs_power_curve(&cal, &template, &powers)?
                .into_iter()
                .map(|pt| {
                    let metrics = StateMetrics::evaluate(&DensityMatrix::werner(pt.g)?)?;
                    Ok(SweepRow {
                        power: pt.power,
                        mu: pt.mu,
                        eta,
                        alpha: template.alpha,
                        rates: pt.rates,
                        g: pt.g,
                        metrics,
                        truncation_adequate: pt.truncation_adequate,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for block in blocks {
        rows.extend(block?);
    }
    Ok(rows)
}

fn with_provenance(mut t: Table, config: &RunConfig) -> Table {
    for line in provenance(config) {
        t.comment(line);
    }
    t.comment(format!("power_unit={}", config.power_unit));
    t
}

/// Evaluates the sweep and, with an output path set, writes the main table
/// there and the other two as `<stem>_trajectory` and `<stem>_fidelity`
/// siblings.
pub fn run_sweep(config: &RunConfig) -> Result<SweepOutput, PipelineError> {
    let rows = sweep_rows(config)?;

    let mut table = with_provenance(Table::new(&SWEEP_COLUMNS), config);
    table.comment(format!("n_max={}", config.source.n_max));
    if let Some(first) = rows.iter().find(|r| !r.truncation_adequate) {
        table.comment(format!(
            "warning: n_max={} is below ceil(mu + 6 sqrt(mu)) from mu={} on",
            config.source.n_max, first.mu
        ));
    }
    for r in &rows {
        table.push_numbers(&[
            r.power,
            r.mu,
            r.eta,
            r.alpha,
            r.rates.r_hh,
            r.rates.r_hv,
            r.rates.r_hr,
            r.g,
            r.metrics.tangle,
            r.metrics.linear_entropy,
            r.metrics.fidelity,
        ]);
    }

    let mut trajectory = with_provenance(Table::new(&["g", "linear_entropy", "tangle"]), config);
    trajectory.comment("Werner states rho = (1-g) ideal + g I/4");
    for (g, s_l, t) in werner_curve::trajectory(config.trajectory_points) {
        trajectory.push_numbers(&[g, s_l, t]);
    }

    let mut columns = vec!["eta", "power", "mu", "fidelity"];
    columns.extend(FIDELITY_REFERENCES.iter().map(|(name, _)| *name));
    let mut fidelity = with_provenance(Table::new(&columns), config);
    for r in &rows {
        let mut values = vec![r.eta, r.power, r.mu, r.metrics.fidelity];
        values.extend(FIDELITY_REFERENCES.iter().map(|(_, v)| *v));
        fidelity.push_numbers(&values);
    }

    if let Some(path) = &config.output {
        table.write(path)?;
        trajectory.write(&sibling_path(path, "trajectory"))?;
        fidelity.write(&sibling_path(path, "fidelity"))?;
    }
    Ok(SweepOutput {
        rows,
        table,
        trajectory,
        fidelity,
    })
}
