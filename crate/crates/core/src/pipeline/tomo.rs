use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{provenance, read_file, write_file, Mode, PipelineError, RunConfig, Table};
use crate::metrics::StateMetrics;
use crate::multipair::{hr_consistency, RateTriple};
use crate::state::DensityMatrix;
use crate::tomography::{mle_reconstruct, parse_count_file, CountVector, ProjectionSet, Projector};

/// Solver and consistency figures attached to one reconstruction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordDiagnostics {
    pub min_eigenvalue: f64,
    pub evaluations: usize,
    /// P(HR) / (2·(P(HH) + P(HV))) of the reconstructed state; 0.25 for a
    /// Werner state.
    pub hr_consistency: f64,
    pub likelihood: f64,
    pub restarted: bool,
}

/// One count file taken through reconstruction and metrics.
#[derive(Clone, Debug)]
pub struct AnalysisRecord {
    pub label: String,
    pub path: PathBuf,
    pub counts: CountVector,
    pub state: DensityMatrix,
    pub metrics: StateMetrics,
    pub diagnostics: RecordDiagnostics,
}

impl AnalysisRecord {
    /// Reconstructed matrix, metrics block and diagnostics.
    pub fn report(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            out.push_str(&format!("# {line}\n"));
        }
        let d = &self.diagnostics;
        out.push_str(&format!("# label={}\n# input={}\n", self.label, self.path.display()));
        out.push_str(&self.state.to_text());
        out.push('\n');
        out.push_str(&self.metrics.block());
        out.push('\n');
        out.push_str(&format!(
            "purity={}\nmin_eigenvalue={}, evaluations={}, hr_consistency={}, likelihood={:e}, restarted={}\n",
            self.metrics.purity, d.min_eigenvalue, d.evaluations, d.hr_consistency, d.likelihood, d.restarted
        ));
        out
    }
}

#[derive(Debug)]
pub struct FileFailure {
    pub label: String,
    pub path: PathBuf,
    pub error: PipelineError,
}

#[derive(Debug, Default)]
pub struct TomoOutcome {
    /// Sorted by label.
    pub records: Vec<AnalysisRecord>,
    /// Sorted by label.
    pub failures: Vec<FileFailure>,
}

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "label",
    "fidelity",
    "tangle",
    "linear_entropy",
    "purity",
    "werner_g",
    "min_eigenvalue",
    "evaluations",
    "hr_consistency",
    "likelihood",
];

impl TomoOutcome {
    /// 0 when every file succeeded, else the code of the first failure.
    pub fn exit_code(&self) -> i32 {
        self.failures.first().map_or(0, |f| f.error.exit_code())
    }

    pub fn summary_table(&self, config: &RunConfig) -> Table {
        let mut t = Table::new(&SUMMARY_COLUMNS);
        for line in provenance(config) {
            t.comment(line);
        }
        for f in &self.failures {
            t.comment(format!("failed {}: {}", f.label, f.error));
        }
        for r in &self.records {
            let (m, d) = (&r.metrics, &r.diagnostics);
            t.push_row(vec![
                r.label.clone(),
                m.fidelity.to_string(),
                m.tangle.to_string(),
                m.linear_entropy.to_string(),
                m.purity.to_string(),
                m.werner_g.to_string(),
                d.min_eigenvalue.to_string(),
                d.evaluations.to_string(),
                d.hr_consistency.to_string(),
                d.likelihood.to_string(),
            ]);
        }
        t
    }
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Maximum-likelihood reconstruction and metrics for one count vector.
pub fn analyze_counts(
    counts: &CountVector,
    set: &ProjectionSet,
) -> Result<(DensityMatrix, StateMetrics, RecordDiagnostics), PipelineError> {
    let fit = mle_reconstruct(counts, set)?;
    let metrics = StateMetrics::evaluate(&fit.state)?;
    let p = |label: &str| -> Result<f64, PipelineError> {
        Ok(Projector::from_label(label, set.convention())?.probability(fit.state.matrix()))
    };
    let hr = hr_consistency(&RateTriple {
        r_hh: p("HH")?,
        r_hv: p("HV")?,
        r_hr: p("HR")?,
    })
    .unwrap_or(f64::NAN);
    let diagnostics = RecordDiagnostics {
        min_eigenvalue: fit.state.eigenvalues()[0],
        evaluations: fit.evaluations,
        hr_consistency: hr,
        likelihood: fit.likelihood,
        restarted: fit.restarted,
    };
    Ok((fit.state, metrics, diagnostics))
}

/// Parses one count file and analyzes it. Errors carry the file name.
pub fn analyze_file(path: &Path, set: &ProjectionSet) -> Result<AnalysisRecord, PipelineError> {
    let wrap = |e: PipelineError| PipelineError::in_file(path, e);
    let text = read_file(path)?;
    let raw = parse_count_file(&text, set).map_err(|e| wrap(e.into()))?;
    let counts = CountVector::with_computational_scale(raw, set).map_err(|e| wrap(e.into()))?;
    let (state, metrics, diagnostics) = analyze_counts(&counts, set).map_err(wrap)?;
    Ok(AnalysisRecord {
        label: label_of(path),
        path: path.to_path_buf(),
        counts,
        state,
        metrics,
        diagnostics,
    })
}

/// Reconstructs every input file. A failing file is recorded and the rest
/// of the batch continues. With an output directory set, writes one
/// `<label>.report.txt` per success and `summary.csv`.
pub fn run_tomo(config: &RunConfig) -> Result<TomoOutcome, PipelineError> {
    config.validate_for(Mode::Tomo)?;
    let mut labelled: Vec<(String, &PathBuf)> = config.inputs.iter().map(|p| (label_of(p), p)).collect();
    labelled.sort();
    if let Some(w) = labelled.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(PipelineError::Config(format!(
            "inputs {} and {} share the label {}",
            w[0].1.display(),
            w[1].1.display(),
            w[0].0
        )));
    }
    let set = config.projection_set();
    let results: Vec<_> = labelled
        .par_iter()
        .map(|(label, path)| (label.clone(), (*path).clone(), analyze_file(path, &set)))
        .collect();
    let mut outcome = TomoOutcome::default();
    for (label, path, result) in results {
        match result {
            Ok(record) => outcome.records.push(record),
            Err(error) => outcome.failures.push(FileFailure { label, path, error }),
        }
    }
    if let Some(dir) = &config.output {
        let header = provenance(config);
        for r in &outcome.records {
            write_file(&dir.join(format!("{}.report.txt", r.label)), &r.report(&header))?;
        }
        outcome.summary_table(config).write(&dir.join("summary.csv"))?;
    }
    Ok(outcome)
}
