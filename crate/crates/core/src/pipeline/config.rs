use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::{read_file, PipelineError};
use crate::multipair::{PowerCalibration, SourceParams};
use crate::tomography::{CircularConvention, ProjectionSet};

/// Counts per unit-probability projector when none is configured.
pub const DEFAULT_SCALE: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Tomo,
    Simulate,
    Sweep,
    Metrics,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tomo" => Ok(Self::Tomo),
            "simulate" => Ok(Self::Simulate),
            "sweep" => Ok(Self::Sweep),
            "metrics" => Ok(Self::Metrics),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tomo => "tomo",
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::Metrics => "metrics",
        })
    }
}

/// Settings for one run.
///
/// The text form is flat `key = value` lines; a `[section]` header prefixes
/// the keys below it, so `[source]` followed by `alpha = 0.01` is the same as
/// `source.alpha = 0.01`. Lists are comma- or space-separated.
///
/// Keys: `mode`, `seed`, `inputs`, `output`, `scale`, `eta_list`,
/// `power_grid`, `trajectory_points`, `source.{mu,alpha,eta,n_max}`,
/// `calibration.{pairs_per_power,power_unit}`, `tomography.convention`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub source: SourceParams,
    /// μ per unit power; required whenever a power grid is used.
    pub pairs_per_power: Option<f64>,
    pub power_unit: String,
    /// Empty means `[source.eta]`.
    pub eta_list: Vec<f64>,
    pub power_grid: Vec<f64>,
    pub scale: f64,
    pub convention: CircularConvention,
    pub trajectory_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: None,
            inputs: Vec::new(),
            output: None,
            seed: 0,
            source: SourceParams {
                mu: 0.0,
                alpha: 0.01,
                eta: 0.03,
                n_max: 15,
            },
            pairs_per_power: None,
            power_unit: "a.u.".into(),
            eta_list: Vec::new(),
            power_grid: Vec::new(),
            scale: DEFAULT_SCALE,
            convention: CircularConvention::default(),
            trajectory_points: 101,
        }
    }
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("{key}: {value:?} is not a valid number"))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(key, s))
        .collect()
}

fn parse_paths(value: &str) -> Vec<PathBuf> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(PathBuf::from)
        .collect()
}

fn join_numbers(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses config text on top of the defaults. `origin` names the source
    /// in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, PipelineError> {
        let mut config = Self::default();
        let mut section = String::new();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| PipelineError::Parse {
                origin: origin.to_string(),
                line: line_no,
                message,
            };
            let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header {line:?}")))?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = key.trim().to_ascii_lowercase();
            let key = if section.is_empty() { key } else { format!("{section}.{key}") };
            if seen.contains(&key) {
                return Err(err(format!("duplicate key {key}")));
            }
            config.set(&key, value.trim()).map_err(err)?;
            seen.push(key);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = read_file(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets one key; the same keys as the text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "mode" => self.mode = Some(value.parse()?),
            "seed" => self.seed = parse_number(key, value)?,
            "inputs" => self.inputs = parse_paths(value),
            "output" => self.output = Some(PathBuf::from(value)),
            "scale" => self.scale = parse_number(key, value)?,
            "eta_list" => self.eta_list = parse_list(key, value)?,
            "power_grid" => self.power_grid = parse_list(key, value)?,
            "trajectory_points" => self.trajectory_points = parse_number(key, value)?,
            "source.mu" => self.source.mu = parse_number(key, value)?,
            "source.alpha" => self.source.alpha = parse_number(key, value)?,
            "source.eta" => self.source.eta = parse_number(key, value)?,
            "source.n_max" => self.source.n_max = parse_number(key, value)?,
            "calibration.pairs_per_power" => self.pairs_per_power = Some(parse_number(key, value)?),
            "calibration.power_unit" => self.power_unit = value.to_string(),
            "tomography.convention" => self.convention = value.parse()?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), PipelineError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("override {assignment:?} is not key=value")))?;
        self.set(key, value).map_err(PipelineError::Config)
    }

    /// Every key except `output` with its effective value, one `key=value`
    /// per line in sorted order. Where results are written does not change
    /// them, so the output location stays out of the hash.
    pub fn canonical_text(&self) -> String {
        let paths = |p: &[PathBuf]| p.iter().map(|x| x.display().to_string()).collect::<Vec<_>>().join(",");
        let mut lines = vec![
            format!("calibration.pairs_per_power={}", self.pairs_per_power.map_or(String::new(), |c| c.to_string())),
            format!("calibration.power_unit={}", self.power_unit),
            format!("eta_list={}", join_numbers(&self.eta_list)),
            format!("inputs={}", paths(&self.inputs)),
            format!("mode={}", self.mode.map_or(String::new(), |m| m.to_string())),
            format!("power_grid={}", join_numbers(&self.power_grid)),
            format!("scale={}", self.scale),
            format!("seed={}", self.seed),
            format!("source.alpha={}", self.source.alpha),
            format!("source.eta={}", self.source.eta),
            format!("source.mu={}", self.source.mu),
            format!("source.n_max={}", self.source.n_max),
            format!("tomography.convention={}", self.convention),
            format!("trajectory_points={}", self.trajectory_points),
        ];
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// SHA-256 of [`canonical_text`](Self::canonical_text), lowercase hex.
    pub fn config_hash(&self) -> String {
        Sha256::digest(self.canonical_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn projection_set(&self) -> ProjectionSet {
        ProjectionSet::canonical_with(self.convention)
    }

    pub fn calibration(&self) -> Result<PowerCalibration, PipelineError> {
        let c = self
            .pairs_per_power
            .ok_or_else(|| PipelineError::Config("calibration.pairs_per_power is required with a power grid".into()))?;
        PowerCalibration::new(c, self.power_unit.clone()).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// The η values to sweep, ascending.
    pub fn sweep_etas(&self) -> Vec<f64> {
        let mut etas = if self.eta_list.is_empty() {
            vec![self.source.eta]
        } else {
            self.eta_list.clone()
        };
        etas.sort_by(f64::total_cmp);
        etas.dedup();
        etas
    }

    /// Checks the fields the given mode needs.
    pub fn validate_for(&self, mode: Mode) -> Result<(), PipelineError> {
        let fail = |m: String| Err(PipelineError::Config(m));
        let positive_grid = |name: &str, grid: &[f64]| -> Result<(), PipelineError> {
            match grid.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
                Some(bad) => Err(PipelineError::Config(format!("{name} entries must be positive, got {bad}"))),
                None => Ok(()),
            }
        };
        match mode {
            Mode::Tomo => {
                if self.inputs.is_empty() {
                    return fail("tomography needs at least one input file".into());
                }
            }
            Mode::Metrics => {
                if self.inputs.len() != 1 {
                    return fail(format!("metrics takes exactly one input file, got {}", self.inputs.len()));
                }
            }
            Mode::Simulate => {
                self.source.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
                if !(self.scale.is_finite() && self.scale > 0.0) {
                    return fail(format!("scale must be positive, got {}", self.scale));
                }
                positive_grid("power_grid", &self.power_grid)?;
                if !self.power_grid.is_empty() {
                    self.calibration()?;
                }
            }
            Mode::Sweep => {
                if self.power_grid.is_empty() {
                    return fail("sweep needs a non-empty power_grid".into());
                }
                positive_grid("power_grid", &self.power_grid)?;
                self.calibration()?;
                if self.trajectory_points < 2 {
                    return fail("trajectory_points must be at least 2".into());
                }
                for eta in self.sweep_etas() {
                    SourceParams { eta, ..self.source }
                        .validate()
                        .map_err(|e| PipelineError::Config(e.to_string()))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sweep of the caption values
mode = sweep
seed = 7

[source]
alpha = 0.005   # per-detector
n_max = 20

[calibration]
pairs_per_power = 0.01
power_unit = mW
";

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.source.alpha, 0.01);
        assert_eq!(c.source.eta, 0.03);
        assert_eq!(c.source.n_max, 15);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn sections_and_overrides() {
        // under [calibration] this would be calibration.eta_list
        assert!(RunConfig::parse(&format!("{SAMPLE}eta_list = 0.2\n"), "cfg").is_err());

        let text = format!("eta_list = 0.2, 0.001 1.0,0.03\npower_grid = 1,2\n{SAMPLE}");
        let mut c = RunConfig::parse(&text, "cfg").unwrap();
        assert_eq!(c.mode, Some(Mode::Sweep));
        assert_eq!(c.seed, 7);
        assert_eq!(c.source.alpha, 0.005);
        assert_eq!(c.source.n_max, 20);
        assert_eq!(c.source.eta, 0.03);
        assert_eq!(c.sweep_etas(), vec![0.001, 0.03, 0.2, 1.0]);
        assert_eq!(c.calibration().unwrap().mu_at(50.0), 0.5);
        c.validate_for(Mode::Sweep).unwrap();

        let before = c.config_hash();
        c.apply_override("source.alpha=0.02").unwrap();
        assert_eq!(c.source.alpha, 0.02);
        assert_ne!(c.config_hash(), before);
        assert!(c.apply_override("source.alpha").is_err());
        assert!(c.apply_override("nope=1").is_err());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = RunConfig::parse("seed = 1\n[source]\nalpha = lots\n", "run.cfg").unwrap_err();
        match err {
            PipelineError::Parse { origin, line, .. } => {
                assert_eq!(origin, "run.cfg");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse("seed = 1\nseed = 2\n", "x").is_err());
        assert!(RunConfig::parse("[source\n", "x").is_err());
        assert!(RunConfig::parse("just words\n", "x").is_err());
    }

    #[test]
    fn hash_is_stable_and_order_free() {
        let a = RunConfig::parse("seed = 3\n[source]\nalpha = 0.1\neta = 0.5\n", "a").unwrap();
        let b = RunConfig::parse("source.eta = 0.5\nsource.alpha = 0.1\nseed = 3\n", "b").unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }

    #[test]
    fn mode_requirements() {
        let mut c = RunConfig::default();
        assert!(c.validate_for(Mode::Tomo).is_err());
        assert!(c.validate_for(Mode::Metrics).is_err());
        assert!(c.validate_for(Mode::Sweep).is_err());
        c.validate_for(Mode::Simulate).unwrap();
        c.power_grid = vec![1.0, 2.0];
        assert!(c.validate_for(Mode::Simulate).is_err());
        c.pairs_per_power = Some(0.1);
        c.validate_for(Mode::Simulate).unwrap();
        c.validate_for(Mode::Sweep).unwrap();
        c.power_grid.push(0.0);
        assert!(c.validate_for(Mode::Sweep).is_err());
        c.power_grid.pop();
        c.eta_list = vec![1.5];
        assert!(c.validate_for(Mode::Sweep).is_err());
    }
}
