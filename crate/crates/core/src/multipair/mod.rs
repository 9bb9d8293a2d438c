//! Multi-pair emission model of a pulsed SPDC source: Poisson pair-number
//! statistics, finite detector efficiency and imperfect pair timing, mapped
//! onto an effective Werner state.

mod kernels;
mod monte_carlo;
mod rates;

pub use kernels::{class_prob_primed, class_prob_unprimed, pair_split_weight, poisson_pmf, KernelTable};
pub use monte_carlo::{monte_carlo_rates, MonteCarloRates, BATCH_SHOTS};
pub use rates::{
    background_g, effective_density_matrix, effective_g, g_vs_power_curve, hr_consistency,
    projection_probabilities_16, rates_from_table, rates_primed, rates_unprimed, BackgroundModel, CurvePoint,
    RateEstimate,
};

use thiserror::Error;

use crate::state::StateError;

/// The three analyzer settings the rate model distinguishes. Arm 1 is
/// always set to H.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProjectionClass {
    HH,
    HV,
    HR,
}

impl ProjectionClass {
    pub const ALL: [ProjectionClass; 3] = [ProjectionClass::HH, ProjectionClass::HV, ProjectionClass::HR];
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("degenerate rates: {0}")]
    Degenerate(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Source and detection parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceParams {
    /// Mean pair number per pulse.
    pub mu: f64,
    /// Single-photon detection efficiency.
    pub alpha: f64,
    /// Probability that both photons of a pair fall in the coincidence window.
    pub eta: f64,
    /// Largest pair number kept in the Poisson sum.
    pub n_max: u32,
}

impl SourceParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(ModelError::Domain(format!("mean pair number must be finite and ≥ 0, got {}", self.mu)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ModelError::Domain(format!(
                "detection efficiency must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(ModelError::Domain(format!(
                "simultaneous detection efficiency must lie in [0, 1], got {}",
                self.eta
            )));
        }
        if self.n_max < 1 {
            return Err(ModelError::Domain("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// `n_max ≥ ⌈μ + 6√μ⌉`.
    pub fn truncation_adequate(&self) -> bool {
        f64::from(self.n_max) >= (self.mu + 6.0 * self.mu.sqrt()).ceil()
    }
}

/// Coincidence probabilities per pulse for HH, HV and HR.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RateTriple {
    pub r_hh: f64,
    pub r_hv: f64,
    pub r_hr: f64,
}

impl RateTriple {
    pub fn get(&self, class: ProjectionClass) -> f64 {
        match class {
            ProjectionClass::HH => self.r_hh,
            ProjectionClass::HV => self.r_hv,
            ProjectionClass::HR => self.r_hr,
        }
    }
}

/// Linear pump-power calibration μ = c·P.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerCalibration {
    pub pairs_per_power: f64,
    pub power_unit: String,
}

impl PowerCalibration {
    pub fn new(pairs_per_power: f64, power_unit: impl Into<String>) -> Result<Self, ModelError> {
        let cal = PowerCalibration {
            pairs_per_power,
            power_unit: power_unit.into(),
        };
        cal.validate()?;
        Ok(cal)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.pairs_per_power > 0.0 && self.pairs_per_power.is_finite()) {
            return Err(ModelError::Domain(format!(
                "calibration constant must be finite and > 0, got {}",
                self.pairs_per_power
            )));
        }
        Ok(())
    }

    pub fn mu_at(&self, power: f64) -> f64 {
        self.pairs_per_power * power
    }
}
