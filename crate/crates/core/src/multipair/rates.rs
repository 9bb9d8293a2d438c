use super::kernels::KernelTable;
use super::{ModelError, PowerCalibration, RateTriple, SourceParams};
use crate::state::DensityMatrix;
use crate::tomography::{ProjectionSet, NUM_PROJECTORS};

/// Rates together with the truncation-adequacy check of the source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub rates: RateTriple,
    /// False when `n_max` is small for `mu` (see [`SourceParams::truncation_adequate`]).
    pub truncation_adequate: bool,
}

fn from_table(table: &KernelTable, p: &SourceParams) -> RateEstimate {
    let [r_hh, r_hv, r_hr] = table.poisson_sums(p.mu);
    RateEstimate {
        rates: RateTriple { r_hh, r_hv, r_hr },
        truncation_adequate: p.truncation_adequate(),
    }
}

/// Coincidence probabilities per pulse with every pair in the window; `eta`
/// is ignored.
pub fn rates_unprimed(p: &SourceParams) -> Result<RateEstimate, ModelError> {
    p.validate()?;
    Ok(from_table(&KernelTable::unprimed(p.alpha, p.n_max)?, p))
}

/// Coincidence probabilities per pulse with simultaneous detection
/// efficiency `p.eta`.
pub fn rates_primed(p: &SourceParams) -> Result<RateEstimate, ModelError> {
    p.validate()?;
    Ok(from_table(&KernelTable::primed(p.alpha, p.eta, p.n_max)?, p))
}

/// As [`rates_primed`] with a precomputed kernel table for `(alpha, eta, n_max)`.
pub fn rates_from_table(table: &KernelTable, mu: f64) -> Result<RateEstimate, ModelError> {
    let p = SourceParams {
        mu,
        alpha: table.alpha(),
        eta: table.eta().unwrap_or(1.0),
        n_max: table.n_max(),
    };
    p.validate()?;
    Ok(from_table(table, &p))
}

/// Werner mixing parameter implied by the linear-basis classes.
///
/// With R_VV = R_HH and R_VH = R_HV, a Werner state gives P(HV) = g/4 out of
/// a computational-basis total of 1/2, so g = 2·R_HV / (R_HH + R_HV).
pub fn effective_g(rates: &RateTriple) -> Result<f64, ModelError> {
    let den = rates.r_hh + rates.r_hv;
    if !(den > 0.0) {
        return Err(ModelError::Degenerate("R_HH + R_HV is zero".into()));
    }
    Ok((2.0 * rates.r_hv / den).clamp(0.0, 1.0))
}

/// HR probability normalized by the computational-basis total; 0.25 for any
/// Werner state.
pub fn hr_consistency(rates: &RateTriple) -> Result<f64, ModelError> {
    let den = 2.0 * (rates.r_hh + rates.r_hv);
    if !(den > 0.0) {
        return Err(ModelError::Degenerate("R_HH + R_HV is zero".into()));
    }
    Ok(rates.r_hr / den)
}

/// `ρ_i/(1+μ) + μ/(1+μ)·I/4`.
pub fn effective_density_matrix(mu: f64) -> Result<DensityMatrix, ModelError> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(ModelError::Domain(format!("mean pair number must be ≥ 0, got {mu}")));
    }
    Ok(DensityMatrix::werner(mu / (1.0 + mu))?)
}

/// Projector probabilities of the Werner state fixed by `rates`.
///
/// The Werner family fixes the computational-basis probabilities to the
/// normalized rates, so no further rescaling is needed.
pub fn projection_probabilities_16(
    rates: &RateTriple,
    set: &ProjectionSet,
) -> Result<[f64; NUM_PROJECTORS], ModelError> {
    let g = effective_g(rates)?;
    Ok(set.expected_probabilities(&DensityMatrix::werner(g)?))
}

/// One point of a g-versus-power curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub power: f64,
    pub mu: f64,
    pub rates: RateTriple,
    pub g: f64,
    pub truncation_adequate: bool,
}

/// Effective g along a power grid, with μ = c·P. The kernel table is built
/// once for the template's (α, η, n_max).
pub fn g_vs_power_curve(
    cal: &PowerCalibration,
    template: &SourceParams,
    powers: &[f64],
) -> Result<Vec<CurvePoint>, ModelError> {
    cal.validate()?;
    template.validate()?;
    let table = KernelTable::primed(template.alpha, template.eta, template.n_max)?;
    powers
        .iter()
        .map(|&power| {
            if !(power > 0.0 && power.is_finite()) {
                return Err(ModelError::Domain(format!("powers must be positive, got {power}")));
            }
            let mu = cal.mu_at(power);
            let est = rates_from_table(&table, mu)?;
            Ok(CurvePoint {
                power,
                mu,
                rates: est.rates,
                g: effective_g(&est.rates)?,
                truncation_adequate: est.truncation_adequate,
            })
        })
        .collect()
}

/// Background coincidences from processes with the same quadratic power
/// law as the pair emission.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackgroundModel {
    pub signal_coeff: f64,
    pub background_coeff: f64,
}

impl BackgroundModel {
    pub fn new(signal_coeff: f64, background_coeff: f64) -> Result<Self, ModelError> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !ok(signal_coeff) || !ok(background_coeff) {
            return Err(ModelError::Domain("rate coefficients must be finite and ≥ 0".into()));
        }
        if signal_coeff + background_coeff == 0.0 {
            return Err(ModelError::Degenerate("signal and background coefficients are both zero".into()));
        }
        Ok(Self {
            signal_coeff,
            background_coeff,
        })
    }

    pub fn signal_rate(&self, power: f64) -> f64 {
        self.signal_coeff * power * power
    }

    pub fn background_rate(&self, power: f64) -> f64 {
        self.background_coeff * power * power
    }

    /// b·P² / (s·P² + b·P²), with the common P² cancelled.
    pub fn g(&self, power: f64) -> Result<f64, ModelError> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(ModelError::Domain(format!("power must be finite and ≥ 0, got {power}")));
        }
        Ok(self.background_coeff / (self.signal_coeff + self.background_coeff))
    }
}

/// Mixing parameter contributed by quadratic-in-power background light.
pub fn background_g(signal_coeff: f64, background_coeff: f64, power: f64) -> Result<f64, ModelError> {
    BackgroundModel::new(signal_coeff, background_coeff)?.g(power)
}
