//! Shot-by-shot simulation of the multi-pair source, independent of the
//! combinatorial kernels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::{ModelError, ProjectionClass, RateTriple, SourceParams};

/// Shots per independently seeded batch.
pub const BATCH_SHOTS: u64 = 1 << 16;

/// Empirical rates with binomial standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloRates {
    pub rates: RateTriple,
    pub std_errors: RateTriple,
    pub shots: u64,
}

impl MonteCarloRates {
    /// |empirical − reference| in units of the binomial standard error of
    /// the reference rate, per class. Falls back to the empirical standard
    /// error when the reference is 0; an exact match always scores 0.
    pub fn z_scores(&self, reference: &RateTriple) -> [f64; 3] {
        let n = self.shots as f64;
        let z = |got: f64, want: f64, empirical_se: f64| {
            let d = (got - want).abs();
            let null_se = (want * (1.0 - want) / n).sqrt();
            let se = if null_se > 0.0 { null_se } else { empirical_se };
            if d == 0.0 {
                0.0
            } else if se == 0.0 {
                f64::INFINITY
            } else {
                d / se
            }
        };
        [
            z(self.rates.r_hh, reference.r_hh, self.std_errors.r_hh),
            z(self.rates.r_hv, reference.r_hv, self.std_errors.r_hv),
            z(self.rates.r_hr, reference.r_hr, self.std_errors.r_hr),
        ]
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    hh: u64,
    hv: u64,
    hr: u64,
}

/// Photon polarizations registered in each arm for one shot.
#[derive(Default)]
struct ArmContents {
    arm1_h: u32,
    arm2_h: u32,
    arm2_v: u32,
}

fn fires<R: Rng>(rng: &mut R, photons: u32, pass: f64, alpha: f64) -> bool {
    (0..photons).any(|_| rng.random::<f64>() < pass && rng.random::<f64>() < alpha)
}

/// Routes one pair: both photons inside the window with probability η,
/// otherwise a single photon in either arm.
fn route_pair<R: Rng>(rng: &mut R, arms: &mut ArmContents, eta: f64) {
    let is_h = rng.random_bool(0.5);
    let (to_arm1, to_arm2) = if rng.random::<f64>() < eta {
        (true, true)
    } else if rng.random_bool(0.5) {
        (true, false)
    } else {
        (false, true)
    };
    if to_arm1 && is_h {
        arms.arm1_h += 1;
    }
    if to_arm2 {
        if is_h {
            arms.arm2_h += 1;
        } else {
            arms.arm2_v += 1;
        }
    }
}

fn coincidence<R: Rng>(rng: &mut R, arms: &ArmContents, class: ProjectionClass, alpha: f64) -> bool {
    // arm 1 always analyzes H: only its H photons can pass
    if !fires(rng, arms.arm1_h, 1.0, alpha) {
        return false;
    }
    match class {
        ProjectionClass::HH => fires(rng, arms.arm2_h, 1.0, alpha),
        ProjectionClass::HV => fires(rng, arms.arm2_v, 1.0, alpha),
        ProjectionClass::HR => fires(rng, arms.arm2_h + arms.arm2_v, 0.5, alpha),
    }
}

fn run_batch(p: &SourceParams, poisson: Option<&Poisson<f64>>, shots: u64, seed: u64, batch: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let mut tally = Tally::default();
    for _ in 0..shots {
        let pairs = poisson.map_or(0, |d| d.sample(&mut rng) as u64);
        if pairs == 0 {
            continue;
        }
        let mut arms = ArmContents::default();
        for _ in 0..pairs {
            route_pair(&mut rng, &mut arms, p.eta);
        }
        tally.hh += u64::from(coincidence(&mut rng, &arms, ProjectionClass::HH, p.alpha));
        tally.hv += u64::from(coincidence(&mut rng, &arms, ProjectionClass::HV, p.alpha));
        tally.hr += u64::from(coincidence(&mut rng, &arms, ProjectionClass::HR, p.alpha));
    }
    tally
}

/// Estimates the three class rates from `shots` simulated pulses.
///
/// Shots are split into batches of [`BATCH_SHOTS`]; batch `b` uses the
/// ChaCha8 stream `b` of `seed`, so the result does not depend on thread
/// scheduling.
pub fn monte_carlo_rates(p: &SourceParams, shots: u64, seed: u64) -> Result<MonteCarloRates, ModelError> {
    p.validate()?;
    if shots == 0 {
        return Err(ModelError::Domain("at least one shot is required".into()));
    }
    let poisson = if p.mu > 0.0 {
        Some(Poisson::new(p.mu).map_err(|e| ModelError::Domain(format!("Poisson mean {}: {e}", p.mu)))?)
    } else {
        None
    };
    let batches = shots.div_ceil(BATCH_SHOTS);
    let total = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = BATCH_SHOTS.min(shots - b * BATCH_SHOTS);
            run_batch(p, poisson.as_ref(), n, seed, b)
        })
        .reduce(Tally::default, |a, b| Tally {
            hh: a.hh + b.hh,
            hv: a.hv + b.hv,
            hr: a.hr + b.hr,
        });
    let n = shots as f64;
    let rate = |k: u64| k as f64 / n;
    let se = |k: u64| {
        let q = rate(k);
        (q * (1.0 - q) / n).sqrt()
    };
    Ok(MonteCarloRates {
        rates: RateTriple {
            r_hh: rate(total.hh),
            r_hv: rate(total.hv),
            r_hr: rate(total.hr),
        },
        std_errors: RateTriple {
            r_hh: se(total.hh),
            r_hv: se(total.hv),
            r_hr: se(total.hr),
        },
        shots,
    })
}
