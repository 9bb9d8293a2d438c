//! Maximum-likelihood tomography over physical states.
//!
//! States are parametrized as ρ(t) = T†T / Tr(T†T) with T lower triangular
//! (4 real diagonal entries, 6 complex sub-diagonal entries), so every
//! parameter vector maps to a Hermitian, unit-trace, PSD matrix. The
//! objective is the Gaussian approximation to Poisson counting statistics.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::counts::CountVector;
use super::linear::{physical_projection, DualBasis};
use super::nelder_mead::{minimize, NelderMeadOptions, NelderMeadOutcome};
use super::projectors::{ProjectionSet, NUM_PROJECTORS};
use super::TomographyError;
use crate::state::{hermitize, DensityMatrix};

/// Number of real parameters of a two-qubit density matrix factor.
pub const NUM_PARAMS: usize = 16;

/// Sub-diagonal positions of T, in parameter order after the diagonal.
const OFF_DIAGONAL: [(usize, usize); 6] = [(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (3, 2)];

#[derive(Clone, Debug)]
pub struct MleOptions {
    pub simplex: NelderMeadOptions,
    /// Variance floor as a fraction of the total scale.
    pub variance_floor: f64,
    /// Edge length used when re-seeding the simplex at a converged point.
    pub polish_step: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            simplex: NelderMeadOptions::default(),
            variance_floor: 1e-9,
            polish_step: 0.01,
        }
    }
}

/// A converged maximum-likelihood reconstruction.
#[derive(Clone, Debug)]
pub struct MleFit {
    pub state: DensityMatrix,
    /// Objective at `state` (lower is better).
    pub likelihood: f64,
    /// Objective at the physical projection of the linear reconstruction.
    pub start_likelihood: f64,
    pub evaluations: usize,
    /// True when the run had to restart from the totally mixed state.
    pub restarted: bool,
}

fn lower_factor(t: &[f64]) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        m[(i, i)] = Complex64::new(t[i], 0.0);
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        m[(i, j)] = Complex64::new(t[4 + 2 * k], t[5 + 2 * k]);
    }
    m
}

/// ρ(t) = T†T / Tr(T†T).
pub fn state_from_params(t: &[f64]) -> DensityMatrix {
    let f = lower_factor(t);
    let m = f.adjoint() * f;
    let tr = m.trace().re;
    DensityMatrix::from_matrix(hermitize(&(m / Complex64::new(tr, 0.0))))
}

/// Lower Cholesky factor of a Hermitian PSD matrix; zero pivots give zero
/// columns instead of failing.
fn cholesky_psd(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let mut l = Matrix4::<Complex64>::zeros();
    for j in 0..4 {
        let d = m[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if d <= 1e-14 {
            continue;
        }
        let pivot = d.sqrt();
        l[(j, j)] = Complex64::new(pivot, 0.0);
        for i in j + 1..4 {
            let s: Complex64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (m[(i, j)] - s) / pivot;
        }
    }
    l
}

/// Parameters `t` with ρ(t) = ρ for a physical ρ, scaled so Σ t² = 1.
pub fn params_from_state(rho: &DensityMatrix) -> [f64; NUM_PARAMS] {
    // ρ = T†T with T lower  ⇔  JρJ = LL† with T = (JLJ)†, J the reversal
    let m = rho.matrix();
    let reversed = Matrix4::from_fn(|i, j| m[(3 - i, 3 - j)]);
    let l = cholesky_psd(&hermitize(&reversed));
    let t_mat = Matrix4::from_fn(|i, j| l[(3 - j, 3 - i)].conj());
    let mut t = [0.0; NUM_PARAMS];
    for i in 0..4 {
        t[i] = t_mat[(i, i)].re;
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        t[4 + 2 * k] = t_mat[(i, j)].re;
        t[5 + 2 * k] = t_mat[(i, j)].im;
    }
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        t.iter_mut().for_each(|x| *x /= norm);
    }
    t
}

/// Gaussian-approximated Poisson objective for fixed data.
#[derive(Clone, Debug)]
pub struct Likelihood {
    kets: [Vector4<Complex64>; NUM_PROJECTORS],
    counts: [f64; NUM_PROJECTORS],
    scale: f64,
    floor: f64,
}

impl Likelihood {
    pub fn new(counts: &CountVector, set: &ProjectionSet, variance_floor: f64) -> Self {
        let mut kets = [Vector4::zeros(); NUM_PROJECTORS];
        for (k, p) in kets.iter_mut().zip(set.projectors()) {
            *k = *p.ket();
        }
        let scale = counts.total_scale();
        Self {
            kets,
            counts: *counts.counts(),
            scale,
            floor: variance_floor * scale,
        }
    }

    fn objective(&self, probs: impl Iterator<Item = f64>) -> f64 {
        probs
            .zip(&self.counts)
            .map(|(p, &n)| {
                let expected = self.scale * p;
                (expected - n).powi(2) / (2.0 * expected.max(self.floor))
            })
            .sum()
    }

    /// Σ_ν (N p_ν − n_ν)² / (2 max(N p_ν, ε)).
    pub fn of_state(&self, rho: &DensityMatrix) -> f64 {
        let m = rho.matrix();
        self.objective(self.kets.iter().map(|k| (k.adjoint() * m * k)[(0, 0)].re))
    }

    /// Same objective evaluated directly on the triangular parameters.
    pub fn of_params(&self, t: &[f64]) -> f64 {
        let f = lower_factor(t);
        let trace: f64 = t.iter().map(|x| x * x).sum();
        if trace <= 0.0 {
            return f64::INFINITY;
        }
        // ⟨ν|T†T|ν⟩ = ‖T|ν⟩‖²
        self.objective(self.kets.iter().map(|k| (f * k).norm_squared() / trace))
    }
}

fn run(likelihood: &Likelihood, start: &[f64], opts: &NelderMeadOptions) -> NelderMeadOutcome {
    minimize(|t| likelihood.of_params(t), start, opts)
}

/// Maximum-likelihood reconstruction, started from the clipped linear
/// inversion. Returns a physical state, or [`TomographyError::NotConverged`]
/// carrying the best point found.
pub fn mle_reconstruct(counts: &CountVector, set: &ProjectionSet) -> Result<MleFit, TomographyError> {
    mle_reconstruct_with(counts, set, &MleOptions::default())
}

pub fn mle_reconstruct_with(
    counts: &CountVector,
    set: &ProjectionSet,
    opts: &MleOptions,
) -> Result<MleFit, TomographyError> {
    if counts.is_all_zero() {
        return Err(TomographyError::DegenerateCounts("all counts are zero".into()));
    }
    let basis = DualBasis::new(set)?;
    let start_state = match basis.reconstruct(counts) {
        Ok(rho) => physical_projection(&rho),
        Err(TomographyError::DegenerateCounts(_)) => DensityMatrix::totally_mixed(),
        Err(e) => return Err(e),
    };
    let likelihood = Likelihood::new(counts, set, opts.variance_floor);
    let start_likelihood = likelihood.of_state(&start_state);

    let mut best = run(&likelihood, &params_from_state(&start_state), &opts.simplex);
    let mut evaluations = best.evaluations;
    let mut restarted = false;
    if !best.converged {
        restarted = true;
        let retry = run(
            &likelihood,
            &params_from_state(&DensityMatrix::totally_mixed()),
            &opts.simplex,
        );
        evaluations += retry.evaluations;
        if retry.converged || retry.value < best.value {
            best = retry;
        }
    }
    if !best.converged {
        return Err(TomographyError::NotConverged {
            best: Box::new(state_from_params(&best.x)),
            likelihood: best.value,
            step: best.step,
            evaluations,
        });
    }

    // one re-seeded pass guards against a collapsed simplex stopping early
    let polish_opts = NelderMeadOptions {
        initial_step: opts.polish_step,
        ..opts.simplex.clone()
    };
    let polished = run(&likelihood, &best.x, &polish_opts);
    evaluations += polished.evaluations;
    if polished.value < best.value {
        best = polished;
    }

    let state = state_from_params(&best.x);
    Ok(MleFit {
        likelihood: likelihood.of_state(&state),
        state,
        start_likelihood,
        evaluations,
        restarted,
    })
}
