//! Entanglement and mixedness figures of merit for two-photon states.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::state::{hermitize, DensityMatrix, PureState, StateError};

/// Largest imaginary residue of ⟨ψ|ρ|ψ⟩ tolerated before rejecting.
const FIDELITY_IMAG_TOL: f64 = 1e-12;

/// The figures tracked per reconstructed state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateMetrics {
    pub fidelity: f64,
    pub tangle: f64,
    pub linear_entropy: f64,
    pub purity: f64,
    pub werner_g: f64,
}

impl StateMetrics {
    /// Metrics of `rho`, with fidelity taken against the ideal Bell state.
    pub fn evaluate(rho: &DensityMatrix) -> Result<Self, StateError> {
        Ok(Self {
            fidelity: fidelity(rho, &PureState::ideal_bell())?,
            tangle: tangle(rho),
            linear_entropy: linear_entropy(rho),
            purity: purity(rho),
            werner_g: werner_fit(rho),
        })
    }

    /// Every field within its closed range, with `slack` allowance.
    pub fn in_range(&self, slack: f64) -> bool {
        let unit = |v: f64| (-slack..=1.0 + slack).contains(&v);
        unit(self.fidelity)
            && unit(self.tangle)
            && unit(self.linear_entropy)
            && unit(self.werner_g)
            && (0.25 - slack..=1.0 + slack).contains(&self.purity)
    }

    /// `fidelity=…, tangle=…, linear_entropy=…, werner_g=…`
    pub fn block(&self) -> String {
        format!(
            "fidelity={}, tangle={}, linear_entropy={}, werner_g={}",
            self.fidelity, self.tangle, self.linear_entropy, self.werner_g
        )
    }
}

/// ⟨ψ|ρ|ψ⟩ for a valid ρ and normalized ψ.
pub fn fidelity(rho: &DensityMatrix, psi: &PureState) -> Result<f64, StateError> {
    let diag = rho.validate();
    if !diag.passes() {
        return Err(StateError::Invalid(diag));
    }
    if !psi.is_normalized() {
        return Err(StateError::NotNormalized(psi.amplitudes().norm()));
    }
    let v = psi.amplitudes();
    let overlap = (v.adjoint() * rho.matrix() * v)[(0, 0)];
    if overlap.im.abs() >= FIDELITY_IMAG_TOL {
        return Err(StateError::Domain(format!(
            "fidelity has imaginary residue {:e}",
            overlap.im
        )));
    }
    Ok(overlap.re)
}

/// Tr(ρ²).
pub fn purity(rho: &DensityMatrix) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

/// Normalized linear entropy `(4/3)(1 − Tr ρ²)`: 0 for pure, 1 for I/4.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    4.0 / 3.0 * (1.0 - purity(rho))
}

/// σy ⊗ σy in the |HH⟩,|HV⟩,|VH⟩,|VV⟩ basis.
fn spin_flip() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    let one = Complex64::new(1.0, 0.0);
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// Eigenvalues of ρ below this are treated as exact zeros.
const NULL_EIGENVALUE: f64 = 1e-14;

/// Principal square root of the Hermitian part; eigenvalues under
/// [`NULL_EIGENVALUE`] (including negative round-off) are set to zero.
fn psd_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = hermitize(m).symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| {
        let l = if l < NULL_EIGENVALUE { 0.0 } else { l };
        Complex64::new(l.sqrt(), 0.0)
    });
    let v = &eig.eigenvectors;
    v * Matrix4::from_diagonal(&roots) * v.adjoint()
}

/// Wootters concurrence.
///
/// The λ's are the square roots of the spectrum of the Hermitian form
/// √ρ·ρ̃·√ρ, with ρ̃ = (σy⊗σy) ρ* (σy⊗σy). They are taken as the singular
/// values of √ρ̃·√ρ, which avoids square roots of round-off eigenvalues.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let flip = spin_flip();
    let root = psd_sqrt(rho.matrix());
    let root_tilde = flip * root.map(|z| z.conj()) * flip;
    let sv = (root_tilde * root).singular_values();
    let mut lambdas = [sv[0], sv[1], sv[2], sv[3]];
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Concurrence squared.
pub fn tangle(rho: &DensityMatrix) -> f64 {
    concurrence(rho).powi(2)
}

/// Werner parameter whose state is nearest to ρ in Frobenius norm.
pub fn werner_fit(rho: &DensityMatrix) -> f64 {
    let ideal = DensityMatrix::ideal_bell();
    let dir = DensityMatrix::totally_mixed().matrix() - ideal.matrix();
    let offset = rho.matrix() - ideal.matrix();
    let num = (dir.adjoint() * offset).trace().re;
    let den = (dir.adjoint() * dir).trace().re;
    (num / den).clamp(0.0, 1.0)
}

/// Closed-form curves of the Werner family, used for reference tables and
/// for checking that modeled states sit on the Werner line.
pub mod werner_curve {
    /// ⟨ψ_ideal|ρ_W(g)|ψ_ideal⟩.
    pub fn fidelity(g: f64) -> f64 {
        1.0 - 0.75 * g
    }

    pub fn purity(g: f64) -> f64 {
        (1.0 - g).powi(2) + g * (1.0 - g) / 2.0 + g * g / 4.0
    }

    pub fn linear_entropy(g: f64) -> f64 {
        4.0 / 3.0 * (1.0 - purity(g))
    }

    pub fn concurrence(g: f64) -> f64 {
        (1.0 - 1.5 * g).max(0.0)
    }

    pub fn tangle(g: f64) -> f64 {
        concurrence(g).powi(2)
    }

    /// Inverse of `linear_entropy` on [0, 1]; `S_L(g) = 2g − g²`.
    pub fn g_from_linear_entropy(s_l: f64) -> f64 {
        1.0 - (1.0 - s_l.clamp(0.0, 1.0)).sqrt()
    }

    /// Tangle of the Werner state with linear entropy `s_l`.
    pub fn tangle_at_linear_entropy(s_l: f64) -> f64 {
        tangle(g_from_linear_entropy(s_l))
    }

    /// Mixing parameter where the tangle first vanishes.
    pub const SEPARABLE_THRESHOLD: f64 = 2.0 / 3.0;

    /// `(g, S_L, T)` at `points` evenly spaced g values in [0, 1], plus
    /// [`SEPARABLE_THRESHOLD`] when the grid misses it.
    pub fn trajectory(points: usize) -> Vec<(f64, f64, f64)> {
        let steps = points.saturating_sub(1).max(1) as f64;
        let mut gs: Vec<f64> = (0..points).map(|i| i as f64 / steps).collect();
        if !gs.contains(&SEPARABLE_THRESHOLD) {
            gs.push(SEPARABLE_THRESHOLD);
            gs.sort_by(f64::total_cmp);
        }
        gs.into_iter().map(|g| (g, linear_entropy(g), tangle(g))).collect()
    }
}
