use nalgebra::Matrix4;
use num_complex::Complex64;

use super::counts::CountVector;
use super::projectors::{ProjectionSet, MAX_GRAM_CONDITION, NUM_PROJECTORS};
use super::TomographyError;
use crate::state::{hermitize, DensityMatrix};

/// Dual basis `M_ν` of a projection set: `ρ = Σ_ν Tr(ρ P_ν) M_ν`.
#[derive(Clone, Debug)]
pub struct DualBasis {
    duals: Vec<Matrix4<Complex64>>,
    computational: [usize; 4],
}

impl DualBasis {
    pub fn new(set: &ProjectionSet) -> Result<Self, TomographyError> {
        let computational = set.computational_indices()?;
        let condition = set.gram_condition();
        if !(condition <= MAX_GRAM_CONDITION) {
            return Err(TomographyError::Configuration(format!(
                "projection set is not informationally complete (Gram condition number {condition:e})"
            )));
        }
        let inv = set.gram().try_inverse().ok_or_else(|| {
            TomographyError::Configuration("Gram matrix of the projection set is singular".into())
        })?;
        let projectors = set.projectors();
        let duals = (0..NUM_PROJECTORS)
            .map(|nu| {
                projectors
                    .iter()
                    .enumerate()
                    .fold(Matrix4::zeros(), |acc, (mu, p)| {
                        acc + p.matrix() * Complex64::new(inv[(mu, nu)], 0.0)
                    })
            })
            .collect();
        Ok(Self { duals, computational })
    }

    pub fn duals(&self) -> &[Matrix4<Complex64>] {
        &self.duals
    }

    /// `Σ_ν r_ν M_ν` for arbitrary real weights.
    pub fn combine(&self, weights: &[f64; NUM_PROJECTORS]) -> Matrix4<Complex64> {
        self.duals
            .iter()
            .zip(weights)
            .fold(Matrix4::zeros(), |acc, (m, w)| acc + m * Complex64::new(*w, 0.0))
    }

    /// Linear inversion normalized by the HH + HV + VH + VV total.
    pub fn reconstruct(&self, counts: &CountVector) -> Result<DensityMatrix, TomographyError> {
        if counts.is_all_zero() {
            return Err(TomographyError::DegenerateCounts("all counts are zero".into()));
        }
        let norm: f64 = self.computational.iter().map(|&i| counts.counts()[i]).sum();
        if norm <= 0.0 {
            return Err(TomographyError::DegenerateCounts(
                "HH, HV, VH and VV counts are all zero; trace cannot be normalized".into(),
            ));
        }
        let rates = counts.counts().map(|n| n / norm);
        Ok(DensityMatrix::from_matrix(hermitize(&self.combine(&rates))))
    }
}

/// Linear-inversion tomography. The result is Hermitian with unit trace but
/// may have negative eigenvalues when the counts are noisy.
pub fn linear_reconstruct(counts: &CountVector, set: &ProjectionSet) -> Result<DensityMatrix, TomographyError> {
    DualBasis::new(set)?.reconstruct(counts)
}

/// Nearest physical state by eigenvalue clipping: negative eigenvalues are
/// set to zero and the spectrum renormalized.
pub fn physical_projection(rho: &DensityMatrix) -> DensityMatrix {
    let eig = hermitize(rho.matrix()).symmetric_eigen();
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let total = clipped.sum();
    if total <= 0.0 {
        return DensityMatrix::totally_mixed();
    }
    let diag = Matrix4::from_diagonal(&clipped.map(|l| Complex64::new(l / total, 0.0)));
    let v = &eig.eigenvectors;
    DensityMatrix::from_matrix(hermitize(&(v * diag * v.adjoint())))
}
