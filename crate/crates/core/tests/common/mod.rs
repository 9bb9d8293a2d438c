#![allow(dead_code)]

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use pairstate::DensityMatrix;

/// Random state of the given rank: G G† / Tr with G a 4×rank complex
/// Gaussian matrix.
pub fn random_state(seed: u64, rank: usize) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Matrix4::<Complex64>::zeros();
    for i in 0..4 {
        for j in 0..rank.clamp(1, 4) {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            g[(i, j)] = Complex64::new(re, im);
        }
    }
    let m = g * g.adjoint();
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = m.trace().re;
    DensityMatrix::from_matrix(m / Complex64::new(tr, 0.0))
}

fn psd_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = SymmetricEigen::new(*m);
    let d = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    eig.eigenvectors * Matrix4::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// (Tr |√ρ √σ|)².
pub fn uhlmann_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let s: f64 = (psd_sqrt(a.matrix()) * psd_sqrt(b.matrix())).singular_values().sum();
    s * s
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
