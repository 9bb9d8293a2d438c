use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use super::TomographyError;
use crate::state::DensityMatrix;

/// Number of projectors in a two-photon tomography set.
pub const NUM_PROJECTORS: usize = 16;

/// Labels of the canonical measurement sequence.
pub const CANONICAL_LABELS: [&str; NUM_PROJECTORS] = [
    "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL",
];

/// Largest Gram-matrix condition number accepted for reconstruction.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Sign convention for circular analyzer states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CircularConvention {
    /// R = (|H⟩ − i|V⟩)/√2.
    #[default]
    RMinusI,
    /// R = (|H⟩ + i|V⟩)/√2.
    RPlusI,
}

impl FromStr for CircularConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r-i" | "minus" | "rminusi" => Ok(Self::RMinusI),
            "r+i" | "plus" | "rplusi" => Ok(Self::RPlusI),
            other => Err(format!("unknown circular convention {other:?} (expected r-i or r+i)")),
        }
    }
}

impl fmt::Display for CircularConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::RMinusI => "r-i",
            Self::RPlusI => "r+i",
        })
    }
}

/// Single-photon polarization selected by one analyzer arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnalyzerState {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl AnalyzerState {
    pub fn from_char(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'H' => Self::H,
            'V' => Self::V,
            'D' => Self::D,
            'A' => Self::A,
            'R' => Self::R,
            'L' => Self::L,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            Self::H => 'H',
            Self::V => 'V',
            Self::D => 'D',
            Self::A => 'A',
            Self::R => 'R',
            Self::L => 'L',
        }
    }

    /// Jones vector in the (H, V) basis.
    pub fn amplitudes(self, convention: CircularConvention) -> Vector2<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re = |x: f64| Complex64::new(x, 0.0);
        let im = |x: f64| Complex64::new(0.0, x);
        let r_sign = match convention {
            CircularConvention::RMinusI => -1.0,
            CircularConvention::RPlusI => 1.0,
        };
        match self {
            Self::H => Vector2::new(re(1.0), re(0.0)),
            Self::V => Vector2::new(re(0.0), re(1.0)),
            Self::D => Vector2::new(re(s), re(s)),
            Self::A => Vector2::new(re(s), re(-s)),
            Self::R => Vector2::new(re(s), im(r_sign * s)),
            Self::L => Vector2::new(re(s), im(-r_sign * s)),
        }
    }
}

/// Rank-one two-photon projector |ab⟩⟨ab|.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    label: String,
    ket: Vector4<Complex64>,
    matrix: Matrix4<Complex64>,
}

impl Projector {
    pub fn new(first: AnalyzerState, second: AnalyzerState, convention: CircularConvention) -> Self {
        let a = first.amplitudes(convention);
        let b = second.amplitudes(convention);
        let ket = Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
        Self {
            label: format!("{}{}", first.as_char(), second.as_char()),
            matrix: ket * ket.adjoint(),
            ket,
        }
    }

    /// Parses a two-letter label such as `"HR"`.
    pub fn from_label(label: &str, convention: CircularConvention) -> Result<Self, TomographyError> {
        let mut chars = label.trim().chars();
        let parsed = match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => AnalyzerState::from_char(a).zip(AnalyzerState::from_char(b)),
            _ => None,
        };
        let (a, b) = parsed.ok_or_else(|| TomographyError::UnknownLabel(label.to_string()))?;
        Ok(Self::new(a, b, convention))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ket(&self) -> &Vector4<Complex64> {
        &self.ket
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    /// Born probability `Re Tr(ρ P) = Re ⟨ab|ρ|ab⟩`.
    pub fn probability(&self, rho: &Matrix4<Complex64>) -> f64 {
        (self.ket.adjoint() * rho * self.ket)[(0, 0)].re
    }
}

/// An ordered list of 16 two-photon projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionSet {
    projectors: Vec<Projector>,
    convention: CircularConvention,
}

impl ProjectionSet {
    /// The canonical sequence with R = (1, −i)/√2.
    pub fn canonical() -> Self {
        Self::canonical_with(CircularConvention::default())
    }

    pub fn canonical_with(convention: CircularConvention) -> Self {
        Self::from_labels(&CANONICAL_LABELS, convention).expect("canonical labels are valid")
    }

    /// Builds a set from 16 labels. Fails on malformed or repeated labels;
    /// informational completeness is checked by [`super::DualBasis::new`].
    pub fn from_labels(labels: &[&str], convention: CircularConvention) -> Result<Self, TomographyError> {
        if labels.len() != NUM_PROJECTORS {
            return Err(TomographyError::Configuration(format!(
                "a projection set needs {NUM_PROJECTORS} projectors, got {}",
                labels.len()
            )));
        }
        let projectors = labels
            .iter()
            .map(|l| Projector::from_label(l, convention))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, p) in projectors.iter().enumerate() {
            if projectors[..i].iter().any(|q| q.label == p.label) {
                return Err(TomographyError::Configuration(format!("duplicate projector {}", p.label)));
            }
        }
        Ok(Self { projectors, convention })
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn convention(&self) -> CircularConvention {
        self.convention
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.projectors.iter().map(|p| p.label())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        let label = label.trim().to_ascii_uppercase();
        self.projectors.iter().position(|p| p.label == label)
    }

    pub fn get(&self, label: &str) -> Option<&Projector> {
        self.index_of(label).map(|i| &self.projectors[i])
    }

    /// Indices of HH, HV, VH, VV, whose probabilities sum to the trace.
    pub fn computational_indices(&self) -> Result<[usize; 4], TomographyError> {
        let mut out = [0; 4];
        for (slot, label) in out.iter_mut().zip(["HH", "HV", "VH", "VV"]) {
            *slot = self.index_of(label).ok_or_else(|| {
                TomographyError::Configuration(format!("projection set lacks the {label} projector"))
            })?;
        }
        Ok(out)
    }

    /// Gram matrix `G_μν = Tr(P_μ P_ν) = |⟨μ|ν⟩|²`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.projectors.len();
        DMatrix::from_fn(n, n, |i, j| {
            self.projectors[i].ket.dotc(&self.projectors[j].ket).norm_sqr()
        })
    }

    /// Ratio of the largest to the smallest singular value of the Gram matrix.
    pub fn gram_condition(&self) -> f64 {
        let sv = self.gram().singular_values();
        let max = sv.max();
        let min = sv.min();
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Born probabilities of `rho` for each projector, in set order.
    pub fn expected_probabilities(&self, rho: &DensityMatrix) -> [f64; NUM_PROJECTORS] {
        let mut out = [0.0; NUM_PROJECTORS];
        for (slot, p) in out.iter_mut().zip(&self.projectors) {
            *slot = p.probability(rho.matrix());
        }
        out
    }
}

impl fmt::Display for ProjectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.labels().collect();
        f.write_str(&labels.join(","))
    }
}

/// Born probabilities over a projection set.
pub fn expected_probabilities(rho: &DensityMatrix, set: &ProjectionSet) -> [f64; NUM_PROJECTORS] {
    set.expected_probabilities(rho)
}
