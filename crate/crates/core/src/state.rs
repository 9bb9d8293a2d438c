//! Two-photon polarization states in the fixed basis |HH⟩, |HV⟩, |VH⟩, |VV⟩.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use thiserror::Error;

/// Index of each computational basis vector.
pub const HH: usize = 0;
pub const HV: usize = 1;
pub const VH: usize = 2;
pub const VV: usize = 3;

/// Tolerance on `|ρ_ij − conj(ρ_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("state failed validation: {0}")]
    Invalid(Diagnostics),
    #[error("pure state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A 4×4 complex matrix meant to be a two-photon density matrix.
///
/// The type does not enforce physicality: linear tomography may produce
/// matrices with small negative eigenvalues. Use [`DensityMatrix::validate`]
/// to check the Hermitian, unit-trace and PSD invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Matrix4<Complex64>);

/// A normalized two-photon pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vector4<Complex64>);

/// Outcome of [`DensityMatrix::validate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

/// Acceptance thresholds for [`Diagnostics`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    /// Eigenvalues down to `-psd` are accepted.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: HERMITIAN_TOL,
            trace: TRACE_TOL,
            psd: PSD_TOL,
        }
    }
}

impl Diagnostics {
    pub fn hermitian_ok(&self, tol: &Tolerances) -> bool {
        self.hermiticity_deviation <= tol.hermitian
    }

    pub fn trace_ok(&self, tol: &Tolerances) -> bool {
        self.trace_deviation <= tol.trace
    }

    pub fn psd_ok(&self, tol: &Tolerances) -> bool {
        self.min_eigenvalue >= -tol.psd
    }

    pub fn passes_with(&self, tol: &Tolerances) -> bool {
        self.hermitian_ok(tol) && self.trace_ok(tol) && self.psd_ok(tol)
    }

    pub fn passes(&self) -> bool {
        self.passes_with(&Tolerances::default())
    }

    /// Names of the invariants that fail under `tol`.
    pub fn failures(&self, tol: &Tolerances) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.hermitian_ok(tol) {
            out.push("Hermiticity");
        }
        if !self.trace_ok(tol) {
            out.push("unit trace");
        }
        if !self.psd_ok(tol) {
            out.push("positive semidefiniteness");
        }
        out
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity_deviation={:e}, trace_deviation={:e}, min_eigenvalue={:e}",
            self.hermiticity_deviation, self.trace_deviation, self.min_eigenvalue
        )?;
        let failed = self.failures(&Tolerances::default());
        if !failed.is_empty() {
            write!(f, " (failed: {})", failed.join(", "))?;
        }
        Ok(())
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Hermitian part `(A + A†)/2`.
pub(crate) fn hermitize(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * c(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let eig = hermitize(m).symmetric_eigenvalues();
    let mut vals = [eig[0], eig[1], eig[2], eig[3]];
    vals.sort_by(f64::total_cmp);
    vals
}

impl DensityMatrix {
    /// Wraps a matrix without checking any invariant.
    pub fn from_matrix(m: Matrix4<Complex64>) -> Self {
        Self(m)
    }

    /// Builds from row-major entries.
    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        Self(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    /// The ideal entangled state (|HH⟩ + |VV⟩)/√2 as a density matrix.
    pub fn ideal_bell() -> Self {
        PureState::ideal_bell().density()
    }

    /// I/4.
    pub fn totally_mixed() -> Self {
        Self(Matrix4::identity() * c(0.25))
    }

    /// Werner state `(1−g)·ρ_ideal + g·I/4`.
    pub fn werner(g: f64) -> Result<Self, StateError> {
        if !(0.0..=1.0).contains(&g) {
            return Err(StateError::Domain(format!(
                "Werner mixing parameter must lie in [0, 1], got {g}"
            )));
        }
        Ok(Self::werner_unchecked(g))
    }

    pub(crate) fn werner_unchecked(g: f64) -> Self {
        Self(Self::ideal_bell().0 * c(1.0 - g) + Self::totally_mixed().0 * c(g))
    }

    /// Convex combination `a·self + (1−a)·other`.
    pub fn mix(&self, other: &Self, a: f64) -> Self {
        Self(self.0 * c(a) + other.0 * c(1.0 - a))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4<Complex64> {
        self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.0)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Diagnostics {
        let m = &self.0;
        let hermiticity_deviation = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let trace_deviation = (m.trace() - c(1.0)).norm();
        Diagnostics {
            hermiticity_deviation,
            trace_deviation,
            min_eigenvalue: self.eigenvalues()[0],
        }
    }

    /// Validates against the default tolerances.
    pub fn checked(self) -> Result<Self, StateError> {
        let d = self.validate();
        if d.passes() {
            Ok(self)
        } else {
            Err(StateError::Invalid(d))
        }
    }

    /// Plain-text form: four lines of four `a+bi` entries.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| format_complex(self.0[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the plain-text form. Blank lines and `#` comments are skipped.
    /// Entries may be written `a+bi` or `(a,b)`.
    pub fn parse_text(text: &str) -> Result<Self, StateError> {
        let mut rows = Vec::with_capacity(4);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let entries = split_entries(line)
                .into_iter()
                .map(|tok| {
                    parse_complex(&tok).map_err(|message| StateError::Parse {
                        line: idx + 1,
                        message,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if entries.len() != 4 {
                return Err(StateError::Parse {
                    line: idx + 1,
                    message: format!("expected 4 entries, found {}", entries.len()),
                });
            }
            rows.push((idx + 1, entries));
        }
        if rows.len() != 4 {
            return Err(StateError::Parse {
                line: rows.last().map_or(0, |r| r.0),
                message: format!("expected 4 rows, found {}", rows.len()),
            });
        }
        Ok(Self(Matrix4::from_fn(|i, j| rows[i].1[j])))
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for DensityMatrix {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s)
    }
}

impl PureState {
    pub fn new(amplitudes: Vector4<Complex64>) -> Result<Self, StateError> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(amplitudes: Vector4<Complex64>) -> Result<Self, StateError> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(Self(amplitudes / c(norm)))
    }

    /// (|HH⟩ + |VV⟩)/√2.
    pub fn ideal_bell() -> Self {
        let a = c(std::f64::consts::FRAC_1_SQRT_2);
        Self(Vector4::new(a, c(0.0), c(0.0), a))
    }

    pub fn amplitudes(&self) -> &Vector4<Complex64> {
        &self.0
    }

    pub fn is_normalized(&self) -> bool {
        (self.0.norm() - 1.0).abs() <= NORM_TOL
    }

    /// |ψ⟩⟨ψ|.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(self.0 * self.0.adjoint())
    }
}

pub(crate) fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// Splits a row on whitespace, keeping `( a , b )` groups together.
fn split_entries(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for ch in line.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            c if c.is_whitespace() => {
                if depth == 0 && !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub(crate) fn parse_complex(tok: &str) -> Result<Complex64, String> {
    let bad = |what: &str| format!("invalid complex entry {tok:?}: {what}");
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
    if let Some(inner) = tok.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(|| bad("missing ')'"))?;
        let (re, im) = inner.split_once(',').ok_or_else(|| bad("missing ','"))?;
        return Ok(Complex64::new(num(re)?, num(im)?));
    }
    let Some(body) = tok.strip_suffix('i').or_else(|| tok.strip_suffix('j')) else {
        return Ok(c(num(tok)?));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let im = match &body[k..] {
                "+" => 1.0,
                "-" => -1.0,
                s => num(s)?,
            };
            Ok(Complex64::new(num(&body[..k])?, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => num(s)?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}
