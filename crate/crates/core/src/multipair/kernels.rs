//! Per-pair-number coincidence probabilities for threshold detectors.
//!
//! A pulse carrying `x` pairs emits each pair as HH or VV with probability
//! 1/2. Arm 1 always analyzes H; arm 2 analyzes H, V or R depending on the
//! projection class. Each transmitted photon is detected with probability
//! α and an arm fires if it detects at least one photon.
//!
//! In the simultaneous-detection model each pair lands inside the
//! coincidence window with probability η; otherwise only one of its photons
//! is registered, in arm 1 or arm 2 with probability (1 − η)/2 each.
//!
//! The `h` kernels are evaluated with `{1 − (1 − α)^j}` inside the sums.
//! Read as `{1 − (1 − α)}^j = α^j` the printed form would not reproduce the
//! `α²(μ/4 + μ²/4)` small-μ behaviour of the HR class.

use super::{ModelError, ProjectionClass};

/// e^{−μ} μ^x / x!, in log space for x > 20.
pub fn poisson_pmf(x: u32, mu: f64) -> f64 {
    if mu == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if x <= 20 {
        let mut term = (-mu).exp();
        for k in 1..=x {
            term *= mu / k as f64;
        }
        term
    } else {
        let ln_fact: f64 = (2..=x).map(|k| (k as f64).ln()).sum();
        (-mu + x as f64 * mu.ln() - ln_fact).exp()
    }
}

/// Row `n` of Pascal's triangle.
fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0; n as usize + 1];
    for k in 1..n as usize {
        row[k] = row[k - 1] * (n as usize + 1 - k) as f64 / k as f64;
        row[k] = row[k].round();
    }
    row
}

/// Triangle of binomial coefficients up to row `n`.
struct Binomials(Vec<Vec<f64>>);

impl Binomials {
    fn up_to(n: u32) -> Self {
        Self((0..=n).map(binomial_row).collect())
    }

    fn get(&self, n: usize, k: usize) -> f64 {
        self.0[n][k]
    }
}

/// `1 − (1 − α)^n` for n = 0..=max, without cancellation at small α.
fn detect_any(alpha: f64, max: u32) -> Vec<f64> {
    let log_miss = (-alpha).ln_1p();
    // n = 0 is kept out of the product: at α = 1 it would be 0·(−∞)
    (0..=max)
        .map(|n| if n == 0 { 0.0 } else { -(n as f64 * log_miss).exp_m1() })
        .collect()
}

fn check_alpha(alpha: f64) -> Result<(), ModelError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(ModelError::Domain(format!("detection efficiency must lie in (0, 1], got {alpha}")))
    }
}

fn check_eta(eta: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(ModelError::Domain(format!(
            "simultaneous detection efficiency must lie in [0, 1], got {eta}"
        )))
    }
}

/// Coincidence probability for `x` pairs, all inside the coincidence
/// window: f(x), g(x) or h(x) for the HH, HV and HR classes.
pub fn class_prob_unprimed(x: u32, alpha: f64, class: ProjectionClass) -> Result<f64, ModelError> {
    check_alpha(alpha)?;
    let binom = binomial_row(x);
    let a = detect_any(alpha, x);
    let half_x = 0.5f64.powi(x as i32);
    let xs = x as usize;
    let value = match class {
        ProjectionClass::HH => (0..=xs).map(|y| binom[y] * half_x * a[xs - y] * a[xs - y]).sum(),
        ProjectionClass::HV => (0..=xs).map(|y| binom[y] * half_x * a[xs - y] * a[y]).sum(),
        ProjectionClass::HR => {
            let arm: f64 = (0..=xs).map(|j| binom[j] * half_x * a[j]).sum();
            arm * arm
        }
    };
    Ok(value)
}

/// Multinomial split weight X(x, k, m, η): k pairs inside the window,
/// x − k − m lone photons in arm 1 and m in arm 2.
pub fn pair_split_weight(x: u32, k: u32, m: u32, eta: f64) -> Result<f64, ModelError> {
    check_eta(eta)?;
    if k > x || m > x - k {
        return Err(ModelError::Domain(format!(
            "split indices need 0 ≤ k ≤ x and 0 ≤ m ≤ x − k, got x={x}, k={k}, m={m}"
        )));
    }
    let binom = Binomials::up_to(x);
    Ok(split_weight(&binom, x as usize, k as usize, m as usize, eta))
}

fn split_weight(binom: &Binomials, x: usize, k: usize, m: usize, eta: f64) -> f64 {
    let lone = (1.0 - eta) / 2.0;
    eta.powi(k as i32) * lone.powi((x - k) as i32) * binom.get(x, k) * binom.get(x - k, m)
}

/// The f(x,k,m), g(x,k,m), h(x,k,m) kernels for a fixed split.
fn split_kernel(
    binom: &Binomials,
    a: &[f64],
    x: usize,
    k: usize,
    m: usize,
    class: ProjectionClass,
) -> f64 {
    let lone1 = x - k - m;
    match class {
        ProjectionClass::HH | ProjectionClass::HV => {
            let half_x = 0.5f64.powi(x as i32);
            let mut acc = 0.0;
            for y in 0..=k {
                for z in 0..=lone1 {
                    for w in 0..=m {
                        let weight = half_x * binom.get(k, y) * binom.get(lone1, z) * binom.get(m, w);
                        let arm2 = match class {
                            ProjectionClass::HH => a[y + w],
                            _ => a[k - y + m - w],
                        };
                        acc += weight * a[y + z] * arm2;
                    }
                }
            }
            acc
        }
        ProjectionClass::HR => {
            let n1 = x - m;
            let n2 = k + m;
            let half1 = 0.5f64.powi(n1 as i32);
            let half2 = 0.5f64.powi(n2 as i32);
            let arm1: f64 = (0..=n1).map(|y| half1 * binom.get(n1, y) * a[n1 - y]).sum();
            let arm2: f64 = (0..=n2).map(|z| half2 * binom.get(n2, z) * a[n2 - z]).sum();
            arm1 * arm2
        }
    }
}

fn primed_with(binom: &Binomials, a: &[f64], x: usize, eta: f64, class: ProjectionClass) -> f64 {
    let mut acc = 0.0;
    for k in 0..=x {
        for m in 0..=x - k {
            let w = split_weight(binom, x, k, m, eta);
            if w != 0.0 {
                acc += w * split_kernel(binom, a, x, k, m, class);
            }
        }
    }
    acc
}

/// Coincidence probability for `x` pairs with simultaneous detection
/// efficiency η: f′(x, η), g′(x, η) or h′(x, η).
pub fn class_prob_primed(x: u32, alpha: f64, eta: f64, class: ProjectionClass) -> Result<f64, ModelError> {
    check_alpha(alpha)?;
    check_eta(eta)?;
    let binom = Binomials::up_to(x);
    let a = detect_any(alpha, x);
    Ok(primed_with(&binom, &a, x as usize, eta, class))
}

/// Class probabilities for x = 0..=n_max, computed once and reused across
/// many mean pair numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    alpha: f64,
    eta: Option<f64>,
    hh: Vec<f64>,
    hv: Vec<f64>,
    hr: Vec<f64>,
}

impl KernelTable {
    /// Kernels with every pair inside the coincidence window.
    pub fn unprimed(alpha: f64, n_max: u32) -> Result<Self, ModelError> {
        check_alpha(alpha)?;
        let column = |class| {
            (0..=n_max)
                .map(|x| class_prob_unprimed(x, alpha, class))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(Self {
            alpha,
            eta: None,
            hh: column(ProjectionClass::HH)?,
            hv: column(ProjectionClass::HV)?,
            hr: column(ProjectionClass::HR)?,
        })
    }

    /// Kernels with simultaneous detection efficiency η.
    pub fn primed(alpha: f64, eta: f64, n_max: u32) -> Result<Self, ModelError> {
        check_alpha(alpha)?;
        check_eta(eta)?;
        let binom = Binomials::up_to(n_max);
        let a = detect_any(alpha, n_max);
        let column = |class| {
            (0..=n_max as usize)
                .map(|x| primed_with(&binom, &a, x, eta, class))
                .collect::<Vec<_>>()
        };
        Ok(Self {
            alpha,
            eta: Some(eta),
            hh: column(ProjectionClass::HH),
            hv: column(ProjectionClass::HV),
            hr: column(ProjectionClass::HR),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `None` for the unprimed table.
    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    pub fn n_max(&self) -> u32 {
        (self.hh.len() - 1) as u32
    }

    pub fn get(&self, x: u32, class: ProjectionClass) -> f64 {
        let col = match class {
            ProjectionClass::HH => &self.hh,
            ProjectionClass::HV => &self.hv,
            ProjectionClass::HR => &self.hr,
        };
        col[x as usize]
    }

    /// Poisson-weighted sums Σ_{x ≤ n_max} kernel(x)·P(x; μ).
    pub fn poisson_sums(&self, mu: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for x in 0..self.hh.len() {
            let p = poisson_pmf(x as u32, mu);
            out[0] += self.hh[x] * p;
            out[1] += self.hv[x] * p;
            out[2] += self.hr[x] * p;
        }
        out
    }
}
