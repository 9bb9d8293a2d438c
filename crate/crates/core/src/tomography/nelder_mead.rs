//! Downhill simplex minimization with dimension-adaptive coefficients
//! (Gao & Han, 2012), which behave better than the classic 1/2/0.5/0.5
//! choice above a handful of parameters.

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Stop when `f_worst − f_best ≤ rel_tol · max(|f_best|, abs_floor)`.
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_evaluations: usize,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_floor: 1.0,
            max_evaluations: 200_000,
            initial_step: 0.05,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Largest vertex distance from the best vertex at termination.
    pub step: f64,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn for_dimension(n: usize) -> Self {
        let n = n.max(2) as f64;
        Self {
            reflect: 1.0,
            expand: 1.0 + 2.0 / n,
            contract: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let coef = Coefficients::for_dimension(n);
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evaluations);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut evaluations);
        simplex.push((x, v));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if worst - best <= opts.rel_tol * best.abs().max(opts.abs_floor) {
            converged = true;
            break;
        }
        if evaluations >= opts.max_evaluations {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst_x = simplex[n].0.clone();
        let second_worst = simplex[n - 1].1;

        let reflected = lerp(&centroid, &worst_x, -coef.reflect);
        let fr = eval(&reflected, &mut evaluations);
        if fr < best {
            let expanded = lerp(&centroid, &worst_x, -coef.reflect * coef.expand);
            let fe = eval(&expanded, &mut evaluations);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (candidate, target) = if fr < worst {
            (lerp(&centroid, &reflected, coef.contract), fr)
        } else {
            (lerp(&centroid, &worst_x, coef.contract), worst)
        };
        let fc = eval(&candidate, &mut evaluations);
        if fc < target {
            simplex[n] = (candidate, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&anchor, &vertex.0, coef.shrink);
            let v = eval(&x, &mut evaluations);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let step = simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(&simplex[0].0)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let (x, value) = simplex.swap_remove(0);
    NelderMeadOutcome {
        x,
        value,
        evaluations,
        converged,
        step,
    }
}
