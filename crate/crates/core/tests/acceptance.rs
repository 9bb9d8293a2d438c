//! Acceptance suite: each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use pairstate::metrics::{fidelity, linear_entropy, tangle, werner_curve};
use pairstate::multipair::{
    background_g, class_prob_primed, class_prob_unprimed, effective_g, g_vs_power_curve, monte_carlo_rates,
    pair_split_weight, rates_from_table, rates_primed, rates_unprimed, BackgroundModel, KernelTable, PowerCalibration,
    ProjectionClass, SourceParams,
};
use pairstate::pipeline::{run_sweep, run_tomo, sibling_path, RunConfig, Table};
use pairstate::tomography::{mle_reconstruct, simulate_counts, write_count_file, CountVector, ProjectionSet};
use pairstate::{DensityMatrix, PureState};

use common::{random_state, uhlmann_fidelity};

type Check = Result<String, String>;

const CAPTION_ETAS: [f64; 4] = [0.001, 0.03, 0.20, 1.00];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(mu: f64, alpha: f64, eta: f64, n_max: u32) -> SourceParams {
    SourceParams { mu, alpha, eta, n_max }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn werner_g_law() -> Check {
    let mut worst = 0.0f64;
    for mu in [0.01, 0.05, 0.1, 0.5, 1.0, 2.0] {
        let r = rates_primed(&params(mu, 0.005, 1.0, 15)).map_err(|e| e.to_string())?;
        let g = effective_g(&r.rates).map_err(|e| e.to_string())?;
        worst = worst.max(rel(g, mu / (1.0 + mu)));
    }
    ensure(worst <= 0.01, || format!("max relative error {worst:.3e} > 1%"))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn asymptotic_rates() -> Check {
    let mut worst = 0.0f64;
    for alpha in [0.001, 0.005, 0.01] {
        for mu in [0.01, 0.05, 0.1, 0.15, 0.2] {
            let r = rates_unprimed(&params(mu, alpha, 1.0, 15)).map_err(|e| e.to_string())?.rates;
            let a2 = alpha * alpha;
            worst = worst
                .max(rel(r.r_hh, a2 * (mu / 2.0 + mu * mu / 4.0)))
                .max(rel(r.r_hv, a2 * mu * mu / 4.0))
                .max(rel(r.r_hr, a2 * (mu / 4.0 + mu * mu / 4.0)));
        }
    }
    ensure(worst <= 0.02, || format!("max relative error {worst:.3e} > 2%"))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn oracle_agreement() -> Check {
    let mut worst = 0.0f64;
    let mut seed = 100;
    for mu in [0.1, 0.5, 1.0] {
        for alpha in [0.05, 0.2] {
            for eta in [0.03, 0.5, 1.0] {
                let p = params(mu, alpha, eta, 15);
                let analytic = rates_primed(&p).map_err(|e| e.to_string())?.rates;
                let mc = monte_carlo_rates(&p, 1_000_000, seed).map_err(|e| e.to_string())?;
                seed += 1;
                for z in mc.z_scores(&analytic) {
                    ensure(z < 3.0, || {
                        format!("μ={mu}, α={alpha}, η={eta}: |z| = {z:.2} (MC {:?}, analytic {analytic:?})", mc.rates)
                    })?;
                    worst = worst.max(z);
                }
            }
        }
    }
    Ok(format!("18 grid points, max |z| = {worst:.2}"))
}

fn reduction_identity() -> Check {
    let mut worst_reduction = 0.0f64;
    for x in 0..=10 {
        for alpha in [0.01, 0.1, 0.5] {
            for class in [ProjectionClass::HH, ProjectionClass::HV, ProjectionClass::HR] {
                let primed = class_prob_primed(x, alpha, 1.0, class).map_err(|e| e.to_string())?;
                let unprimed = class_prob_unprimed(x, alpha, class).map_err(|e| e.to_string())?;
                worst_reduction = worst_reduction.max((primed - unprimed).abs());
            }
        }
    }
    let mut worst_norm = 0.0f64;
    for x in 0..=15 {
        for eta in [0.001, 0.03, 0.2, 1.0] {
            let mut total = 0.0;
            for k in 0..=x {
                for m in 0..=x - k {
                    total += pair_split_weight(x, k, m, eta).map_err(|e| e.to_string())?;
                }
            }
            worst_norm = worst_norm.max((total - 1.0).abs());
        }
    }
    ensure(worst_reduction <= 1e-12, || format!("reduction error {worst_reduction:.3e}"))?;
    ensure(worst_norm <= 1e-12, || format!("weight normalization error {worst_norm:.3e}"))?;
    Ok(format!("reduction {worst_reduction:.1e}, normalization {worst_norm:.1e}"))
}

fn metric_closed_forms() -> Check {
    let bell = PureState::ideal_bell();
    let mut worst = 0.0f64;
    for i in 0..=100 {
        let g = i as f64 / 100.0;
        let rho = DensityMatrix::werner(g).map_err(|e| e.to_string())?;
        let f = fidelity(&rho, &bell).map_err(|e| e.to_string())?;
        let t = tangle(&rho);
        let s = linear_entropy(&rho);
        let purity = (1.0 - g).powi(2) + g * (1.0 - g) / 2.0 + g * g / 4.0;
        worst = worst
            .max((f - (1.0 - 0.75 * g)).abs())
            .max((t - (1.0 - 1.5 * g).max(0.0).powi(2)).abs())
            .max((s - 4.0 / 3.0 * (1.0 - purity)).abs());
        // entangled exactly while above the separable fidelity limit
        if g < 2.0 / 3.0 {
            ensure(t > 0.0 && f > 0.5, || format!("g={g}: T={t}, F={f}"))?;
        } else if g > 2.0 / 3.0 {
            ensure(t <= 1e-9 && f < 0.5, || format!("g={g}: T={t}, F={f}"))?;
        }
    }
    let rho = DensityMatrix::werner(werner_curve::SEPARABLE_THRESHOLD).map_err(|e| e.to_string())?;
    let f = fidelity(&rho, &bell).map_err(|e| e.to_string())?;
    let t = tangle(&rho);
    ensure((f - 0.5).abs() <= 1e-9 && t <= 1e-9, || format!("at g = 2/3: F={f}, T={t}"))?;
    ensure(worst <= 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.1e}; at g = 2/3 F = {f:.12}, T = {t:.1e}"))
}

fn sweep_config(dir: &std::path::Path) -> RunConfig {
    let mut c = RunConfig::default();
    c.eta_list = CAPTION_ETAS.to_vec();
    c.power_grid = (1..=200).map(f64::from).collect();
    c.pairs_per_power = Some(0.01);
    c.source.alpha = 0.005;
    c.output = Some(dir.join("sweep.csv"));
    c
}

fn trajectory() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = sweep_config(dir.path());
    let out = config.output.clone().unwrap();
    run_sweep(&config).map_err(|e| e.to_string())?;
    let curve = Table::read(&sibling_path(&out, "trajectory")).map_err(|e| e.to_string())?;
    let s_l = curve.column_f64("linear_entropy").map_err(|e| e.to_string())?;
    let t = curve.column_f64("tangle").map_err(|e| e.to_string())?;
    ensure((s_l[0], t[0]) == (0.0, 1.0), || format!("curve starts at ({}, {})", s_l[0], t[0]))?;
    for i in 1..t.len() {
        ensure(t[i] <= t[i - 1] && s_l[i] >= s_l[i - 1], || format!("not monotone at row {i}"))?;
    }
    let first_zero = t.iter().position(|&v| v == 0.0).ok_or("tangle never reaches 0")?;
    ensure((s_l[first_zero] - 8.0 / 9.0).abs() <= 1e-12, || {
        format!("T first vanishes at S_L = {}", s_l[first_zero])
    })?;

    let sweep = Table::read(&out).map_err(|e| e.to_string())?;
    let ms = sweep.column_f64("linear_entropy").map_err(|e| e.to_string())?;
    let mt = sweep.column_f64("tangle").map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (s, t) in ms.iter().zip(&mt) {
        worst = worst.max((t - werner_curve::tangle_at_linear_entropy(*s)).abs());
    }
    ensure(worst <= 1e-6, || format!("model point off the Werner line by {worst:.3e}"))?;
    Ok(format!(
        "{} curve points, T = 0 from S_L = {:.12}; {} model points within {worst:.1e}",
        t.len(),
        s_l[first_zero],
        ms.len()
    ))
}

fn fig3_structure() -> Check {
    let cal = PowerCalibration::new(1.0, "mu").map_err(|e| e.to_string())?;
    let mut mus: Vec<f64> = (1..=200).map(|i| i as f64 / 100.0).collect();
    mus.extend([0.05, 0.5]);
    mus.sort_by(f64::total_cmp);
    mus.dedup();
    let mut curves = Vec::new();
    for eta in CAPTION_ETAS {
        let curve = g_vs_power_curve(&cal, &params(0.0, 0.005, eta, 15), &mus).map_err(|e| e.to_string())?;
        let g: Vec<f64> = curve.iter().map(|p| p.g).collect();
        for i in 1..g.len() {
            ensure(g[i] >= g[i - 1], || format!("η={eta}: g decreases at μ={}", mus[i]))?;
        }
        curves.push(g);
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..mus.len() {
        for a in 0..curves.len() {
            for b in a + 1..curves.len() {
                min_gap = min_gap.min((curves[a][i] - curves[b][i]).abs());
            }
        }
    }
    ensure(min_gap > 1e-6, || format!("curves meet: min gap {min_gap:.3e}"))?;
    let unit = &curves[3];
    for mu in [0.01, 0.05, 0.1, 0.5, 1.0, 2.0] {
        let i = mus.iter().position(|&m| m == mu).ok_or("μ missing from grid")?;
        ensure(rel(unit[i], mu / (1.0 + mu)) <= 0.01, || format!("η=1 curve at μ={mu}: g={}", unit[i]))?;
    }
    let mut worst = 0.0f64;
    for alpha in [0.005, 0.05, 0.2] {
        for eta in CAPTION_ETAS {
            let short = KernelTable::primed(alpha, eta, 15).map_err(|e| e.to_string())?;
            let long = KernelTable::primed(alpha, eta, 30).map_err(|e| e.to_string())?;
            for &mu in mus.iter().filter(|&&m| m <= 1.0) {
                let a = rates_from_table(&short, mu).map_err(|e| e.to_string())?.rates;
                let b = rates_from_table(&long, mu).map_err(|e| e.to_string())?.rates;
                for (x, y) in [(a.r_hh, b.r_hh), (a.r_hv, b.r_hv), (a.r_hr, b.r_hr)] {
                    worst = worst.max(rel(x, y));
                }
            }
        }
    }
    ensure(worst < 1e-9, || format!("n_max 15 vs 30 relative difference {worst:.3e}"))?;
    Ok(format!("4 monotone curves, min gap {min_gap:.2e}; truncation difference {worst:.1e}"))
}

fn tomography_round_trip() -> Check {
    let set = ProjectionSet::canonical();
    let mut worst = 0.0f64;
    for seed in 0..12u64 {
        let truth = random_state(seed, 1 + (seed % 4) as usize);
        let counts = CountVector::expected(&truth, &set, 1e6).map_err(|e| e.to_string())?;
        let fit = mle_reconstruct(&counts, &set).map_err(|e| e.to_string())?;
        ensure(fit.state.validate().passes(), || format!("seed {seed}: {}", fit.state.validate()))?;
        worst = worst.max(fit.state.max_abs_diff(&truth));
    }
    ensure(worst < 1e-3, || format!("noiseless entrywise error {worst:.3e}"))?;

    let mut good = 0;
    let mut lowest = 1.0f64;
    for seed in 0..20u64 {
        let truth = random_state(1000 + seed, 1 + (seed % 4) as usize);
        let raw = simulate_counts(&truth, &set, 1e5, seed).map_err(|e| e.to_string())?;
        let counts = CountVector::with_computational_scale(*raw.counts(), &set).map_err(|e| e.to_string())?;
        let fit = mle_reconstruct(&counts, &set).map_err(|e| e.to_string())?;
        ensure(fit.state.validate().passes(), || format!("seed {seed}: {}", fit.state.validate()))?;
        let f = uhlmann_fidelity(&fit.state, &truth);
        lowest = lowest.min(f);
        if f >= 0.99 {
            good += 1;
        }
    }
    ensure(good >= 18, || format!("only {good}/20 seeds reach F ≥ 0.99 (lowest {lowest:.4})"))?;
    Ok(format!("noiseless error {worst:.1e}; {good}/20 seeds F ≥ 0.99 (lowest {lowest:.5})"))
}

fn calibration_anchor() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let set = ProjectionSet::canonical();
    let rho = DensityMatrix::werner(0.12).map_err(|e| e.to_string())?;
    let mut config = RunConfig::default();
    for seed in 0..5u64 {
        let counts = simulate_counts(&rho, &set, 1e6, seed).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("w012_{seed}.csv"));
        std::fs::write(&path, write_count_file(&counts, &set, &[])).map_err(|e| e.to_string())?;
        config.inputs.push(path);
    }
    let outcome = run_tomo(&config).map_err(|e| e.to_string())?;
    ensure(outcome.failures.is_empty(), || format!("{:?}", outcome.failures))?;
    let fs: Vec<f64> = outcome.records.iter().map(|r| r.metrics.fidelity).collect();
    for f in &fs {
        ensure((f - 0.91).abs() <= 0.01, || format!("fidelity {f}"))?;
    }
    Ok(format!("fidelities {}", fs.iter().map(|f| format!("{f:.4}")).collect::<Vec<_>>().join(", ")))
}

fn background_invariance() -> Check {
    let powers: Vec<f64> = (0..=40).map(|k| 10f64.powf(k as f64 / 20.0 - 1.0)).collect();
    for (s, b) in [(1.0, 0.1), (3.7, 0.002), (1e-3, 5.0), (0.25, 0.25)] {
        let model = BackgroundModel::new(s, b).map_err(|e| e.to_string())?;
        let reference = background_g(s, b, 1.0).map_err(|e| e.to_string())?;
        for &p in &powers {
            let g1 = background_g(s, b, p).map_err(|e| e.to_string())?;
            let g2 = model.g(p).map_err(|e| e.to_string())?;
            ensure(g1.to_bits() == reference.to_bits() && g2.to_bits() == reference.to_bits(), || {
                format!("s={s}, b={b}: g({p}) = {g1} vs {reference}")
            })?;
        }
    }
    Ok(format!("4 coefficient pairs x {} powers over [0.1, 10], bit-identical", powers.len()))
}

fn run(id: usize, title: &str, limit: Option<Duration>, f: fn() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let elapsed = start.elapsed();
    let result = match (result, limit) {
        (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
        (r, _) => r,
    };
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("[{tag}] criterion {id:>2}: {title}: {detail} ({elapsed:.2?})");
    result.is_ok()
}

fn main() {
    let secs = Duration::from_secs;
    let criteria: [(&str, Option<Duration>, fn() -> Check); 10] = [
        ("Werner-g law", Some(secs(1)), werner_g_law),
        ("asymptotic rates", Some(secs(1)), asymptotic_rates),
        ("Monte Carlo oracle agreement", Some(secs(120)), oracle_agreement),
        ("reduction identity and weight normalization", None, reduction_identity),
        ("metric closed forms", Some(secs(1)), metric_closed_forms),
        ("Werner (S_L, T) trajectory", Some(secs(1)), trajectory),
        ("g-vs-power curve structure and truncation", Some(secs(30)), fig3_structure),
        ("tomography round trip", Some(secs(120)), tomography_round_trip),
        ("calibration anchor F = 0.91", None, calibration_anchor),
        ("background invariance", None, background_invariance),
    ];
    let mut failed = 0;
    for (i, (title, limit, f)) in criteria.into_iter().enumerate() {
        if !run(i + 1, title, limit, f) {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
