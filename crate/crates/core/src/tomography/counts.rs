use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::projectors::{ProjectionSet, NUM_PROJECTORS};
use super::TomographyError;
use crate::state::DensityMatrix;

/// Coincidence counts per projector, in the order of a [`ProjectionSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct CountVector {
    counts: [f64; NUM_PROJECTORS],
    total_scale: f64,
}

impl CountVector {
    /// `total_scale` is the expected number of counts for a projector with
    /// unit probability.
    pub fn new(counts: [f64; NUM_PROJECTORS], total_scale: f64) -> Result<Self, TomographyError> {
        if let Some(bad) = counts.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(TomographyError::InvalidCounts(format!("count {bad} is not a non-negative number")));
        }
        if !(total_scale.is_finite() && total_scale > 0.0) {
            return Err(TomographyError::InvalidCounts(format!(
                "total scale must be positive, got {total_scale}"
            )));
        }
        Ok(Self { counts, total_scale })
    }

    /// Uses the HH + HV + VH + VV total as the scale.
    pub fn with_computational_scale(
        counts: [f64; NUM_PROJECTORS],
        set: &ProjectionSet,
    ) -> Result<Self, TomographyError> {
        let scale: f64 = set.computational_indices()?.iter().map(|&i| counts[i]).sum();
        if scale <= 0.0 {
            return Err(TomographyError::DegenerateCounts(
                "HH, HV, VH and VV counts are all zero".into(),
            ));
        }
        Self::new(counts, scale)
    }

    /// Noiseless counts `scale · p_ν` for a known state.
    pub fn expected(rho: &DensityMatrix, set: &ProjectionSet, scale: f64) -> Result<Self, TomographyError> {
        let p = set.expected_probabilities(rho);
        Self::new(p.map(|x| (x * scale).max(0.0)), scale)
    }

    pub fn counts(&self) -> &[f64; NUM_PROJECTORS] {
        &self.counts
    }

    pub fn total_scale(&self) -> f64 {
        self.total_scale
    }

    pub fn is_all_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0.0)
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Poisson-sampled counts with means `total_scale · p_ν`.
///
/// The generator is ChaCha8 seeded from `seed`, so equal inputs give equal
/// outputs on every platform.
pub fn simulate_counts(
    rho: &DensityMatrix,
    set: &ProjectionSet,
    total_scale: f64,
    seed: u64,
) -> Result<CountVector, TomographyError> {
    let probs = set.expected_probabilities(rho);
    simulate_from_probabilities(&probs, total_scale, seed)
}

/// As [`simulate_counts`] but from precomputed projector probabilities.
pub fn simulate_from_probabilities(
    probs: &[f64; NUM_PROJECTORS],
    total_scale: f64,
    seed: u64,
) -> Result<CountVector, TomographyError> {
    if !(total_scale.is_finite() && total_scale > 0.0) {
        return Err(TomographyError::InvalidCounts(format!(
            "total scale must be positive, got {total_scale}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0.0; NUM_PROJECTORS];
    for (slot, p) in counts.iter_mut().zip(probs) {
        let mean = total_scale * p.max(0.0);
        *slot = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| TomographyError::InvalidCounts(format!("Poisson mean {mean}: {e}")))?
                .sample(&mut rng)
        } else {
            0.0
        };
    }
    CountVector::new(counts, total_scale)
}

/// Parses `label,count` rows into set order. Lines starting with `#` and
/// blank lines are ignored, as is an optional `label,count` header.
pub fn parse_count_file(text: &str, set: &ProjectionSet) -> Result<[f64; NUM_PROJECTORS], TomographyError> {
    let mut counts = [f64::NAN; NUM_PROJECTORS];
    let mut seen = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let row = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| TomographyError::Parse { row, message };
        let (label, value) = line
            .split_once(',')
            .ok_or_else(|| err(format!("expected \"label,count\", got {line:?}")))?;
        let (label, value) = (label.trim(), value.trim());
        if label.eq_ignore_ascii_case("label") {
            continue;
        }
        let slot = set
            .index_of(label)
            .ok_or_else(|| err(format!("unknown projector label {label:?}")))?;
        let count: f64 = value
            .parse()
            .map_err(|_| err(format!("count {value:?} is not a number")))?;
        if !(count.is_finite() && count >= 0.0) {
            return Err(err(format!("count {value} must be non-negative")));
        }
        if !counts[slot].is_nan() {
            return Err(err(format!("duplicate row for {label}")));
        }
        counts[slot] = count;
        seen += 1;
    }
    if seen != NUM_PROJECTORS {
        let missing: Vec<&str> = set
            .labels()
            .zip(&counts)
            .filter(|(_, c)| c.is_nan())
            .map(|(l, _)| l)
            .collect();
        return Err(TomographyError::Parse {
            row: text.lines().count(),
            message: format!("expected {NUM_PROJECTORS} rows, missing {}", missing.join(",")),
        });
    }
    Ok(counts)
}

/// Writes `label,count` rows in set order, preceded by `#` comment lines.
pub fn write_count_file(counts: &CountVector, set: &ProjectionSet, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("# total_scale={}\n", counts.total_scale()));
    for (label, count) in set.labels().zip(counts.counts()) {
        out.push_str(&format!("{label},{count}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulate_is_deterministic() {
        let set = ProjectionSet::canonical();
        let rho = DensityMatrix::werner(0.3).unwrap();
        let a = simulate_counts(&rho, &set, 1e4, 7).unwrap();
        let b = simulate_counts(&rho, &set, 1e4, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate_counts(&rho, &set, 1e4, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simulated_mean_within_five_sigma() {
        let set = ProjectionSet::canonical();
        let hh = set.index_of("HH").unwrap();
        let hv = set.index_of("HV").unwrap();
        let mean = 5e4;
        for seed in 0..20 {
            let c = simulate_counts(&DensityMatrix::ideal_bell(), &set, 1e5, seed).unwrap();
            assert!((c.counts()[hh] - mean).abs() < 5.0 * mean.sqrt());
            assert_eq!(c.counts()[hv], 0.0);
        }
    }

    #[test]
    fn tiny_scale_gives_mostly_zero_counts() {
        let set = ProjectionSet::canonical();
        let c = simulate_counts(&DensityMatrix::ideal_bell(), &set, 1e-9, 3).unwrap();
        assert!(c.is_all_zero());
        assert!(simulate_counts(&DensityMatrix::ideal_bell(), &set, 0.0, 3).is_err());
    }

    #[test]
    fn count_vector_validation() {
        assert!(CountVector::new([1.0; 16], 0.0).is_err());
        let mut bad = [1.0; 16];
        bad[3] = -1.0;
        assert!(CountVector::new(bad, 1.0).is_err());
        let set = ProjectionSet::canonical();
        let mut c = [5.0; 16];
        for i in set.computational_indices().unwrap() {
            c[i] = 0.0;
        }
        assert!(matches!(
            CountVector::with_computational_scale(c, &set),
            Err(TomographyError::DegenerateCounts(_))
        ));
        let v = CountVector::with_computational_scale([2.0; 16], &set).unwrap();
        assert_eq!(v.total_scale(), 8.0);
    }

    #[test]
    fn count_file_round_trip_any_order() {
        let set = ProjectionSet::canonical();
        let c = simulate_counts(&DensityMatrix::werner(0.2).unwrap(), &set, 1e3, 1).unwrap();
        let text = write_count_file(&c, &set, &["source=test".into()]);
        assert_eq!(parse_count_file(&text, &set).unwrap(), *c.counts());

        let mut lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        lines.reverse();
        let shuffled = format!("label,count\n{}\n", lines.join("\n"));
        assert_eq!(parse_count_file(&shuffled, &set).unwrap(), *c.counts());
    }

    #[test]
    fn count_file_errors_name_rows() {
        let set = ProjectionSet::canonical();
        let err = parse_count_file("HH,1\nHV,abc\n", &set).unwrap_err();
        assert!(matches!(err, TomographyError::Parse { row: 2, .. }), "{err}");
        let err = parse_count_file("HH,1\nXY,2\n", &set).unwrap_err();
        assert!(matches!(err, TomographyError::Parse { row: 2, .. }));
        let err = parse_count_file("HH,1\nHH,2\n", &set).unwrap_err();
        assert!(matches!(err, TomographyError::Parse { row: 2, .. }));
        let err = parse_count_file("HH,1\n", &set).unwrap_err();
        assert!(err.to_string().contains("missing"));
        let err = parse_count_file("HH;1\n", &set).unwrap_err();
        assert!(matches!(err, TomographyError::Parse { row: 1, .. }));
    }
}
