//! Seeded synthetic series for tests and the bundled demo corpus: a
//! stationary AR(2) core plus monthly seasonality, a mild linear trend, and
//! Gaussian noise.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::series::TimeSeries;

const FREQUENCY: usize = 12;
const BURN_IN: usize = 100;

fn series_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One synthetic series of length `n` for the given seed.
pub fn synthetic_series(n: usize, seed: u64, name: impl Into<String>) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi1 = rng.gen_range(0.4..0.7);
    let phi2 = rng.gen_range(-0.2..0.2);
    let noise = Normal::new(0.0, rng.gen_range(0.5..1.0)).unwrap();
    let amplitude = rng.gen_range(1.0..3.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let slope = rng.gen_range(0.0005..0.003) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let level = rng.gen_range(50.0..100.0);

    let mut ar_prev = 0.0;
    let mut ar_prev2 = 0.0;
    let mut step = |rng: &mut ChaCha8Rng| {
        let next = phi1 * ar_prev + phi2 * ar_prev2 + noise.sample(rng);
        ar_prev2 = ar_prev;
        ar_prev = next;
        next
    };
    for _ in 0..BURN_IN {
        step(&mut rng);
    }
    let values: Vec<f64> = (0..n)
        .map(|t| {
            let seasonal =
                amplitude * (std::f64::consts::TAU * t as f64 / FREQUENCY as f64 + phase).sin();
            level + slope * t as f64 + seasonal + step(&mut rng)
        })
        .collect();
    TimeSeries::new(values, Some(FREQUENCY), name).expect("generated series is valid")
}

/// A corpus of `count` series of length `n`, deterministically derived from
/// `base_seed`.
pub fn synthetic_corpus(count: usize, n: usize, base_seed: u64) -> Vec<TimeSeries> {
    (0..count)
        .map(|i| {
            synthetic_series(
                n,
                series_seed(base_seed, i as u64),
                format!("synthetic-{i:02}"),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_well_formed() {
        let a = synthetic_corpus(3, 200, 42);
        let b = synthetic_corpus(3, 200, 42);
        assert_eq!(a, b);
        for (i, s) in a.iter().enumerate() {
            assert_eq!(s.len(), 200);
            assert_eq!(s.frequency(), Some(12));
            assert_eq!(s.name(), format!("synthetic-{i:02}"));
            assert!(s.values().iter().all(|v| v.is_finite()));
        }
        assert_ne!(a[0].values(), a[1].values());
    }

    #[test]
    fn different_base_seeds_differ() {
        let a = synthetic_corpus(1, 100, 1);
        let b = synthetic_corpus(1, 100, 2);
        assert_ne!(a[0].values(), b[0].values());
    }

    #[test]
    fn seasonal_component_is_visible() {
        let s = synthetic_series(600, 9, "t");
        // lag-12 autocorrelation of the detrended series should be positive
        let v = s.values();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
        let lag12: f64 = (0..v.len() - 12)
            .map(|t| (v[t] - mean) * (v[t + 12] - mean))
            .sum();
        assert!(lag12 / var > 0.05, "lag-12 autocorrelation too weak");
    }
}
