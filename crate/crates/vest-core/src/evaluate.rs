//! Forecast scoring and comparison: MASE, percentage differences against a
//! benchmark, tie-averaged average ranks, the Bayes sign test, and the
//! embedding-dimension search.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::importance::tie_averaged_ranks;
use crate::learner::{lasso_path_and_select, mae};
use crate::pipeline::lag_matrix;
use crate::series::{embed_range, HoldoutWindow, TimeSeries};

/// Mean absolute scaled error: forecast MAE divided by the training-block
/// MAE of the one-step naive forecaster.
pub fn mase(forecasts: &[f64], actuals: &[f64], train_values: &[f64]) -> Result<f64> {
    if forecasts.is_empty() || forecasts.len() != actuals.len() {
        return Err(Error::MisalignedRows(format!(
            "{} forecasts vs {} actuals",
            forecasts.len(),
            actuals.len()
        )));
    }
    if train_values.len() < 2 {
        return Err(Error::InvalidArgument(
            "MASE needs at least 2 training values".into(),
        ));
    }
    let denom = train_values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .sum::<f64>()
        / (train_values.len() - 1) as f64;
    if denom == 0.0 {
        return Err(Error::ConstantTrainingSeries);
    }
    Ok(mae(forecasts, actuals) / denom)
}

/// Percentage difference of a loss against a benchmark loss (Eq. 1 style):
/// negative means the candidate beats the benchmark.
pub fn percentage_difference(loss: f64, benchmark: f64) -> Result<f64> {
    if benchmark.is_nan() || benchmark <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "benchmark loss must be positive, got {benchmark}"
        )));
    }
    Ok((loss - benchmark) / benchmark * 100.0)
}

/// Ranks ascending by loss (rank 1 = smallest) with average ranks for ties.
pub fn ascending_ranks(losses: &[f64]) -> Vec<f64> {
    let negated: Vec<f64> = losses.iter().map(|l| -l).collect();
    tie_averaged_ranks(&negated)
}

/// Mean and sd of each method's per-series rank.
///
/// `losses[s][m]` is the loss of method `m` on series `s`; every method must
/// be scored on every series. Sd is the sample sd (0 for a single series).
pub fn average_rank(losses: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    if losses.is_empty() {
        return Err(Error::InvalidArgument("no series to rank".into()));
    }
    let m = losses[0].len();
    if m == 0 || losses.iter().any(|row| row.len() != m) {
        return Err(Error::MisalignedRows(
            "every series must score every method".into(),
        ));
    }
    let per_series: Vec<Vec<f64>> = losses.iter().map(|row| ascending_ranks(row)).collect();
    let n = losses.len() as f64;
    Ok((0..m)
        .map(|j| {
            let mean = per_series.iter().map(|r| r[j]).sum::<f64>() / n;
            let sd = if losses.len() >= 2 {
                (per_series
                    .iter()
                    .map(|r| (r[j] - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            (mean, sd)
        })
        .collect())
}

/// Posterior probabilities of the Bayes sign test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesSignResult {
    /// Probability the differences fall left of the ROPE (candidate wins
    /// when differences are candidate minus benchmark).
    pub p_left: f64,
    /// Probability of practical equivalence.
    pub p_rope: f64,
    /// Probability the differences fall right of the ROPE.
    pub p_right: f64,
    pub rope: (f64, f64),
}

/// Bayes sign test on paired differences with a region of practical
/// equivalence.
///
/// Counts below / inside / above the ROPE parameterize a Dirichlet posterior
/// with one prior pseudo-observation placed in the ROPE; probabilities are
/// Monte-Carlo fractions of draws where each component is maximal, ties
/// split equally. Deterministic given the seed.
pub fn bayes_sign_test(
    diffs: &[f64],
    rope: (f64, f64),
    draws: usize,
    seed: u64,
) -> Result<BayesSignResult> {
    if diffs.is_empty() {
        return Err(Error::InvalidArgument("no differences to test".into()));
    }
    if rope.0 > rope.1 {
        return Err(Error::InvalidArgument(format!(
            "ROPE bounds out of order: [{}, {}]",
            rope.0, rope.1
        )));
    }
    if draws < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10000 draws, got {draws}"
        )));
    }
    let mut counts = [0.0f64, 1.0, 0.0]; // prior pseudo-observation in the ROPE
    for &d in diffs {
        if d < rope.0 {
            counts[0] += 1.0;
        } else if d > rope.1 {
            counts[2] += 1.0;
        } else {
            counts[1] += 1.0;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas: Vec<Option<Gamma<f64>>> = counts
        .iter()
        .map(|&a| (a > 0.0).then(|| Gamma::new(a, 1.0).expect("valid shape")))
        .collect();
    let mut wins = [0.0f64; 3];
    for _ in 0..draws {
        let sample: Vec<f64> = gammas
            .iter()
            .map(|g| match g {
                Some(g) => g.sample(&mut rng),
                None => 0.0, // zero-count component never wins
            })
            .collect();
        let max = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<usize> = (0..3).filter(|&i| sample[i] == max).collect();
        let share = 1.0 / top.len() as f64;
        for i in top {
            wins[i] += share;
        }
    }
    let n = draws as f64;
    Ok(BayesSignResult {
        p_left: wins[0] / n,
        p_rope: wins[1] / n,
        p_right: wins[2] / n,
        rope,
    })
}

/// Searches the embedding dimension for one holdout window by validation MAE
/// of a pure auto-regressive lasso; ties take the smallest dimension.
///
/// The upper bound shrinks to the largest dimension the window can support;
/// the search fails if even `p_min` does not fit.
pub fn select_embedding_dimension(
    series: &TimeSeries,
    window: &HoldoutWindow,
    p_min: usize,
    p_max: usize,
) -> Result<usize> {
    if p_min < 1 || p_min > p_max {
        return Err(Error::InvalidArgument(format!(
            "invalid dimension range {p_min}..={p_max}"
        )));
    }
    // lasso needs >= 2 training rows after embedding eats p targets
    let train_len = window.train.end - window.train.start;
    let feasible_max = p_max.min(train_len.saturating_sub(2));
    if feasible_max < p_min {
        return Err(Error::Holdout(format!(
            "window with {train_len} training points cannot support p = {p_min}"
        )));
    }
    let mut best: Option<(f64, usize)> = None;
    for p in p_min..=feasible_max {
        let ds = embed_range(series, p, window.span())?;
        let train = ds.slice_by_target(window.train.clone());
        let val = ds.slice_by_target(window.validation.clone());
        let x_train = lag_matrix(&train)?;
        let x_val = lag_matrix(&val)?;
        let model = lasso_path_and_select(&x_train, &train.targets(), &x_val, &val.targets())?;
        let val_mae = mae(&model.predict(&x_val)?, &val.targets());
        // strict improvement required, so the smallest dimension wins ties
        if best.is_none_or(|(m, _)| val_mae < m) {
            best = Some((val_mae, p));
        }
    }
    Ok(best.expect("range is non-empty").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::repeated_holdout;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn mase_perfect_forecast_is_zero() {
        let train = [1.0, 3.0, 2.0, 5.0];
        assert_eq!(mase(&[7.0, 8.0], &[7.0, 8.0], &train).unwrap(), 0.0);
    }

    #[test]
    fn mase_denominator_is_train_naive_mae() {
        // train diffs |2|,|1|,|3| -> denominator 2
        let train = [1.0, 3.0, 2.0, 5.0];
        let m = mase(&[4.0], &[8.0], &train).unwrap();
        assert_relative_eq!(m, 2.0);
    }

    #[test]
    fn mase_rejects_degenerate_input() {
        assert!(matches!(
            mase(&[1.0], &[1.0], &[5.0, 5.0, 5.0]),
            Err(Error::ConstantTrainingSeries)
        ));
        assert!(mase(&[], &[], &[1.0, 2.0]).is_err());
        assert!(mase(&[1.0], &[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(mase(&[1.0], &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn mase_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let train: Vec<f64> = (0..50).map(|_| rng.gen::<f64>() * 10.0).collect();
        let actuals: Vec<f64> = (0..10).map(|_| rng.gen::<f64>() * 10.0).collect();
        let forecasts: Vec<f64> = actuals.iter().map(|a| a + rng.gen::<f64>()).collect();
        let base = mase(&forecasts, &actuals, &train).unwrap();
        for a in [2.0, -3.5, 1e6] {
            let scale = |v: &[f64]| v.iter().map(|x| a * x).collect::<Vec<f64>>();
            let scaled = mase(&scale(&forecasts), &scale(&actuals), &scale(&train)).unwrap();
            assert_relative_eq!(scaled, base, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn percentage_difference_examples() {
        assert_relative_eq!(percentage_difference(11.0, 10.0).unwrap(), 10.0);
        assert_eq!(percentage_difference(10.0, 10.0).unwrap(), 0.0);
        assert_relative_eq!(percentage_difference(5.0, 10.0).unwrap(), -50.0);
        assert!(percentage_difference(1.0, 0.0).is_err());
    }

    #[test]
    fn rank_table_by_hand() {
        // 3 methods, 2 series
        let losses = vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0]];
        let ranks = average_rank(&losses).unwrap();
        assert_relative_eq!(ranks[0].0, 1.5);
        assert_relative_eq!(ranks[1].0, 1.5);
        assert_relative_eq!(ranks[2].0, 3.0);
        assert_relative_eq!(ranks[2].1, 0.0);
        assert_relative_eq!(ranks[0].1, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn rank_ties_and_conservation() {
        let losses = vec![vec![0.5, 0.5, 0.9], vec![0.2, 0.4, 0.1]];
        let ranks = average_rank(&losses).unwrap();
        // series 1 gives both leaders rank 1.5
        assert_relative_eq!(ascending_ranks(&losses[0])[0], 1.5);
        let mean_of_means = ranks.iter().map(|r| r.0).sum::<f64>() / 3.0;
        assert_relative_eq!(mean_of_means, 2.0); // (M + 1) / 2
    }

    #[test]
    fn best_everywhere_ranks_first() {
        let losses = vec![vec![0.1, 0.9], vec![0.2, 0.8], vec![0.3, 0.9]];
        let ranks = average_rank(&losses).unwrap();
        assert_eq!(ranks[0], (1.0, 0.0));
        assert_eq!(ranks[1], (2.0, 0.0));
    }

    #[test]
    fn bayes_requires_enough_draws() {
        assert!(bayes_sign_test(&[0.0], (-2.5, 2.5), 9_999, 0).is_err());
        assert!(bayes_sign_test(&[], (-2.5, 2.5), 10_000, 0).is_err());
        assert!(bayes_sign_test(&[0.0], (2.5, -2.5), 10_000, 0).is_err());
    }

    #[test]
    fn bayes_all_zero_diffs_land_in_rope() {
        let diffs = vec![0.0; 30];
        let r = bayes_sign_test(&diffs, (-2.5, 2.5), 10_000, 7).unwrap();
        assert!(r.p_rope > 0.99, "p_rope = {}", r.p_rope);
        assert_relative_eq!(r.p_left + r.p_rope + r.p_right, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn bayes_is_deterministic() {
        let diffs = [-3.0, -1.0, 0.5, 4.0, -2.6];
        let a = bayes_sign_test(&diffs, (-2.5, 2.5), 20_000, 42).unwrap();
        let b = bayes_sign_test(&diffs, (-2.5, 2.5), 20_000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_search_truncates_range() {
        // 50 observations: train block 30, fit slice 27 rows, p max 25
        let values: Vec<f64> = (0..50).map(|i| (i as f64 * 0.5).sin()).collect();
        let series = TimeSeries::new(values, None, "t").unwrap();
        let window = &repeated_holdout(50, 1, 0.6, 0.1).unwrap()[0];
        let p = select_embedding_dimension(&series, window, 10, 30).unwrap();
        assert!((10..=25).contains(&p), "p = {p}");
    }

    #[test]
    fn dimension_search_errors_when_too_short() {
        let values: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let series = TimeSeries::new(values, None, "t").unwrap();
        let window = &repeated_holdout(20, 1, 0.6, 0.1).unwrap()[0];
        assert!(select_embedding_dimension(&series, window, 10, 30).is_err());
    }
}
