//! Property-based checks of the structural contracts: embedding geometry,
//! holdout window layout, transform identities, summary invariances, rank
//! bookkeeping, selection idempotence, and metric scale behavior.

use proptest::prelude::*;
use vest_core::evaluate::{ascending_ranks, average_rank};
use vest_core::matrix::FeatureMatrix;
use vest_core::pipeline::{apply_selection, fit_selection, SelectionConfig};
use vest_core::series::{embed, repeated_holdout, TimeSeries};
use vest_core::summary::{compute_all, SummaryId};
use vest_core::transform::{TransformContext, TransformId};
use vest_core::{bayes_sign_test, mase, percentage_difference, Error};
use vest_oracles::close;

fn series_strategy(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, min_len..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_reconstructs_the_series(
        values in series_strategy(10, 60),
        p in 1usize..8,
    ) {
        prop_assume!(p < values.len());
        let series = TimeSeries::new(values.clone(), None, "t").unwrap();
        let ds = embed(&series, p).unwrap();
        prop_assert_eq!(ds.len(), values.len() - p);
        for row in ds.rows() {
            prop_assert_eq!(row.target, values[row.target_index]);
            // lags are most recent first: lags[j] = y[t - 1 - j]
            for (j, lag) in row.lags.iter().enumerate() {
                prop_assert_eq!(*lag, values[row.target_index - 1 - j]);
            }
        }
        let targets: Vec<f64> = ds.targets();
        prop_assert_eq!(&targets[..], &values[p..]);
    }

    #[test]
    fn holdout_windows_are_contiguous_and_in_bounds(
        n in 60usize..2000,
        reps in 1usize..12,
        train_frac in 0.5f64..0.75,
        test_frac in 0.1f64..0.25,
    ) {
        let windows = repeated_holdout(n, reps, train_frac, test_frac).unwrap();
        prop_assert_eq!(windows.len(), reps);
        let train_len = (n as f64 * train_frac).floor() as usize;
        let test_len = (n as f64 * test_frac).floor() as usize;
        let mut last_origin = None;
        for w in &windows {
            prop_assert_eq!(w.validation.end - w.validation.start, train_len / 10);
            prop_assert_eq!(w.train.end, w.validation.start);
            prop_assert_eq!(w.validation.end, w.test.start);
            prop_assert_eq!(w.test.end - w.test.start, test_len);
            prop_assert_eq!(w.train.end - w.train.start, train_len - train_len / 10);
            prop_assert!(w.test.end <= n);
            if let Some(prev) = last_origin {
                prop_assert!(w.train.start >= prev);
            }
            last_origin = Some(w.train.start);
        }
        prop_assert_eq!(windows[0].train.start, 0);
        if reps > 1 {
            prop_assert_eq!(windows[reps - 1].test.end, n);
        }
    }

    #[test]
    fn second_difference_is_difference_of_differences(v in series_strategy(3, 40)) {
        let ctx = TransformContext::unfitted(None);
        let d1 = TransformId::Diff.apply(&v, 0, &ctx).unwrap();
        let d2 = TransformId::Diff2.apply(&v, 0, &ctx).unwrap();
        let dd = TransformId::Diff.apply(&d1, 0, &ctx).unwrap();
        prop_assert_eq!(d2, dd);
    }

    #[test]
    fn seasonal_embeddings_lie_on_the_unit_circle(
        p in 1usize..40,
        start in 0usize..500,
        frequency in 2usize..24,
    ) {
        let ctx = TransformContext::unfitted(Some(frequency));
        let dummy = vec![0.0; p];
        let sin = TransformId::Sin.apply(&dummy, start, &ctx).unwrap();
        let cos = TransformId::Cos.apply(&dummy, start, &ctx).unwrap();
        for (s, c) in sin.iter().zip(&cos) {
            prop_assert!((s * s + c * c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wavelet_details_vanish_on_lines(
        a in -5.0f64..5.0,
        b in -2.0f64..2.0,
        p in 4usize..33,
    ) {
        let v: Vec<f64> = (0..p).map(|i| a + b * i as f64).collect();
        let ctx = TransformContext::unfitted(None);
        let d = TransformId::Dwt.apply(&v, 0, &ctx).unwrap();
        let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        // interior coefficients see a pure line; wraparound ones do not
        for (i, c) in d.iter().enumerate() {
            if 2 * i + 3 < p {
                prop_assert!(c.abs() <= 1e-10 * scale, "detail {i} = {c}");
            }
        }
    }

    #[test]
    fn summaries_shift_with_translation(
        v in series_strategy(12, 30),
        c in -50.0f64..50.0,
    ) {
        let base = compute_all(&v);
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let moved = compute_all(&shifted);
        let covariant = [
            SummaryId::Mean, SummaryId::Mdn, SummaryId::Min, SummaryId::Max,
            SummaryId::Lp, SummaryId::P05, SummaryId::P95,
        ];
        for id in covariant {
            let (a, b) = (base[id.index()], moved[id.index()]);
            prop_assert!(a.is_some() && b.is_some());
            prop_assert!(close(a.unwrap() + c, b.unwrap(), 1e-7),
                "{} moved {} vs {}", id, a.unwrap() + c, b.unwrap());
        }
        let invariant = [
            SummaryId::Sd, SummaryId::Var, SummaryId::Iqr, SummaryId::Slp,
            SummaryId::PvSt, SummaryId::Mad, SummaryId::PeakI, SummaryId::PeakD,
            SummaryId::Od,
        ];
        for id in invariant {
            if let (Some(a), Some(b)) = (base[id.index()], moved[id.index()]) {
                prop_assert!(close(a, b, 1e-7), "{} {} vs {}", id, a, b);
            }
        }
    }

    #[test]
    fn dispersion_summaries_scale_linearly(
        v in series_strategy(12, 30),
        a in 0.5f64..3.0,
    ) {
        let base = compute_all(&v);
        let scaled: Vec<f64> = v.iter().map(|x| a * x).collect();
        let sc = compute_all(&scaled);
        for id in [
            SummaryId::Sd, SummaryId::Iqr, SummaryId::Mad, SummaryId::Norm,
            SummaryId::Amp, SummaryId::PvSt,
        ] {
            if let (Some(x), Some(y)) = (base[id.index()], sc[id.index()]) {
                prop_assert!(close(a * x, y, 1e-7), "{} {} vs {}", id, a * x, y);
            }
        }
        if let (Some(x), Some(y)) = (base[SummaryId::Var.index()], sc[SummaryId::Var.index()]) {
            prop_assert!(close(a * a * x, y, 1e-7));
        }
    }

    #[test]
    fn summaries_are_never_non_finite(v in series_strategy(1, 40)) {
        for (id, value) in SummaryId::ALL.iter().zip(compute_all(&v)) {
            if let Some(x) = value {
                prop_assert!(x.is_finite(), "{} produced {}", id, x);
            }
        }
    }

    #[test]
    fn mase_is_scale_invariant(
        n in 4usize..30,
        a in 0.1f64..20.0,
        seed in 0u64..1000,
    ) {
        let mut rng = vest_oracles::seeded_rng(seed);
        use rand::Rng;
        let train: Vec<f64> = (0..50).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let actuals: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let forecasts: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let base = mase(&forecasts, &actuals, &train).unwrap();
        let scale = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| a * x).collect() };
        let scaled = mase(&scale(&forecasts), &scale(&actuals), &scale(&train)).unwrap();
        prop_assert!(close(base, scaled, 1e-9), "{} vs {}", base, scaled);
        let perfect = mase(&actuals, &actuals, &train).unwrap();
        prop_assert_eq!(perfect, 0.0);
    }

    #[test]
    fn ranks_are_a_tie_averaged_permutation(losses in prop::collection::vec(0.1f64..10.0, 2..9)) {
        let ranks = ascending_ranks(&losses);
        let m = losses.len();
        let sum: f64 = ranks.iter().sum();
        prop_assert!(close(sum, (m * (m + 1)) as f64 / 2.0, 1e-12));
        for r in &ranks {
            prop_assert!(*r >= 1.0 && *r <= m as f64);
        }
        // lower loss never ranks worse
        for i in 0..m {
            for j in 0..m {
                if losses[i] < losses[j] {
                    prop_assert!(ranks[i] < ranks[j]);
                }
            }
        }
    }

    #[test]
    fn average_ranks_conserve_mass(
        rows in prop::collection::vec(prop::collection::vec(0.1f64..10.0, 4), 2..12),
    ) {
        let stats = average_rank(&rows).unwrap();
        let total: f64 = stats.iter().map(|(mean, _)| mean).sum();
        prop_assert!(close(total, 4.0 * 5.0 / 2.0, 1e-9));
    }

    #[test]
    fn bayes_probabilities_form_a_distribution(
        diffs in prop::collection::vec(-5.0f64..5.0, 1..40),
        seed in 0u64..500,
    ) {
        let r = bayes_sign_test(&diffs, (-1.0, 1.0), 10_000, seed).unwrap();
        for p in [r.p_left, r.p_rope, r.p_right] {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        prop_assert!(close(r.p_left + r.p_rope + r.p_right, 1.0, 1e-9));
        let again = bayes_sign_test(&diffs, (-1.0, 1.0), 10_000, seed).unwrap();
        prop_assert_eq!(r.p_left, again.p_left);
        prop_assert_eq!(r.p_rope, again.p_rope);
        prop_assert_eq!(r.p_right, again.p_right);
    }

    #[test]
    fn percentage_difference_of_identical_losses_is_zero(x in 0.01f64..100.0) {
        prop_assert_eq!(percentage_difference(x, x).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn selection_bookkeeping_and_idempotence(
        cells in (3usize..7).prop_flat_map(|p| {
            prop::collection::vec(
                prop::collection::vec(prop::option::weighted(0.85, -10.0f64..10.0), p..=p),
                5..30,
            )
        }),
    ) {
        let p = cells[0].len();
        let names: Vec<String> = (0..p).map(|j| format!("C{j}")).collect();
        let n = cells.len();
        let matrix = FeatureMatrix::new(names, cells, (0..n).collect()).unwrap();
        let cfg = SelectionConfig::default();
        let model = match fit_selection(&matrix, &cfg) {
            Ok(m) => m,
            // every column can legitimately exceed the missing threshold
            Err(Error::AllFeaturesDropped) => return Ok(()),
            Err(e) => {
                return Err(proptest::test_runner::TestCaseError::fail(format!("{e}")))
            }
        };
        prop_assert_eq!(model.kept_columns.len() + model.drop_log.len(), p);
        for record in &model.drop_log {
            prop_assert!(!model.kept_columns.contains(&record.column));
        }

        let dense = apply_selection(&model, &matrix).unwrap();
        prop_assert_eq!(dense.n_rows(), n);
        prop_assert_eq!(dense.names(), &model.kept_columns[..]);
        for col in dense.columns() {
            prop_assert!(col.iter().all(|x| x.is_finite()));
        }

        // a second fit on the cleaned output must drop nothing
        let rows: Vec<Vec<Option<f64>>> = (0..n)
            .map(|i| dense.row(i).into_iter().map(Some).collect())
            .collect();
        let again = FeatureMatrix::new(
            dense.names().to_vec(),
            rows,
            dense.target_indices().to_vec(),
        )
        .unwrap();
        let refit = fit_selection(&again, &cfg).unwrap();
        prop_assert_eq!(&refit.kept_columns, &model.kept_columns);
        prop_assert!(refit.drop_log.is_empty());
    }
}
