//! The end-to-end comparison protocol: repeated holdout over each series,
//! per-window dimension search, feature engineering with frozen selection,
//! per-method lasso fits, and MASE aggregation. Also the sample-size study.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{
    average_rank, bayes_sign_test, mase, percentage_difference, select_embedding_dimension,
    BayesSignResult,
};
use crate::importance::{
    bf_restriction, bt_restriction, rrelieff, ImportanceReport, DEFAULT_NEIGHBORS,
};
use crate::learner::lasso_path_and_select;
use crate::matrix::DenseMatrix;
use crate::pipeline::{
    apply_selection, assemble, fit_selection, generate_features, lag_matrix, Method,
    SelectionConfig,
};
use crate::series::{embed_range, repeated_holdout, HoldoutWindow, TimeSeries};
use crate::transform::TransformContext;

/// Protocol parameters; the defaults reproduce the reference setup
/// (10 repetitions, 60/10 split with the last tenth of training held out for
/// validation, dimension search 10 to 30, thresholds 70/1/95).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub selection: SelectionConfig,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    pub train_frac: f64,
    pub test_frac: f64,
    pub p_min: usize,
    pub p_max: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            selection: SelectionConfig::default(),
            methods: Method::ALL.to_vec(),
            repetitions: 10,
            train_frac: 0.6,
            test_frac: 0.1,
            p_min: 10,
            p_max: 30,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.selection.validate()?;
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods configured".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
        }
        if self.p_min < 1 || self.p_min > self.p_max {
            return Err(Error::InvalidArgument(format!(
                "invalid dimension range {}..={}",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }
}

/// One scored (series, method, window) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaseRecord {
    pub series: String,
    pub method: Method,
    pub repetition: usize,
    pub mase: f64,
    /// Embedding dimension chosen for this window.
    pub dimension: usize,
}

/// All scores of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub methods: Vec<Method>,
    pub series_names: Vec<String>,
    pub records: Vec<MaseRecord>,
}

impl EvaluationReport {
    /// Mean MASE of one method on one series across repetitions.
    pub fn mean_mase(&self, series: &str, method: Method) -> Option<f64> {
        let scores: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.series == series && r.method == method)
            .map(|r| r.mase)
            .collect();
        (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
    }

    /// Mean MASE of one method across every series (series means averaged).
    pub fn overall_mean_mase(&self, method: Method) -> Option<f64> {
        let means: Vec<f64> = self
            .series_names
            .iter()
            .filter_map(|s| self.mean_mase(s, method))
            .collect();
        (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64)
    }

    /// Per-series losses in `(series, method)` table order.
    pub fn loss_table(&self) -> Vec<Vec<f64>> {
        self.series_names
            .iter()
            .map(|s| {
                self.methods
                    .iter()
                    .map(|&m| self.mean_mase(s, m).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    /// Mean rank and rank sd per method, ranked within each series.
    pub fn average_ranks(&self) -> Result<Vec<(Method, f64, f64)>> {
        let ranks = average_rank(&self.loss_table())?;
        Ok(self
            .methods
            .iter()
            .zip(ranks)
            .map(|(&m, (mean, sd))| (m, mean, sd))
            .collect())
    }

    /// Per-series percentage differences of every method against a
    /// benchmark method, computed on repetition-averaged MASE.
    pub fn percentage_differences(&self, benchmark: Method) -> Result<Vec<(Method, Vec<f64>)>> {
        if !self.methods.contains(&benchmark) {
            return Err(Error::UnknownId {
                kind: "benchmark method",
                name: benchmark.id().to_string(),
                valid: self
                    .methods
                    .iter()
                    .map(|m| m.id())
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        }
        let mut out = Vec::new();
        for &method in &self.methods {
            if method == benchmark {
                continue;
            }
            let mut diffs = Vec::new();
            for s in &self.series_names {
                let (Some(loss), Some(bench)) =
                    (self.mean_mase(s, method), self.mean_mase(s, benchmark))
                else {
                    continue;
                };
                diffs.push(percentage_difference(loss, bench)?);
            }
            out.push((method, diffs));
        }
        Ok(out)
    }

    /// Bayes sign tests of every method against the benchmark.
    pub fn bayes_comparisons(
        &self,
        benchmark: Method,
        rope: (f64, f64),
        draws: usize,
        seed: u64,
    ) -> Result<Vec<(Method, BayesSignResult)>> {
        self.percentage_differences(benchmark)?
            .into_iter()
            .map(|(m, diffs)| Ok((m, bayes_sign_test(&diffs, rope, draws, seed)?)))
            .collect()
    }

    /// Tidy CSV: series, method, repetition, dimension, mase.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "series,method,repetition,dimension,mase")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.series, r.method, r.repetition, r.dimension, r.mase
            )?;
        }
        Ok(())
    }
}

/// Everything fitted for one holdout window at its chosen dimension.
struct WindowFit {
    dimension: usize,
    lags_train: DenseMatrix,
    lags_val: DenseMatrix,
    lags_test: DenseMatrix,
    feats_train: DenseMatrix,
    feats_val: DenseMatrix,
    feats_test: DenseMatrix,
    y_train: Vec<f64>,
    y_val: Vec<f64>,
    y_test: Vec<f64>,
    importance: Option<ImportanceReport>,
}

fn fit_window(
    series: &TimeSeries,
    window: &HoldoutWindow,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<WindowFit> {
    let p = select_embedding_dimension(series, window, cfg.p_min, cfg.p_max)?;
    let ds = embed_range(series, p, window.span())?;

    // transform context and selection are fitted on the training block only
    let train_block = &series.values()[window.full_train()];
    let ctx = TransformContext::fit(train_block, series.frequency());
    let features = generate_features(&ds, &ctx)?;
    let selection = fit_selection(
        &features.slice_by_target(window.full_train()),
        &cfg.selection,
    )?;
    let engineered = apply_selection(&selection, &features)?;
    let lags = lag_matrix(&ds)?;

    let slice = |m: &DenseMatrix, r: &std::ops::Range<usize>| m.slice_by_target(r.clone());
    let targets = |r: &std::ops::Range<usize>| ds.slice_by_target(r.clone()).targets();

    let importance = if cfg.methods.iter().any(|m| m.uses_importance()) {
        let full = assemble(Method::ArVest, &lags, &engineered, None)?;
        let x = slice(&full, &window.full_train());
        let y = targets(&window.full_train());
        Some(rrelieff(&x, &y, DEFAULT_NEIGHBORS, None, seed)?)
    } else {
        None
    };

    Ok(WindowFit {
        dimension: p,
        lags_train: slice(&lags, &window.train),
        lags_val: slice(&lags, &window.validation),
        lags_test: slice(&lags, &window.test),
        feats_train: slice(&engineered, &window.train),
        feats_val: slice(&engineered, &window.validation),
        feats_test: slice(&engineered, &window.test),
        y_train: targets(&window.train),
        y_val: targets(&window.validation),
        y_test: targets(&window.test),
        importance,
    })
}

fn score_method(fit: &WindowFit, method: Method, train_block: &[f64]) -> Result<f64> {
    let restriction = match method {
        Method::ArBt => Some(bt_restriction(
            fit.importance.as_ref().expect("importance fitted"),
        )?),
        Method::ArBf => Some(bf_restriction(
            fit.importance.as_ref().expect("importance fitted"),
        )),
        _ => None,
    };
    let restriction = restriction.as_deref();
    let x_train = assemble(method, &fit.lags_train, &fit.feats_train, restriction)?;
    let x_val = assemble(method, &fit.lags_val, &fit.feats_val, restriction)?;
    let x_test = assemble(method, &fit.lags_test, &fit.feats_test, restriction)?;
    let model = lasso_path_and_select(&x_train, &fit.y_train, &x_val, &fit.y_val)?;
    let forecasts = model.predict(&x_test)?;
    mase(&forecasts, &fit.y_test, train_block)
}

/// Scores every configured method on one holdout window of one series.
pub fn run_window(
    series: &TimeSeries,
    window: &HoldoutWindow,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<(Method, usize, f64)>> {
    let fit = fit_window(series, window, cfg, seed)?;
    let train_block = &series.values()[window.full_train()];
    cfg.methods
        .iter()
        .map(|&m| Ok((m, fit.dimension, score_method(&fit, m, train_block)?)))
        .collect()
}

/// Feature importance on the combined lag + engineered matrix of one
/// holdout window, fitted exactly as the forecasting protocol fits it.
pub fn window_importance(
    series: &TimeSeries,
    window: &HoldoutWindow,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<ImportanceReport> {
    let mut forced = cfg.clone();
    if !forced.methods.iter().any(|m| m.uses_importance()) {
        forced.methods.push(Method::ArBt);
    }
    let fit = fit_window(series, window, &forced, seed)?;
    Ok(fit.importance.expect("importance fitted for ArBt"))
}

fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    // splitmix64 over the packed stream id
    let mut z = base
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the full repeated-holdout protocol over a corpus.
pub fn run_experiment(corpus: &[TimeSeries], cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }
    let mut records = Vec::new();
    for (si, series) in corpus.iter().enumerate() {
        let windows =
            repeated_holdout(series.len(), cfg.repetitions, cfg.train_frac, cfg.test_frac)?;
        for (rep, window) in windows.iter().enumerate() {
            let seed = mix_seed(cfg.seed, si as u64, rep as u64);
            for (method, dimension, score) in run_window(series, window, cfg, seed)? {
                records.push(MaseRecord {
                    series: series.name().to_string(),
                    method,
                    repetition: rep,
                    mase: score,
                    dimension,
                });
            }
        }
    }
    Ok(EvaluationReport {
        methods: cfg.methods.clone(),
        series_names: corpus.iter().map(|s| s.name().to_string()).collect(),
        records,
    })
}

/// The default size grid of the sample-size study: 100 to 3000 in steps of
/// 100.
pub fn default_size_grid() -> Vec<usize> {
    (1..=30).map(|i| i * 100).collect()
}

/// Mean rank per method at one truncation size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRanks {
    pub size: usize,
    /// Mean rank per method, aligned with the study's method list.
    pub mean_ranks: Vec<f64>,
}

/// Output of the sample-size study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeReport {
    pub methods: Vec<Method>,
    pub sizes: Vec<SizeRanks>,
    /// Series too short for the largest size, left out of the study.
    pub excluded_series: Vec<String>,
}

impl SampleSizeReport {
    pub fn mean_rank_at(&self, size: usize, method: Method) -> Option<f64> {
        let m = self.methods.iter().position(|&x| x == method)?;
        self.sizes
            .iter()
            .find(|s| s.size == size)
            .map(|s| s.mean_ranks[m])
    }

    /// Tidy CSV: size, method, mean_rank.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "size,method,mean_rank")?;
        for row in &self.sizes {
            for (m, rank) in self.methods.iter().zip(&row.mean_ranks) {
                writeln!(w, "{},{},{}", row.size, m, rank)?;
            }
        }
        Ok(())
    }
}

/// Truncates each qualifying series to every grid size and scores the
/// methods on a single 80/20 holdout per size, averaging ranks across
/// series. Series shorter than the largest size are excluded.
pub fn sample_size_study(
    corpus: &[TimeSeries],
    sizes: &[usize],
    cfg: &ExperimentConfig,
) -> Result<SampleSizeReport> {
    cfg.validate()?;
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("empty size grid".into()));
    }
    let max_size = *sizes.iter().max().unwrap();
    let (qualifying, excluded): (Vec<&TimeSeries>, Vec<&TimeSeries>) =
        corpus.iter().partition(|s| s.len() >= max_size);
    if qualifying.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no series has the {max_size} observations the largest size needs"
        )));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for (gi, &size) in sizes.iter().enumerate() {
        let mut losses = Vec::with_capacity(qualifying.len());
        for (si, series) in qualifying.iter().enumerate() {
            let truncated = series.truncated(size)?;
            let window = &repeated_holdout(size, 1, 0.8, 0.2)?[0];
            let seed = mix_seed(cfg.seed, si as u64, gi as u64);
            let scores = run_window(&truncated, window, cfg, seed)?;
            losses.push(scores.into_iter().map(|(_, _, m)| m).collect::<Vec<f64>>());
        }
        let ranks = average_rank(&losses)?;
        rows.push(SizeRanks {
            size,
            mean_ranks: ranks.into_iter().map(|(mean, _)| mean).collect(),
        });
    }
    Ok(SampleSizeReport {
        methods: cfg.methods.clone(),
        sizes: rows,
        excluded_series: excluded.iter().map(|s| s.name().to_string()).collect(),
    })
}
