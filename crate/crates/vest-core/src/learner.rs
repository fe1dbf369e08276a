//! Lasso regression by coordinate descent, the regularization path with
//! validation-based selection, and the naive one-step forecaster.
//!
//! Columns are standardized internally (mean 0, population sd 1), which makes
//! every coordinate update an exact soft-threshold step; the intercept is the
//! target mean and is never penalized. The penalized objective is
//! `(1/2n) * sum((y - yhat)^2) + lambda * sum(|beta|)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const CONVERGENCE_TOL: f64 = 1e-7;
const MAX_SWEEPS: usize = 10_000;
const PATH_LEN: usize = 50;
const PATH_RATIO: f64 = 1e-4;

/// A fitted linear model with its training standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub column_names: Vec<String>,
    /// Coefficients on the standardized scale, aligned with `column_names`.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Per-column training (mean, population sd); zero-sd columns keep
    /// coefficient 0.
    pub standardization: Vec<(f64, f64)>,
    pub lambda: f64,
}

impl LinearModel {
    /// Coefficients mapped back to the raw input scale, plus the raw
    /// intercept, for audit output.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let mut raw = Vec::with_capacity(self.coefficients.len());
        let mut intercept = self.intercept;
        for (beta, (mean, sd)) in self.coefficients.iter().zip(&self.standardization) {
            let b = if *sd > 0.0 { beta / sd } else { 0.0 };
            raw.push(b);
            intercept -= b * mean;
        }
        (raw, intercept)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("linear model serializes")
    }

    /// Predictions for a matrix with the model's columns in the same order.
    pub fn predict(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        if x.names() != self.column_names.as_slice() {
            return Err(Error::MisalignedRows(
                "prediction matrix columns differ from the fitted model".into(),
            ));
        }
        let mut out = vec![self.intercept; x.n_rows()];
        for (j, beta) in self.coefficients.iter().enumerate() {
            if *beta == 0.0 {
                continue;
            }
            let (mean, sd) = self.standardization[j];
            if sd == 0.0 {
                continue;
            }
            let scale = beta / sd;
            for (o, v) in out.iter_mut().zip(x.column(j)) {
                *o += scale * (v - mean);
            }
        }
        Ok(out)
    }
}

/// The naive forecast: the most recent lag.
pub fn naive_forecast(lags_most_recent_first: &[f64]) -> f64 {
    lags_most_recent_first[0]
}

struct Standardized {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
    stats: Vec<(f64, f64)>,
    y_mean: f64,
    y_centered: Vec<f64>,
}

fn standardize(x: &DenseMatrix, y: &[f64]) -> Result<Standardized> {
    let n = x.n_rows();
    if y.len() != n || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need matching X rows and targets with n >= 2, got {n} rows and {} targets",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("targets"));
    }
    let nf = n as f64;
    let mut cols = Vec::with_capacity(x.n_cols());
    let mut stats = Vec::with_capacity(x.n_cols());
    for c in 0..x.n_cols() {
        let col = x.column(c);
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("design matrix"));
        }
        let mean = col.iter().sum::<f64>() / nf;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf).sqrt();
        stats.push((mean, sd));
        if sd > 0.0 {
            cols.push(col.iter().map(|v| (v - mean) / sd).collect());
        } else {
            cols.push(vec![0.0; n]);
        }
    }
    let y_mean = y.iter().sum::<f64>() / nf;
    Ok(Standardized {
        names: x.names().to_vec(),
        cols,
        stats,
        y_mean,
        y_centered: y.iter().map(|v| v - y_mean).collect(),
    })
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

fn objective(residual: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let n = residual.len() as f64;
    residual.iter().map(|r| r * r).sum::<f64>() / (2.0 * n)
        + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

/// One coordinate-descent pass over `subset`; returns the largest
/// coefficient change. Residuals are maintained incrementally.
fn sweep(
    std: &Standardized,
    lambda: f64,
    beta: &mut [f64],
    residual: &mut [f64],
    subset: &[usize],
) -> f64 {
    let n = std.y_centered.len() as f64;
    let mut max_delta: f64 = 0.0;
    for &j in subset {
        let col = &std.cols[j];
        if std.stats[j].1 == 0.0 {
            continue;
        }
        // with unit-variance columns the coordinate minimizer is one
        // soft-threshold of rho = beta_j + (1/n) x_j' r
        let dot: f64 = col.iter().zip(residual.iter()).map(|(x, r)| x * r).sum();
        let rho = beta[j] + dot / n;
        let new = soft_threshold(rho, lambda);
        let delta = new - beta[j];
        if delta != 0.0 {
            for (r, x) in residual.iter_mut().zip(col) {
                *r -= delta * x;
            }
            beta[j] = new;
        }
        max_delta = max_delta.max(delta.abs());
    }
    max_delta
}

/// Coordinate descent at fixed lambda from a warm start. Full sweeps
/// alternate with sweeps over the active (nonzero) set until a full sweep
/// moves nothing beyond tolerance. Appends the post-sweep objective to
/// `trace` and returns the coefficients.
fn descend(std: &Standardized, lambda: f64, mut beta: Vec<f64>, trace: &mut Vec<f64>) -> Vec<f64> {
    let all: Vec<usize> = (0..std.cols.len()).collect();
    let mut residual = std.y_centered.clone();
    for (j, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            for (r, x) in residual.iter_mut().zip(&std.cols[j]) {
                *r -= b * x;
            }
        }
    }
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let full_delta = sweep(std, lambda, &mut beta, &mut residual, &all);
        sweeps += 1;
        trace.push(objective(&residual, &beta, lambda));
        if full_delta < CONVERGENCE_TOL {
            break;
        }
        let active: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
        while sweeps < MAX_SWEEPS {
            let delta = sweep(std, lambda, &mut beta, &mut residual, &active);
            sweeps += 1;
            trace.push(objective(&residual, &beta, lambda));
            if delta < CONVERGENCE_TOL {
                break;
            }
        }
    }
    beta
}

/// Lazily filled Gram data for [`descend_cov`], shared across a warm-started
/// path so columns are computed at most once.
struct CovCache {
    /// `x_j' y_centered` for every column.
    xty: Vec<f64>,
    /// `gram[j] = X' x_j`, filled the first time column `j` goes active.
    gram: Vec<Option<Vec<f64>>>,
}

impl CovCache {
    fn new(std: &Standardized) -> CovCache {
        let xty = std
            .cols
            .iter()
            .map(|col| col.iter().zip(&std.y_centered).map(|(x, y)| x * y).sum())
            .collect();
        CovCache {
            xty,
            gram: vec![None; std.cols.len()],
        }
    }

    fn activate(&mut self, std: &Standardized, j: usize) {
        if self.gram[j].is_none() {
            let xj = &std.cols[j];
            self.gram[j] = Some(
                std.cols
                    .iter()
                    .map(|col| col.iter().zip(xj).map(|(a, b)| a * b).sum())
                    .collect(),
            );
        }
    }
}

/// One coordinate-descent pass over `subset` using covariance updates:
/// `x_j' r = x_j' y - sum_m (x_j' x_m) beta_m` over the nonzero `beta_m`,
/// so each visit costs O(#active) instead of O(n). Same iterates as
/// [`sweep`] up to floating-point rounding.
fn sweep_cov(
    std: &Standardized,
    lambda: f64,
    beta: &mut [f64],
    cache: &mut CovCache,
    subset: &[usize],
) -> f64 {
    let n = std.y_centered.len() as f64;
    let mut max_delta: f64 = 0.0;
    for &j in subset {
        if std.stats[j].1 == 0.0 {
            continue;
        }
        let mut dot = cache.xty[j];
        for (m, b) in beta.iter().enumerate() {
            if *b != 0.0 && m != j {
                dot -= cache.gram[m].as_ref().expect("active column cached")[j] * b;
            }
        }
        // the beta_j self-term cancels exactly because x_j' x_j = n
        let rho = dot / n;
        let new = soft_threshold(rho, lambda);
        let delta = new - beta[j];
        if delta != 0.0 {
            if new != 0.0 {
                cache.activate(std, j);
            }
            beta[j] = new;
        }
        max_delta = max_delta.max(delta.abs());
    }
    max_delta
}

/// As [`descend`], but with covariance updates and no objective trace; used
/// on the regularization path where sweeps dominate the runtime.
fn descend_cov(
    std: &Standardized,
    lambda: f64,
    mut beta: Vec<f64>,
    cache: &mut CovCache,
) -> Vec<f64> {
    let all: Vec<usize> = (0..std.cols.len()).collect();
    for (j, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            cache.activate(std, j);
        }
    }
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let full_delta = sweep_cov(std, lambda, &mut beta, cache, &all);
        sweeps += 1;
        if full_delta < CONVERGENCE_TOL {
            break;
        }
        let active: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
        while sweeps < MAX_SWEEPS {
            let delta = sweep_cov(std, lambda, &mut beta, cache, &active);
            sweeps += 1;
            if delta < CONVERGENCE_TOL {
                break;
            }
        }
    }
    beta
}

fn model_from(std: &Standardized, beta: Vec<f64>, lambda: f64) -> LinearModel {
    LinearModel {
        column_names: std.names.clone(),
        coefficients: beta,
        intercept: std.y_mean,
        standardization: std.stats.clone(),
        lambda,
    }
}

/// Fits the lasso at a fixed lambda.
pub fn fit_lasso(x: &DenseMatrix, y: &[f64], lambda: f64) -> Result<LinearModel> {
    Ok(fit_lasso_with_trace(x, y, lambda)?.0)
}

/// As [`fit_lasso`], also returning the objective value after every sweep.
pub fn fit_lasso_with_trace(
    x: &DenseMatrix,
    y: &[f64],
    lambda: f64,
) -> Result<(LinearModel, Vec<f64>)> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    let std = standardize(x, y)?;
    let mut trace = Vec::new();
    let beta = descend(&std, lambda, vec![0.0; std.cols.len()], &mut trace);
    Ok((model_from(&std, beta, lambda), trace))
}

/// The smallest lambda with an all-zero solution: `max |x_j' y| / n` on
/// standardized columns.
pub fn lambda_max(x: &DenseMatrix, y: &[f64]) -> Result<f64> {
    let std = standardize(x, y)?;
    Ok(lambda_max_std(&std))
}

fn lambda_max_std(std: &Standardized) -> f64 {
    let n = std.y_centered.len() as f64;
    std.cols
        .iter()
        .map(|col| {
            (col.iter()
                .zip(&std.y_centered)
                .map(|(x, r)| x * r)
                .sum::<f64>()
                / n)
                .abs()
        })
        .fold(0.0, f64::max)
}

/// The descending 50-point log grid from `lambda_max` to `lambda_max * 1e-4`.
pub fn lambda_grid(lambda_max: f64) -> Vec<f64> {
    // degenerate signal: keep the grid shape with tiny positive values
    let top = if lambda_max > 0.0 { lambda_max } else { 1e-12 };
    (0..PATH_LEN)
        .map(|i| top * PATH_RATIO.powf(i as f64 / (PATH_LEN - 1) as f64))
        .collect()
}

/// Mean absolute error.
pub fn mae(forecasts: &[f64], actuals: &[f64]) -> f64 {
    forecasts
        .iter()
        .zip(actuals)
        .map(|(f, a)| (f - a).abs())
        .sum::<f64>()
        / forecasts.len() as f64
}

/// Fits the warm-started lambda path on the training data and returns the
/// model with the lowest validation MAE; ties keep the larger lambda.
pub fn lasso_path_and_select(
    x_train: &DenseMatrix,
    y_train: &[f64],
    x_val: &DenseMatrix,
    y_val: &[f64],
) -> Result<LinearModel> {
    Ok(lasso_path_with_scores(x_train, y_train, x_val, y_val)?.0)
}

/// As [`lasso_path_and_select`], also returning every grid point's
/// validation MAE as `(lambda, mae)` pairs in descending lambda order.
pub fn lasso_path_with_scores(
    x_train: &DenseMatrix,
    y_train: &[f64],
    x_val: &DenseMatrix,
    y_val: &[f64],
) -> Result<(LinearModel, Vec<(f64, f64)>)> {
    if x_val.n_rows() == 0 || y_val.len() != x_val.n_rows() {
        return Err(Error::InvalidArgument(
            "validation slice empty or misaligned".into(),
        ));
    }
    let std = standardize(x_train, y_train)?;
    let grid = lambda_grid(lambda_max_std(&std));
    let mut cache = CovCache::new(&std);
    let mut beta = vec![0.0; std.cols.len()];
    let mut best: Option<(f64, LinearModel)> = None;
    let mut scores = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        beta = descend_cov(&std, lambda, beta, &mut cache);
        let model = model_from(&std, beta.clone(), lambda);
        let val_mae = mae(&model.predict(x_val)?, y_val);
        scores.push((lambda, val_mae));
        // strict improvement required, so earlier (larger) lambdas win ties
        if best.as_ref().is_none_or(|(m, _)| val_mae < *m) {
            best = Some((val_mae, model));
        }
    }
    Ok((best.expect("grid is non-empty").1, scores))
}
