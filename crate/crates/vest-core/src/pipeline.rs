//! Feature generation, the three selection filters, and model-matrix
//! assembly for the method variants.
//!
//! Selection follows a strict fit/apply split: `fit_selection` sees training
//! rows only and freezes every decision (drops, imputation medians) into a
//! serializable [`SelectionModel`]; `apply_selection` replays those decisions
//! without recomputing anything.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, FeatureMatrix};
use crate::series::EmbeddingDataset;
use crate::summary::{compute_all, SummaryId};
use crate::transform::{TransformContext, TransformId};

/// The transforms usable under `ctx`, in catalog order.
pub fn available_transforms(ctx: &TransformContext) -> Vec<TransformId> {
    TransformId::ALL
        .into_iter()
        .filter(|t| !(t.needs_frequency() && ctx.frequency.is_none()))
        .collect()
}

/// Pre-selection column names under `ctx`: transform catalog order crossed
/// with summary catalog order, "Transform.Summary".
pub fn feature_names(ctx: &TransformContext) -> Vec<String> {
    available_transforms(ctx)
        .iter()
        .flat_map(|t| SummaryId::ALL.iter().map(move |s| format!("{t}.{s}")))
        .collect()
}

/// Computes every summary of every available representation of every row.
///
/// A transform whose preconditions fail for a row leaves that row's 32 cells
/// missing. With a frequency configured the matrix has 8 x 32 = 256 columns;
/// without one the two Fourier transforms are skipped entirely (192 columns).
pub fn generate_features(
    dataset: &EmbeddingDataset,
    ctx: &TransformContext,
) -> Result<FeatureMatrix> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("empty embedding dataset".into()));
    }
    let transforms = available_transforms(ctx);
    let names = feature_names(ctx);
    let p = dataset.dimension();
    let rows: Vec<Vec<Option<f64>>> = dataset
        .rows()
        .par_iter()
        .map(|row| {
            let chron: Vec<f64> = row.lags.iter().rev().copied().collect();
            let start_index = row.target_index - p;
            let mut cells = Vec::with_capacity(names.len());
            for t in &transforms {
                match t.apply(&chron, start_index, ctx) {
                    Some(rep) => cells.extend(compute_all(&rep)),
                    None => cells.extend(std::iter::repeat_n(None, SummaryId::ALL.len())),
                }
            }
            cells
        })
        .collect();
    FeatureMatrix::new(names, rows, dataset.target_indices())
}

/// Thresholds of the three selection filters, all percentages in (0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Drop a column when more than this percentage of its cells is missing.
    pub na_perc: f64,
    /// Drop a column when its distinct values number less than this
    /// percentage of the rows.
    pub u_perc: f64,
    /// Correlated-pair cutoff: pairs with |r| above this percentage lose one
    /// member.
    pub corr_perc: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            na_perc: 70.0,
            u_perc: 1.0,
            corr_perc: 95.0,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("na_perc", self.na_perc),
            ("u_perc", self.u_perc),
            ("corr_perc", self.corr_perc),
        ] {
            if !(v > 0.0 && v <= 100.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be in (0, 100], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Why a column was removed during selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    /// Too many missing cells.
    Na,
    /// Too few distinct values.
    LowUnique,
    /// Correlated beyond the cutoff with the named surviving column.
    Correlated { with: String },
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::Na => f.write_str("NA"),
            DropReason::LowUnique => f.write_str("LOW_UNIQUE"),
            DropReason::Correlated { with } => write!(f, "CORRELATED(with={with})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropRecord {
    pub column: String,
    pub reason: DropReason,
}

/// Frozen selection decisions: kept columns (input order), their training
/// medians for imputation, and one logged reason per dropped column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionModel {
    pub kept_columns: Vec<String>,
    pub imputation_medians: Vec<f64>,
    pub drop_log: Vec<DropRecord>,
}

impl SelectionModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("selection model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("selection model JSON: {e}")))
    }

    pub fn median_for(&self, column: &str) -> Option<f64> {
        self.kept_columns
            .iter()
            .position(|c| c == column)
            .map(|i| self.imputation_medians[i])
    }
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn distinct_count(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    sorted.len()
}

/// Pearson correlation; 0 when either column has zero variance.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Fits the three filters on training rows, in order: missing-share drop,
/// median imputation, low-uniqueness drop, correlated-pair drop.
///
/// The correlation filter re-examines the most correlated surviving pair and
/// removes the member with the larger mean absolute correlation to all other
/// survivors, until no pair exceeds the cutoff. Ties drop the later column.
pub fn fit_selection(matrix: &FeatureMatrix, cfg: &SelectionConfig) -> Result<SelectionModel> {
    cfg.validate()?;
    let n_rows = matrix.n_rows();
    if n_rows < 2 {
        return Err(Error::InvalidArgument(format!(
            "selection needs at least 2 training rows, got {n_rows}"
        )));
    }
    let mut drop_log = Vec::new();

    // missing-share filter, then imputation with the training median
    let mut kept: Vec<usize> = Vec::new();
    let mut imputed: Vec<Vec<f64>> = Vec::new();
    let mut medians: Vec<f64> = Vec::new();
    for c in 0..matrix.n_cols() {
        let present: Vec<f64> = matrix.column(c).flatten().collect();
        let missing_perc = 100.0 * (n_rows - present.len()) as f64 / n_rows as f64;
        if missing_perc > cfg.na_perc || present.is_empty() {
            drop_log.push(DropRecord {
                column: matrix.names()[c].clone(),
                reason: DropReason::Na,
            });
            continue;
        }
        let median = median_of(present);
        let column: Vec<f64> = matrix.column(c).map(|v| v.unwrap_or(median)).collect();
        kept.push(c);
        imputed.push(column);
        medians.push(median);
    }

    // low-uniqueness filter on imputed values
    let mut survivors: Vec<usize> = Vec::new();
    for (slot, &c) in kept.iter().enumerate() {
        let unique_perc = 100.0 * distinct_count(&imputed[slot]) as f64 / n_rows as f64;
        if unique_perc < cfg.u_perc {
            drop_log.push(DropRecord {
                column: matrix.names()[c].clone(),
                reason: DropReason::LowUnique,
            });
        } else {
            survivors.push(slot);
        }
    }

    // correlated-pair filter
    let threshold = cfg.corr_perc / 100.0;
    let mut corr = vec![vec![0.0; survivors.len()]; survivors.len()];
    for i in 0..survivors.len() {
        for j in i + 1..survivors.len() {
            let r = pearson(&imputed[survivors[i]], &imputed[survivors[j]]).abs();
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    let mut alive: Vec<bool> = vec![true; survivors.len()];
    loop {
        let mut worst: Option<(f64, usize, usize)> = None;
        for i in 0..survivors.len() {
            if !alive[i] {
                continue;
            }
            for j in i + 1..survivors.len() {
                if !alive[j] || corr[i][j] <= threshold {
                    continue;
                }
                if worst.is_none_or(|(r, _, _)| corr[i][j] > r) {
                    worst = Some((corr[i][j], i, j));
                }
            }
        }
        let Some((_, i, j)) = worst else { break };
        let mean_abs = |a: usize| -> f64 {
            let mut sum = 0.0;
            let mut count = 0usize;
            for b in 0..survivors.len() {
                if b != a && alive[b] {
                    sum += corr[a][b];
                    count += 1;
                }
            }
            if count == 0 {
                0.0
            } else {
                sum / count as f64
            }
        };
        // ties drop the later column in catalog order (j > i)
        let victim = if mean_abs(i) > mean_abs(j) { i } else { j };
        let keeper = if victim == i { j } else { i };
        alive[victim] = false;
        drop_log.push(DropRecord {
            column: matrix.names()[kept[survivors[victim]]].clone(),
            reason: DropReason::Correlated {
                with: matrix.names()[kept[survivors[keeper]]].clone(),
            },
        });
    }

    let mut kept_columns = Vec::new();
    let mut kept_medians = Vec::new();
    for (pos, &slot) in survivors.iter().enumerate() {
        if alive[pos] {
            kept_columns.push(matrix.names()[kept[slot]].clone());
            kept_medians.push(medians[slot]);
        }
    }
    if kept_columns.is_empty() {
        return Err(Error::AllFeaturesDropped);
    }
    // drop log in input-column order for stable serialization
    drop_log.sort_by_key(|d| matrix.names().iter().position(|n| *n == d.column));
    Ok(SelectionModel {
        kept_columns,
        imputation_medians: kept_medians,
        drop_log,
    })
}

/// Replays a fitted selection on any matrix (training or test): keeps the
/// model's columns in model order and fills missing cells with the stored
/// training medians. Nothing is recomputed from `matrix`.
pub fn apply_selection(model: &SelectionModel, matrix: &FeatureMatrix) -> Result<DenseMatrix> {
    let mut columns = Vec::with_capacity(model.kept_columns.len());
    for (name, &median) in model.kept_columns.iter().zip(&model.imputation_medians) {
        let idx = matrix.column_index(name)?;
        columns.push(matrix.column(idx).map(|v| v.unwrap_or(median)).collect());
    }
    DenseMatrix::new(
        model.kept_columns.clone(),
        columns,
        matrix.target_indices().to_vec(),
    )
}

/// The compared method variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Pure auto-regression on the lags.
    Ar,
    /// Engineered features only.
    Vest,
    /// Lags plus all selected features.
    ArVest,
    /// Lags plus the features of the single most important transform.
    ArBt,
    /// Lags plus, per summary, the feature of its most important transform.
    ArBf,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ar,
        Method::Vest,
        Method::ArVest,
        Method::ArBt,
        Method::ArBf,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Method::Ar => "AR",
            Method::Vest => "VEST",
            Method::ArVest => "AR+VEST",
            Method::ArBt => "AR+BT",
            Method::ArBf => "AR+BF",
        }
    }

    pub fn uses_importance(&self) -> bool {
        matches!(self, Method::ArBt | Method::ArBf)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // AR+BS appears as a synonym of AR+BF in the wild; accept it
        if s == "AR+BS" {
            return Ok(Method::ArBf);
        }
        Method::ALL
            .iter()
            .find(|m| m.id() == s)
            .copied()
            .ok_or_else(|| Error::UnknownId {
                kind: "method",
                name: s.to_string(),
                valid: Method::ALL.map(|m| m.id()).join(", "),
            })
    }
}

/// The lag columns as a dense matrix, named LAG_1 (most recent) .. LAG_p.
pub fn lag_matrix(dataset: &EmbeddingDataset) -> Result<DenseMatrix> {
    let p = dataset.dimension();
    let names: Vec<String> = (1..=p).map(|j| format!("LAG_{j}")).collect();
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|j| dataset.rows().iter().map(|r| r.lags[j]).collect())
        .collect();
    DenseMatrix::new(names, columns, dataset.target_indices())
}

/// Builds the model matrix for a method from aligned lag and feature blocks.
///
/// `restriction` names the feature columns the importance module kept; it is
/// required for AR+BT and AR+BF and ignored otherwise.
pub fn assemble(
    method: Method,
    lags: &DenseMatrix,
    features: &DenseMatrix,
    restriction: Option<&[String]>,
) -> Result<DenseMatrix> {
    match method {
        Method::Ar => Ok(lags.clone()),
        Method::Vest => Ok(features.clone()),
        Method::ArVest => lags.hstack(features),
        Method::ArBt | Method::ArBf => {
            let names = restriction.ok_or_else(|| {
                Error::InvalidArgument(format!("{method} needs an importance restriction"))
            })?;
            lags.hstack(&features.select_columns(names)?)
        }
    }
}
