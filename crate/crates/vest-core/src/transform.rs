//! The 8-transform catalog applied to each embedding vector.
//!
//! All transforms take the vector in chronological order (oldest first);
//! callers reverse most-recent-first embedding rows before applying them.
//! A transform returns `None` when its preconditions are unmet for the given
//! row, which turns every feature derived from it into a missing value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical transform identifiers, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TransformId {
    /// Identity.
    I,
    /// One-sided simple moving average, window `round(sqrt(p))`, full windows only.
    Sma,
    /// First differences in chronological direction.
    Diff,
    /// Second differences (DIFF applied twice).
    Diff2,
    /// Box-Cox with a lambda fitted on the training window.
    Bc,
    /// Order-1 Fourier sine term of the absolute time index.
    Sin,
    /// Order-1 Fourier cosine term of the absolute time index.
    Cos,
    /// Level-1 Daubechies-2 wavelet detail coefficients, periodic boundary.
    Dwt,
}

impl TransformId {
    pub const ALL: [TransformId; 8] = [
        TransformId::I,
        TransformId::Sma,
        TransformId::Diff,
        TransformId::Diff2,
        TransformId::Bc,
        TransformId::Sin,
        TransformId::Cos,
        TransformId::Dwt,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            TransformId::I => "I",
            TransformId::Sma => "SMA",
            TransformId::Diff => "DIFF",
            TransformId::Diff2 => "DIFF2",
            TransformId::Bc => "BC",
            TransformId::Sin => "SIN",
            TransformId::Cos => "COS",
            TransformId::Dwt => "DWT",
        }
    }

    /// Whether this transform needs a seasonal frequency to produce output.
    pub fn needs_frequency(&self) -> bool {
        matches!(self, TransformId::Sin | TransformId::Cos)
    }

    /// Output length for an input of length `p`, ignoring availability.
    pub fn output_len(&self, p: usize) -> usize {
        match self {
            TransformId::I | TransformId::Bc | TransformId::Sin | TransformId::Cos => p,
            TransformId::Sma => p + 1 - sma_window(p).min(p),
            TransformId::Diff => p.saturating_sub(1),
            TransformId::Diff2 => p.saturating_sub(2),
            TransformId::Dwt => p.div_ceil(2),
        }
    }

    /// Applies the transform to a chronological vector.
    ///
    /// `start_index` is the absolute 0-based series position of `chron[0]`;
    /// only the Fourier transforms use it. Returns `None` when the vector is
    /// too short, the frequency is absent, or Box-Cox input is non-positive.
    pub fn apply(
        &self,
        chron: &[f64],
        start_index: usize,
        ctx: &TransformContext,
    ) -> Option<Vec<f64>> {
        let p = chron.len();
        match self {
            TransformId::I => (p >= 1).then(|| chron.to_vec()),
            TransformId::Sma => {
                if p < 2 {
                    return None;
                }
                let k = sma_window(p);
                Some(
                    chron
                        .windows(k)
                        .map(|w| w.iter().sum::<f64>() / k as f64)
                        .collect(),
                )
            }
            TransformId::Diff => (p >= 2).then(|| diff(chron)),
            TransformId::Diff2 => (p >= 3).then(|| diff(&diff(chron))),
            TransformId::Bc => {
                let bc = ctx.boxcox.as_ref()?;
                let mut out = Vec::with_capacity(p);
                for &x in chron {
                    let shifted = x + bc.shift;
                    if shifted <= 0.0 {
                        return None;
                    }
                    out.push(boxcox(shifted, bc.lambda));
                }
                Some(out)
            }
            TransformId::Sin | TransformId::Cos => {
                let m = ctx.frequency? as f64;
                Some(
                    (0..p)
                        .map(|j| {
                            let tau = (start_index + j + 1) as f64;
                            let angle = std::f64::consts::TAU * tau / m;
                            if *self == TransformId::Sin {
                                angle.sin()
                            } else {
                                angle.cos()
                            }
                        })
                        .collect(),
                )
            }
            TransformId::Dwt => (p >= 4).then(|| db2_detail(chron)),
        }
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TransformId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformId::ALL
            .iter()
            .find(|t| t.id() == s)
            .copied()
            .ok_or_else(|| Error::UnknownId {
                kind: "transform",
                name: s.to_string(),
                valid: TransformId::ALL.map(|t| t.id()).join(", "),
            })
    }
}

/// SMA window `round(sqrt(p))`.
fn sma_window(p: usize) -> usize {
    (p as f64).sqrt().round() as usize
}

fn diff(chron: &[f64]) -> Vec<f64> {
    chron.windows(2).map(|w| w[1] - w[0]).collect()
}

fn boxcox(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x.ln()
    } else {
        (x.powf(lambda) - 1.0) / lambda
    }
}

/// Box-Cox parameters fitted on a training window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCoxParams {
    pub lambda: f64,
    /// Added to every value before the power transform; `1 - min` when the
    /// training minimum is non-positive, else 0.
    pub shift: f64,
}

/// Per-series state shared by all transforms: seasonal frequency and the
/// fitted Box-Cox parameters (`None` when fitting was infeasible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformContext {
    pub frequency: Option<usize>,
    pub boxcox: Option<BoxCoxParams>,
}

impl TransformContext {
    /// Fits the Box-Cox lambda on training observations. Fitting needs at
    /// least two complete groups; when it fails the context simply carries no
    /// Box-Cox parameters and the BC representation stays unavailable.
    pub fn fit(train_values: &[f64], frequency: Option<usize>) -> Self {
        let min = train_values.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = if min <= 0.0 { 1.0 - min } else { 0.0 };
        let shifted: Vec<f64> = train_values.iter().map(|v| v + shift).collect();
        let boxcox = guerrero_lambda(&shifted, frequency)
            .ok()
            .map(|lambda| BoxCoxParams { lambda, shift });
        TransformContext { frequency, boxcox }
    }

    /// Context with no fitted Box-Cox parameters.
    pub fn unfitted(frequency: Option<usize>) -> Self {
        TransformContext {
            frequency,
            boxcox: None,
        }
    }
}

/// Selects the Box-Cox lambda minimizing the coefficient of variation of
/// group-wise `sd / mean^(1-lambda)` over the grid [-1, 2] in steps of 0.01.
///
/// Groups are consecutive runs of `frequency` values (length 2 when no
/// frequency is set); a leading remainder shorter than one group is dropped.
/// Ties prefer the lambda closest to 1.
pub fn guerrero_lambda(values: &[f64], frequency: Option<usize>) -> Result<f64> {
    let group_len = frequency.unwrap_or(2).max(2);
    let n_groups = values.len() / group_len;
    if n_groups < 2 {
        return Err(Error::BoxCox(format!(
            "need at least 2 groups of {group_len}, got {n_groups}"
        )));
    }
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::BoxCox("non-positive value after shift".into()));
    }
    let start = values.len() - n_groups * group_len;
    let groups: Vec<&[f64]> = values[start..].chunks_exact(group_len).collect();
    let stats: Vec<(f64, f64)> = groups
        .iter()
        .map(|g| {
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            let var = g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (g.len() - 1) as f64;
            (mean, var.sqrt())
        })
        .collect();

    let mut best = (f64::INFINITY, 1.0);
    for i in 0..=300 {
        let lambda = i as f64 / 100.0 - 1.0;
        let ratios: Vec<f64> = stats
            .iter()
            .map(|&(mean, sd)| sd / mean.powf(1.0 - lambda))
            .collect();
        let r_mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let cv = if r_mean == 0.0 {
            0.0
        } else {
            let var = ratios.iter().map(|r| (r - r_mean).powi(2)).sum::<f64>()
                / (ratios.len() - 1) as f64;
            var.sqrt() / r_mean
        };
        let closer = (lambda - 1.0).abs() < (best.1 - 1.0f64).abs();
        if cv < best.0 || (cv == best.0 && closer) {
            best = (cv, lambda);
        }
    }
    Ok(best.1)
}

/// Daubechies-2 level-1 detail coefficients with periodic boundary extension.
pub fn db2_detail(x: &[f64]) -> Vec<f64> {
    let s3 = 3.0f64.sqrt();
    let norm = 4.0 * 2.0f64.sqrt();
    let h = [
        (1.0 + s3) / norm,
        (3.0 + s3) / norm,
        (3.0 - s3) / norm,
        (1.0 - s3) / norm,
    ];
    // highpass via alternating-flip quadrature mirror
    let g = [h[3], -h[2], h[1], -h[0]];
    let p = x.len();
    (0..p.div_ceil(2))
        .map(|i| (0..4).map(|k| g[k] * x[(2 * i + k) % p]).sum())
        .collect()
}
