//! The 32-summary catalog: statistics compressing one chronological vector
//! into one scalar each.
//!
//! Every summary returns `Some(finite)` or `None` (the missing marker), never
//! NaN or an infinity. Undefined cases (too few points, zero dispersion where
//! a ratio needs it) are missing; counts of empty sets are 0, not missing.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical summary identifiers, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SummaryId {
    Mean,
    Mdn,
    Sd,
    Var,
    Iqr,
    Rd,
    Min,
    Max,
    Lp,
    Sk,
    Krt,
    P05,
    P95,
    Acc1,
    Acc2,
    Bp,
    Pacf,
    Acf,
    Lrd1,
    Lrd2,
    Slp,
    Norm,
    No,
    Amp,
    Step,
    PeakI,
    PeakD,
    Od,
    PvSt,
    PvLt,
    Mle,
    Mad,
}

impl SummaryId {
    pub const ALL: [SummaryId; 32] = [
        SummaryId::Mean,
        SummaryId::Mdn,
        SummaryId::Sd,
        SummaryId::Var,
        SummaryId::Iqr,
        SummaryId::Rd,
        SummaryId::Min,
        SummaryId::Max,
        SummaryId::Lp,
        SummaryId::Sk,
        SummaryId::Krt,
        SummaryId::P05,
        SummaryId::P95,
        SummaryId::Acc1,
        SummaryId::Acc2,
        SummaryId::Bp,
        SummaryId::Pacf,
        SummaryId::Acf,
        SummaryId::Lrd1,
        SummaryId::Lrd2,
        SummaryId::Slp,
        SummaryId::Norm,
        SummaryId::No,
        SummaryId::Amp,
        SummaryId::Step,
        SummaryId::PeakI,
        SummaryId::PeakD,
        SummaryId::Od,
        SummaryId::PvSt,
        SummaryId::PvLt,
        SummaryId::Mle,
        SummaryId::Mad,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            SummaryId::Mean => "MEAN",
            SummaryId::Mdn => "MDN",
            SummaryId::Sd => "SD",
            SummaryId::Var => "VAR",
            SummaryId::Iqr => "IQR",
            SummaryId::Rd => "RD",
            SummaryId::Min => "MIN",
            SummaryId::Max => "MAX",
            SummaryId::Lp => "LP",
            SummaryId::Sk => "SK",
            SummaryId::Krt => "KRT",
            SummaryId::P05 => "P05",
            SummaryId::P95 => "P95",
            SummaryId::Acc1 => "ACC_1",
            SummaryId::Acc2 => "ACC_2",
            SummaryId::Bp => "BP",
            SummaryId::Pacf => "PACF",
            SummaryId::Acf => "ACF",
            SummaryId::Lrd1 => "LRD1",
            SummaryId::Lrd2 => "LRD2",
            SummaryId::Slp => "SLP",
            SummaryId::Norm => "NORM",
            SummaryId::No => "NO",
            SummaryId::Amp => "AMP",
            SummaryId::Step => "STEP",
            SummaryId::PeakI => "PEAK_I",
            SummaryId::PeakD => "PEAK_D",
            SummaryId::Od => "OD",
            SummaryId::PvSt => "PV_ST",
            SummaryId::PvLt => "PV_LT",
            SummaryId::Mle => "MLE",
            SummaryId::Mad => "MAD",
        }
    }

    pub fn index(&self) -> usize {
        SummaryId::ALL.iter().position(|s| s == self).unwrap()
    }
}

impl fmt::Display for SummaryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SummaryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SummaryId::ALL
            .iter()
            .find(|c| c.id() == s)
            .copied()
            .ok_or_else(|| Error::UnknownId {
                kind: "summary",
                name: s.to_string(),
                valid: SummaryId::ALL.map(|c| c.id()).join(", "),
            })
    }
}

/// One summary of a chronological vector.
pub fn apply_summary(id: SummaryId, v: &[f64]) -> Option<f64> {
    compute_all(v)[id.index()]
}

/// All 32 summaries of a chronological vector, in catalog order.
///
/// Shared intermediates (sorted copy, moments, differences, autocorrelations)
/// are computed once, which is why the batch form exists.
pub fn compute_all(v: &[f64]) -> Vec<Option<f64>> {
    let q = v.len();
    let mut out = vec![None; SummaryId::ALL.len()];
    if q == 0 {
        return out;
    }
    let mut set = |id: SummaryId, value: f64| {
        out[id.index()] = value.is_finite().then_some(value);
    };

    let mean = v.iter().sum::<f64>() / q as f64;
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    set(SummaryId::Mean, mean);
    set(SummaryId::Mdn, quantile(&sorted, 0.5));
    set(SummaryId::Min, sorted[0]);
    set(SummaryId::Max, sorted[q - 1]);
    set(SummaryId::Lp, v[q - 1]);
    set(SummaryId::P05, quantile(&sorted, 0.05));
    set(SummaryId::P95, quantile(&sorted, 0.95));
    set(SummaryId::Norm, v.iter().map(|x| x * x).sum::<f64>().sqrt());

    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    set(SummaryId::Iqr, iqr);
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    set(
        SummaryId::No,
        v.iter().filter(|&&x| x < lo || x > hi).count() as f64,
    );

    let mut median_dev: Vec<f64> = {
        let med = quantile(&sorted, 0.5);
        v.iter().map(|x| (x - med).abs()).collect()
    };
    median_dev.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    set(SummaryId::Mad, quantile(&median_dev, 0.5));

    // central moments; m2..m4 use the population denominator
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in v {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let sample_var = if q >= 2 {
        m2 / (q - 1) as f64
    } else {
        f64::NAN
    };
    m2 /= q as f64;
    m3 /= q as f64;
    m4 /= q as f64;
    if q >= 2 {
        set(SummaryId::Var, sample_var);
        set(SummaryId::Sd, sample_var.sqrt());
    }
    if m2 > 0.0 {
        set(SummaryId::Sk, m3 / m2.powf(1.5));
        set(SummaryId::Krt, m4 / (m2 * m2) - 3.0);
    }

    if q >= 2 {
        if let Some(slope) = ols_slope_vs_index(v) {
            set(SummaryId::Slp, slope);
        }
    }

    let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let mut inc = 0i64;
    let mut dec = 0i64;
    for &d in &diffs {
        if d > 0.0 {
            inc += 1;
        } else if d < 0.0 {
            dec += 1;
        }
    }
    set(SummaryId::Od, (inc - dec) as f64);

    let mut peaks = 0usize;
    let mut troughs = 0usize;
    for i in 1..q.saturating_sub(1) {
        if v[i] > v[i - 1] && v[i] > v[i + 1] {
            peaks += 1;
        }
        if v[i] < v[i - 1] && v[i] < v[i + 1] {
            troughs += 1;
        }
    }
    set(SummaryId::PeakI, peaks as f64);
    set(SummaryId::PeakD, troughs as f64);

    if q >= 3 {
        let diff_var = sample_variance(&diffs);
        let diff_sd = diff_var.sqrt();
        if diff_sd > 0.0 {
            set(SummaryId::Rd, sample_var.sqrt() / diff_sd);
        }
        set(SummaryId::PvSt, (diff_var / 2.0).sqrt());
        let inner = 2.0 * sample_var - diff_var / 2.0;
        if inner >= -1e-12 {
            set(SummaryId::PvLt, inner.max(0.0).sqrt());
        }
    }

    if q >= 4 {
        if let Some((a1, a2)) = acceleration(v) {
            set(SummaryId::Acc1, a1);
            set(SummaryId::Acc2, a2);
        }
        set(SummaryId::Step, step_change(v));
        if m2 > 0.0 {
            let h = 10.min(q - 2);
            let rho = autocorrelations(v, mean, m2 * q as f64, h);
            set(
                SummaryId::Bp,
                q as f64 * rho.iter().map(|r| r * r).sum::<f64>(),
            );
            set(SummaryId::Acf, rho.iter().sum::<f64>() / h as f64);
            if let Some(pacf) = mean_pacf(&rho) {
                set(SummaryId::Pacf, pacf);
            }
        }
    }

    if q >= 2 {
        set(SummaryId::Amp, fft_mean_amplitude(v));
    }

    if q >= 8 {
        if let Some((h1, h2)) = hurst_wavelet(v) {
            set(SummaryId::Lrd1, h1);
            set(SummaryId::Lrd2, h2);
        }
    }

    if q >= 10 {
        if let Some(slope) = lyapunov(v) {
            set(SummaryId::Mle, slope);
        }
    }

    out
}

/// Linear-interpolation quantile of an ascending slice (`h = (q-1)p`).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let q = sorted.len();
    let h = (q - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < q {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[q - 1]
    }
}

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// OLS slope of `v` against chronological index 1..q.
fn ols_slope_vs_index(v: &[f64]) -> Option<f64> {
    let q = v.len() as f64;
    let x_mean = (q + 1.0) / 2.0;
    let y_mean = v.iter().sum::<f64>() / q;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &y) in v.iter().enumerate() {
        let dx = (i + 1) as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Mean and sd of the SMA/EMA ratio at aligned full-window positions.
fn acceleration(v: &[f64]) -> Option<(f64, f64)> {
    let q = v.len();
    let k = (q as f64).sqrt().round() as usize;
    if k < 1 || k > q {
        return None;
    }
    let sma: Vec<f64> = v
        .windows(k)
        .map(|w| w.iter().sum::<f64>() / k as f64)
        .collect();
    let alpha = 2.0 / (k as f64 + 1.0);
    let mut ema = Vec::with_capacity(sma.len());
    ema.push(sma[0]); // seeded with the first full window's mean
    for j in 1..sma.len() {
        let prev = ema[j - 1];
        ema.push(alpha * v[k - 1 + j] + (1.0 - alpha) * prev);
    }
    let mut ratios = Vec::with_capacity(sma.len());
    for (s, e) in sma.iter().zip(&ema) {
        if *e == 0.0 {
            return None;
        }
        ratios.push(s / e);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let sd = if ratios.len() >= 2 {
        sample_variance(&ratios).sqrt()
    } else {
        0.0
    };
    Some((mean, sd))
}

/// Midpoint split: 1 when the halves' means differ by more than twice the
/// first half's sd, 0 otherwise (zero sd: 1 only when the means differ).
fn step_change(v: &[f64]) -> f64 {
    let mid = v.len() / 2;
    let (a, b) = v.split_at(mid);
    let mean_a = a.iter().sum::<f64>() / a.len() as f64;
    let mean_b = b.iter().sum::<f64>() / b.len() as f64;
    let sd_a = sample_variance(a).sqrt();
    let gap = (mean_b - mean_a).abs();
    if sd_a == 0.0 {
        if gap > 0.0 {
            1.0
        } else {
            0.0
        }
    } else if gap > 2.0 * sd_a {
        1.0
    } else {
        0.0
    }
}

/// Mean-centered sample autocorrelations at lags 1..=h, biased denominator.
fn autocorrelations(v: &[f64], mean: f64, ss: f64, h: usize) -> Vec<f64> {
    let q = v.len();
    (1..=h)
        .map(|k| {
            let num: f64 = (0..q - k).map(|t| (v[t] - mean) * (v[t + k] - mean)).sum();
            num / ss
        })
        .collect()
}

/// Mean of the partial autocorrelations via the Durbin-Levinson recursion.
fn mean_pacf(rho: &[f64]) -> Option<f64> {
    let h = rho.len();
    let mut phi = vec![vec![0.0; h + 1]; h + 1];
    let mut pacf = Vec::with_capacity(h);
    phi[1][1] = rho[0];
    pacf.push(rho[0]);
    for k in 2..=h {
        let num = rho[k - 1] - (1..k).map(|j| phi[k - 1][j] * rho[k - 1 - j]).sum::<f64>();
        let den = 1.0 - (1..k).map(|j| phi[k - 1][j] * rho[j - 1]).sum::<f64>();
        if den == 0.0 || !(num / den).is_finite() {
            return None;
        }
        phi[k][k] = num / den;
        for j in 1..k {
            phi[k][j] = phi[k - 1][j] - phi[k][k] * phi[k - 1][k - j];
        }
        pacf.push(phi[k][k]);
    }
    Some(pacf.iter().sum::<f64>() / h as f64)
}

thread_local! {
    static FFT_PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Mean DFT amplitude over bins 1..=q/2 (DC excluded).
fn fft_mean_amplitude(v: &[f64]) -> f64 {
    let q = v.len();
    let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FFT_PLANNER.with(|p| p.borrow_mut().plan_fft_forward(q).process(&mut buf));
    let half = q / 2;
    buf[1..=half].iter().map(|c| c.norm()).sum::<f64>() / half as f64
}

/// Hurst estimates from a Haar detail pyramid: regress log2 of the mean
/// absolute detail (moment order r = 1, 2) on the level and map the slope
/// through H = (slope/r + 1)/2.
fn hurst_wavelet(v: &[f64]) -> Option<(f64, f64)> {
    let q = v.len();
    let levels = (q as f64).log2().floor() as usize - 1;
    if levels < 2 {
        return None;
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut approx = v.to_vec();
    let mut log_m1 = Vec::with_capacity(levels);
    let mut log_m2 = Vec::with_capacity(levels);
    for _ in 0..levels {
        let pairs = approx.len() / 2;
        let mut next = Vec::with_capacity(pairs);
        let mut sum1 = 0.0;
        let mut sum2 = 0.0;
        for i in 0..pairs {
            let d = (approx[2 * i] - approx[2 * i + 1]) * inv_sqrt2;
            sum1 += d.abs();
            sum2 += d * d;
            next.push((approx[2 * i] + approx[2 * i + 1]) * inv_sqrt2);
        }
        let m1 = sum1 / pairs as f64;
        let m2 = sum2 / pairs as f64;
        if m1 == 0.0 || m2 == 0.0 {
            return None;
        }
        log_m1.push(m1.log2());
        log_m2.push(m2.log2());
        approx = next;
    }
    let slope = |ys: &[f64]| ols_slope_vs_index(ys);
    let h = |beta: f64, r: f64| (beta / r + 1.0) / 2.0;
    Some((h(slope(&log_m1)?, 1.0), h(slope(&log_m2)?, 2.0)))
}

/// Largest-Lyapunov-exponent estimate: 2-dimensional delay embedding,
/// nearest neighbors excluding temporal neighbors, OLS slope of the mean log
/// divergence over steps 0..=5.
fn lyapunov(v: &[f64]) -> Option<f64> {
    const MAX_STEP: usize = 5;
    let n = v.len() - 1; // points (v[t], v[t+1])
    let dist = |a: usize, b: usize| -> f64 {
        let dx = v[a] - v[b];
        let dy = v[a + 1] - v[b + 1];
        (dx * dx + dy * dy).sqrt()
    };
    // nearest neighbor per point, |t - t'| >= 2
    let mut neighbor = vec![None; n];
    for (t, slot) in neighbor.iter_mut().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for s in 0..n {
            if s.abs_diff(t) < 2 {
                continue;
            }
            let d = dist(t, s);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, s));
            }
        }
        *slot = best.map(|(_, s)| s);
    }
    let mut points = Vec::new();
    for step in 0..=MAX_STEP {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (t, &slot) in neighbor.iter().enumerate() {
            let Some(s) = slot else { continue };
            if t + step >= n || s + step >= n {
                continue;
            }
            let d = dist(t + step, s + step);
            if d > 0.0 {
                sum += d.ln();
                count += 1;
            }
        }
        if count > 0 {
            points.push((step as f64, sum / count as f64));
        }
    }
    if points.len() < 3 {
        return None;
    }
    // OLS slope over the surviving (step, mean log divergence) points
    let m = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / m;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
