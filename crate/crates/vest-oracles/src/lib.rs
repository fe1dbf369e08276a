//! Independent reference implementations used to cross-check the library.
//!
//! Everything here is written as a literal, brute-force reading of each
//! statistic's definition, deliberately avoiding the library's internal
//! helpers and shared intermediates so the two routes can disagree. This
//! crate is a dev-dependency of the test suites only; nothing in the
//! shipping pipeline links against it.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vest_core::summary::SummaryId;
use vest_core::transform::TransformId;

/// Relative closeness with an absolute floor of 1.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Compares optional values: both missing, or both present and close.
pub fn close_opt(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => close(x, y, tol),
        _ => false,
    }
}

/// Random test vector of length `q` mixing scales, with occasional
/// structured shapes (constant, ramp, alternating) to hit edge paths.
pub fn random_vector(rng: &mut ChaCha8Rng, q: usize) -> Vec<f64> {
    match rng.gen_range(0..10) {
        0 => vec![rng.gen_range(-5.0..5.0); q],
        1 => {
            let a = rng.gen_range(-2.0..2.0);
            let d = rng.gen_range(-1.0..1.0);
            (0..q).map(|i| a + d * i as f64).collect()
        }
        2 => {
            let a = rng.gen_range(0.1..3.0);
            (0..q).map(|i| if i % 2 == 0 { a } else { -a }).collect()
        }
        _ => {
            let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
            (0..q).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
        }
    }
}

// ---- transform oracles ------------------------------------------------

pub fn sma_oracle(x: &[f64]) -> Option<Vec<f64>> {
    let p = x.len();
    if p < 2 {
        return None;
    }
    let k = (p as f64).sqrt().round() as usize;
    let mut out = Vec::new();
    for j in 0..=(p - k) {
        let mut s = 0.0;
        for i in 0..k {
            s += x[j + i];
        }
        out.push(s / k as f64);
    }
    Some(out)
}

pub fn diff_oracle(x: &[f64]) -> Option<Vec<f64>> {
    if x.len() < 2 {
        return None;
    }
    Some((1..x.len()).map(|i| x[i] - x[i - 1]).collect())
}

pub fn diff2_oracle(x: &[f64]) -> Option<Vec<f64>> {
    if x.len() < 3 {
        return None;
    }
    diff_oracle(&diff_oracle(x)?)
}

pub fn boxcox_oracle(x: &[f64], lambda: f64, shift: f64) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len());
    for &v in x {
        let s = v + shift;
        if s <= 0.0 {
            return None;
        }
        out.push(if lambda == 0.0 {
            s.ln()
        } else {
            (s.powf(lambda) - 1.0) / lambda
        });
    }
    Some(out)
}

pub fn fourier_oracle(q: usize, start_index: usize, frequency: usize, sine: bool) -> Vec<f64> {
    (0..q)
        .map(|j| {
            let tau = (start_index + j + 1) as f64;
            let a = 2.0 * std::f64::consts::PI * tau / frequency as f64;
            if sine {
                a.sin()
            } else {
                a.cos()
            }
        })
        .collect()
}

/// Daubechies-2 detail coefficients from published decimal filter taps,
/// convolved and downsampled with explicit periodic indexing.
// The taps are transcribed digit-for-digit from the published tables; keeping
// every digit (beyond f64 resolution) documents the source values verbatim.
#[allow(clippy::excessive_precision)]
pub fn dwt_oracle(x: &[f64]) -> Option<Vec<f64>> {
    let p = x.len();
    if p < 4 {
        return None;
    }
    let h = [
        0.482_962_913_144_534_14,
        0.836_516_303_737_807_9,
        0.224_143_868_042_013_38,
        -0.129_409_522_551_260_38,
    ];
    let g = [h[3], -h[2], h[1], -h[0]];
    let n_out = p.div_ceil(2);
    let mut out = Vec::with_capacity(n_out);
    for i in 0..n_out {
        let mut acc = 0.0;
        for (k, gk) in g.iter().enumerate() {
            acc += gk * x[(2 * i + k) % p];
        }
        out.push(acc);
    }
    Some(out)
}

/// Coefficient of variation of the group-wise `sd / mean^(1-lambda)` ratios,
/// groups of `len` values taken from the tail.
pub fn guerrero_cv(values: &[f64], group_len: usize, lambda: f64) -> f64 {
    let n_groups = values.len() / group_len;
    let tail = &values[values.len() - n_groups * group_len..];
    let mut ratios = Vec::new();
    for g in 0..n_groups {
        let group = &tail[g * group_len..(g + 1) * group_len];
        let mean = group.iter().sum::<f64>() / group_len as f64;
        let var = group.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (group_len - 1) as f64;
        ratios.push(var.sqrt() / mean.powf(1.0 - lambda));
    }
    let m = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let var = ratios.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (ratios.len() - 1) as f64;
    var.sqrt() / m
}

// ---- summary oracles --------------------------------------------------

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Linear-interpolation quantile, written from the order-statistic formula.
pub fn quantile_oracle(v: &[f64], p: f64) -> f64 {
    let s = sorted(v);
    let q = s.len();
    let h = (q as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        s[lo]
    } else {
        s[lo] * (hi as f64 - h) + s[hi] * (h - lo as f64)
    }
}

pub fn mean_oracle(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for &x in v {
        s += x;
    }
    s / v.len() as f64
}

pub fn sample_var_oracle(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = mean_oracle(v);
    let mut s = 0.0;
    for &x in v {
        s += (x - m) * (x - m);
    }
    Some(s / (v.len() - 1) as f64)
}

pub fn skew_oracle(v: &[f64]) -> Option<f64> {
    let m = mean_oracle(v);
    let q = v.len() as f64;
    let m2: f64 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / q;
    let m3: f64 = v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / q;
    (m2 > 0.0).then(|| m3 / m2.powf(1.5))
}

pub fn kurt_oracle(v: &[f64]) -> Option<f64> {
    let m = mean_oracle(v);
    let q = v.len() as f64;
    let m2: f64 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / q;
    let m4: f64 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / q;
    (m2 > 0.0).then(|| m4 / (m2 * m2) - 3.0)
}

pub fn rd_oracle(v: &[f64]) -> Option<f64> {
    if v.len() < 3 {
        return None;
    }
    let d = diff_oracle(v)?;
    let sd_d = sample_var_oracle(&d)?.sqrt();
    if sd_d == 0.0 {
        return None;
    }
    Some(sample_var_oracle(v)?.sqrt() / sd_d)
}

pub fn acc_oracle(v: &[f64]) -> Option<(f64, f64)> {
    let q = v.len();
    if q < 4 {
        return None;
    }
    let k = (q as f64).sqrt().round() as usize;
    let n_windows = q - k + 1;
    let mut sma = Vec::with_capacity(n_windows);
    for j in 0..n_windows {
        sma.push(v[j..j + k].iter().sum::<f64>() / k as f64);
    }
    let alpha = 2.0 / (k as f64 + 1.0);
    let mut ema = vec![sma[0]];
    for j in 1..n_windows {
        ema.push(alpha * v[k - 1 + j] + (1.0 - alpha) * ema[j - 1]);
    }
    let mut ratios = Vec::with_capacity(n_windows);
    for j in 0..n_windows {
        if ema[j] == 0.0 {
            return None;
        }
        ratios.push(sma[j] / ema[j]);
    }
    let m = mean_oracle(&ratios);
    let sd = if ratios.len() >= 2 {
        sample_var_oracle(&ratios).unwrap().sqrt()
    } else {
        0.0
    };
    Some((m, sd))
}

/// Autocorrelations at lags 1..=h with the biased (length-q) denominator.
pub fn acf_vector_oracle(v: &[f64], h: usize) -> Vec<f64> {
    let q = v.len();
    let m = mean_oracle(v);
    let c0: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
    (1..=h)
        .map(|k| {
            let mut num = 0.0;
            for t in k..q {
                num += (v[t] - m) * (v[t - k] - m);
            }
            num / c0
        })
        .collect()
}

/// Solves a dense linear system by Gaussian elimination with partial
/// pivoting; `None` when singular.
// Index loops kept: the elimination step reads one row while writing another,
// and the textbook subscript form is the whole point of a reference routine.
#[allow(clippy::needless_range_loop)]
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Partial autocorrelation at lag k via the k-by-k Yule-Walker system, an
/// independent route to the Durbin-Levinson recursion.
pub fn pacf_oracle(rho: &[f64], k: usize) -> Option<f64> {
    let a: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let lag = i.abs_diff(j);
                    if lag == 0 {
                        1.0
                    } else {
                        rho[lag - 1]
                    }
                })
                .collect()
        })
        .collect();
    let b: Vec<f64> = (1..=k).map(|l| rho[l - 1]).collect();
    solve_linear(a, b).map(|phi| phi[k - 1])
}

pub fn bp_acf_pacf_oracle(v: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let q = v.len();
    if q < 4 {
        return (None, None, None);
    }
    match sample_var_oracle(v) {
        Some(var) if var > 0.0 => {}
        _ => return (None, None, None),
    }
    let h = 10.min(q - 2);
    let rho = acf_vector_oracle(v, h);
    let bp = q as f64 * rho.iter().map(|r| r * r).sum::<f64>();
    let acf = mean_oracle(&rho);
    let mut pacf = Vec::with_capacity(h);
    for k in 1..=h {
        match pacf_oracle(&rho, k) {
            Some(p) if p.is_finite() => pacf.push(p),
            _ => return (Some(bp), Some(acf), None),
        }
    }
    (Some(bp), Some(acf), Some(mean_oracle(&pacf)))
}

/// Haar detail pyramid Hurst estimate for moment order `r`, regressing
/// log2 mean absolute detail on the level with a closed 2x2 system.
pub fn hurst_oracle(v: &[f64], r: f64) -> Option<f64> {
    let q = v.len();
    if q < 8 {
        return None;
    }
    let levels = ((q as f64).log2().floor() as usize).checked_sub(1)?;
    if levels < 2 {
        return None;
    }
    let root_half = 0.5f64.sqrt();
    let mut current = v.to_vec();
    let mut points = Vec::new();
    for level in 1..=levels {
        let pairs = current.len() / 2;
        let mut details = Vec::with_capacity(pairs);
        let mut next = Vec::with_capacity(pairs);
        for i in 0..pairs {
            details.push((current[2 * i] - current[2 * i + 1]) * root_half);
            next.push((current[2 * i] + current[2 * i + 1]) * root_half);
        }
        let moment = details.iter().map(|d| d.abs().powf(r)).sum::<f64>() / pairs as f64;
        if moment == 0.0 {
            return None;
        }
        points.push((level as f64, moment.log2()));
        current = next;
    }
    let beta = ols_slope_oracle(&points)?;
    Some((beta / r + 1.0) / 2.0)
}

/// OLS slope of (x, y) points via the 2x2 normal equations.
pub fn ols_slope_oracle(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let coef = solve_linear(vec![vec![n, sx], vec![sx, sxx]], vec![sy, sxy])?;
    Some(coef[1])
}

pub fn slope_oracle(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let points: Vec<(f64, f64)> = v
        .iter()
        .enumerate()
        .map(|(i, &y)| ((i + 1) as f64, y))
        .collect();
    let s = ols_slope_oracle(&points)?;
    s.is_finite().then_some(s)
}

/// Mean DFT amplitude over bins 1..=q/2 from the naive O(q^2) transform.
pub fn amp_oracle(v: &[f64]) -> Option<f64> {
    let q = v.len();
    if q < 2 {
        return None;
    }
    let mut total = 0.0;
    for k in 1..=q / 2 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &x) in v.iter().enumerate() {
            let a = -2.0 * std::f64::consts::PI * (k * t) as f64 / q as f64;
            re += x * a.cos();
            im += x * a.sin();
        }
        total += (re * re + im * im).sqrt();
    }
    Some(total / (q / 2) as f64)
}

pub fn step_oracle(v: &[f64]) -> Option<f64> {
    if v.len() < 4 {
        return None;
    }
    let mid = v.len() / 2;
    let m1 = mean_oracle(&v[..mid]);
    let m2 = mean_oracle(&v[mid..]);
    let sd1 = sample_var_oracle(&v[..mid])?.sqrt();
    Some(if sd1 == 0.0 {
        if m2 == m1 {
            0.0
        } else {
            1.0
        }
    } else if (m2 - m1).abs() > 2.0 * sd1 {
        1.0
    } else {
        0.0
    })
}

pub fn poincare_oracle(v: &[f64]) -> (Option<f64>, Option<f64>) {
    if v.len() < 3 {
        return (None, None);
    }
    let d = diff_oracle(v).unwrap();
    let vd = sample_var_oracle(&d).unwrap();
    let sd1 = (vd / 2.0).sqrt();
    let inner = 2.0 * sample_var_oracle(v).unwrap() - vd / 2.0;
    let sd2 = if inner >= -1e-12 {
        Some(inner.max(0.0).sqrt())
    } else {
        None
    };
    (Some(sd1), sd2)
}

/// Reference largest-Lyapunov estimate: 2-d delay embedding, brute-force
/// nearest neighbors at temporal distance >= 2, slope of mean log divergence
/// over steps 0..=5.
pub fn mle_oracle(v: &[f64]) -> Option<f64> {
    if v.len() < 10 {
        return None;
    }
    let pts: Vec<(f64, f64)> = (0..v.len() - 1).map(|t| (v[t], v[t + 1])).collect();
    let n = pts.len();
    let d =
        |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
    let mut reg = Vec::new();
    for step in 0..=5usize {
        let mut logs = Vec::new();
        for t in 0..n {
            // recompute the nearest neighbor from scratch each time
            let mut best: Option<(f64, usize)> = None;
            for s in 0..n {
                if s + 2 <= t || t + 2 <= s {
                    let ds = d(t, s);
                    if best.is_none_or(|(bd, _)| ds < bd) {
                        best = Some((ds, s));
                    }
                }
            }
            if let Some((_, s)) = best {
                if t + step < n && s + step < n {
                    let div = d(t + step, s + step);
                    if div > 0.0 {
                        logs.push(div.ln());
                    }
                }
            }
        }
        if !logs.is_empty() {
            reg.push((step as f64, mean_oracle(&logs)));
        }
    }
    if reg.len() < 3 {
        return None;
    }
    ols_slope_oracle(&reg)
}

pub fn mad_oracle(v: &[f64]) -> f64 {
    let med = quantile_oracle(v, 0.5);
    let dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    quantile_oracle(&dev, 0.5)
}

pub fn outlier_count_oracle(v: &[f64]) -> f64 {
    let q1 = quantile_oracle(v, 0.25);
    let q3 = quantile_oracle(v, 0.75);
    let iqr = q3 - q1;
    v.iter()
        .filter(|&&x| x < q1 - 1.5 * iqr || x > q3 + 1.5 * iqr)
        .count() as f64
}

pub fn peaks_oracle(v: &[f64]) -> (f64, f64) {
    let mut up = 0;
    let mut down = 0;
    for i in 1..v.len().saturating_sub(1) {
        if v[i] > v[i - 1] && v[i] > v[i + 1] {
            up += 1;
        }
        if v[i] < v[i - 1] && v[i] < v[i + 1] {
            down += 1;
        }
    }
    (up as f64, down as f64)
}

pub fn oscillation_oracle(v: &[f64]) -> f64 {
    let mut score = 0i64;
    for w in v.windows(2) {
        if w[1] > w[0] {
            score += 1;
        } else if w[1] < w[0] {
            score -= 1;
        }
    }
    score as f64
}

// ---- RReliefF oracle --------------------------------------------------

/// Literal RReliefF with exhaustive neighbor search, written directly from
/// the published update equations.
pub fn rrelieff_oracle(features: &[Vec<f64>], y: &[f64], k: usize, sigma: f64) -> Vec<f64> {
    let n = y.len();
    let p = features.len();
    let norm = |col: &[f64]| -> Vec<f64> {
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            col.iter().map(|v| (v - lo) / (hi - lo)).collect()
        } else {
            vec![0.0; n]
        }
    };
    let cols: Vec<Vec<f64>> = features.iter().map(|c| norm(c)).collect();
    let ty = norm(y);

    let mut w_raw = Vec::with_capacity(k);
    for rank in 1..=k {
        w_raw.push((-((rank as f64) / sigma).powi(2)).exp());
    }
    let s: f64 = w_raw.iter().sum();
    let w: Vec<f64> = w_raw.iter().map(|x| x / s).collect();

    let mut n_dc = 0.0;
    let mut n_da = vec![0.0; p];
    let mut n_dcda = vec![0.0; p];
    for i in 0..n {
        let mut dist: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let mut d2 = 0.0;
                for col in &cols {
                    d2 += (col[i] - col[j]).powi(2);
                }
                (d2, j)
            })
            .collect();
        dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (rank, &(_, j)) in dist.iter().take(k).enumerate() {
            let dy = (ty[i] - ty[j]).abs();
            n_dc += w[rank] * dy;
            for (f, col) in cols.iter().enumerate() {
                let da = (col[i] - col[j]).abs();
                n_da[f] += w[rank] * da;
                n_dcda[f] += w[rank] * dy * da;
            }
        }
    }
    (0..p)
        .map(|f| {
            let hit = if n_dc > 0.0 { n_dcda[f] / n_dc } else { 0.0 };
            let rest = n as f64 - n_dc;
            let miss = if rest > 0.0 {
                (n_da[f] - n_dcda[f]) / rest
            } else {
                0.0
            };
            hit - miss
        })
        .collect()
}

/// Ordinary least squares with intercept via the normal equations.
pub fn ols_oracle(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let n = y.len();
    let p = columns.len() + 1; // leading intercept
    let design = |i: usize, j: usize| if j == 0 { 1.0 } else { columns[j - 1][i] };
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (a, row) in xtx.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = (0..n).map(|i| design(i, a) * design(i, b)).sum();
        }
        xty[a] = (0..n).map(|i| design(i, a) * y[i]).sum();
    }
    solve_linear(xtx, xty)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reference value for one summary of the catalog, mirroring the library's
/// finiteness guard: any non-finite reference value counts as missing. The
/// catalog labels are the only thing shared with the library; all math goes
/// through the brute-force routes above.
pub fn reference_summary(id: SummaryId, v: &[f64]) -> Option<f64> {
    let q = v.len();
    let raw = match id {
        SummaryId::Mean => Some(mean_oracle(v)),
        SummaryId::Mdn => Some(quantile_oracle(v, 0.5)),
        SummaryId::Sd => sample_var_oracle(v).map(f64::sqrt),
        SummaryId::Var => sample_var_oracle(v),
        SummaryId::Iqr => Some(quantile_oracle(v, 0.75) - quantile_oracle(v, 0.25)),
        SummaryId::Rd => rd_oracle(v),
        SummaryId::Min => v.iter().cloned().reduce(f64::min),
        SummaryId::Max => v.iter().cloned().reduce(f64::max),
        SummaryId::Lp => Some(v[q - 1]),
        SummaryId::Sk => skew_oracle(v),
        SummaryId::Krt => kurt_oracle(v),
        SummaryId::P05 => Some(quantile_oracle(v, 0.05)),
        SummaryId::P95 => Some(quantile_oracle(v, 0.95)),
        SummaryId::Acc1 => acc_oracle(v).map(|(m, _)| m),
        SummaryId::Acc2 => acc_oracle(v).map(|(_, s)| s),
        SummaryId::Bp => bp_acf_pacf_oracle(v).0,
        SummaryId::Pacf => bp_acf_pacf_oracle(v).2,
        SummaryId::Acf => bp_acf_pacf_oracle(v).1,
        SummaryId::Lrd1 => hurst_oracle(v, 1.0),
        SummaryId::Lrd2 => hurst_oracle(v, 2.0),
        SummaryId::Slp => slope_oracle(v),
        SummaryId::Norm => Some(v.iter().map(|x| x * x).sum::<f64>().sqrt()),
        SummaryId::No => Some(outlier_count_oracle(v)),
        SummaryId::Amp => amp_oracle(v),
        SummaryId::Step => step_oracle(v),
        SummaryId::PeakI => Some(peaks_oracle(v).0),
        SummaryId::PeakD => Some(peaks_oracle(v).1),
        SummaryId::Od => Some(oscillation_oracle(v)),
        SummaryId::PvSt => poincare_oracle(v).0,
        SummaryId::PvLt => poincare_oracle(v).1,
        SummaryId::Mle => mle_oracle(v),
        SummaryId::Mad => Some(mad_oracle(v)),
    };
    raw.filter(|x| x.is_finite())
}

/// Comparison tolerance per summary: looser for the iterative estimators.
pub fn summary_tolerance(id: SummaryId) -> f64 {
    match id {
        SummaryId::Lrd1 | SummaryId::Lrd2 | SummaryId::Mle => 1e-6,
        _ => 1e-9,
    }
}

/// Reference output of one transform, given the fitted Box-Cox
/// `(lambda, shift)` when the seasonal/positivity context provides one.
pub fn reference_transform(
    id: TransformId,
    v: &[f64],
    start_index: usize,
    frequency: Option<usize>,
    boxcox: Option<(f64, f64)>,
) -> Option<Vec<f64>> {
    match id {
        TransformId::I => Some(v.to_vec()),
        TransformId::Sma => sma_oracle(v),
        TransformId::Diff => diff_oracle(v),
        TransformId::Diff2 => diff2_oracle(v),
        TransformId::Bc => boxcox.and_then(|(lambda, shift)| boxcox_oracle(v, lambda, shift)),
        TransformId::Sin => frequency.map(|f| fourier_oracle(v.len(), start_index, f, true)),
        TransformId::Cos => frequency.map(|f| fourier_oracle(v.len(), start_index, f, false)),
        TransformId::Dwt => dwt_oracle(v),
    }
}
