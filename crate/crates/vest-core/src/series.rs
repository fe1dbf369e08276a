//! Univariate series, time-delay embedding, and holdout window generation.
//!
//! A series is embedded by taking, for every observation `y_t` with `t >= p`,
//! the `p` observations immediately before it as predictors. Lags are stored
//! most-recent-first: row `i` has `lags[0] = y_{t-1}`, `lags[1] = y_{t-2}`, and
//! so on. Downstream transform code reverses each vector into chronological
//! order before computing statistics.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::ops::Range;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Ordered, finite observations of one univariate series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    frequency: Option<usize>,
    name: String,
}

impl TimeSeries {
    /// Validates that the series is non-empty, every value is finite, and the
    /// seasonal frequency (observations per cycle), when given, is at least 2.
    pub fn new(
        values: Vec<f64>,
        frequency: Option<usize>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("no observations".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value at index {pos}"
            )));
        }
        if let Some(f) = frequency {
            if f < 2 {
                return Err(Error::InvalidSeries(format!(
                    "frequency must be >= 2, got {f}"
                )));
            }
        }
        Ok(Self {
            values,
            frequency,
            name: name.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees n >= 1
    }

    pub fn frequency(&self) -> Option<usize> {
        self.frequency
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Returns a copy truncated to the first `n` observations.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate series of length {} to {n}",
                self.values.len()
            )));
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
            frequency: self.frequency,
            name: self.name.clone(),
        })
    }

    /// Replaces the configured frequency (`None` disables seasonal transforms).
    pub fn with_frequency(mut self, frequency: Option<usize>) -> Result<Self> {
        if let Some(f) = frequency {
            if f < 2 {
                return Err(Error::InvalidSeries(format!(
                    "frequency must be >= 2, got {f}"
                )));
            }
        }
        self.frequency = frequency;
        Ok(self)
    }
}

/// CSV parsing options for [`load_series`].
#[derive(Debug, Clone)]
pub struct CsvSpec {
    /// Field delimiter, `b','` by default.
    pub delimiter: u8,
    /// Seasonal frequency attached to the loaded series. Never inferred.
    pub frequency: Option<usize>,
}

impl Default for CsvSpec {
    fn default() -> Self {
        Self {
            delimiter: b',',
            frequency: None,
        }
    }
}

/// Reads one numeric column from a CSV file.
///
/// The value column is the last field of each record; an optional leading
/// timestamp column is ignored. A header row is detected by a non-numeric
/// value field on the first line. Error messages cite 1-based file lines.
pub fn load_series(path: &Path, spec: &CsvSpec) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| Error::Load {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let err = |reason: String| Error::Load {
        path: path.display().to_string(),
        reason,
    };

    let delim = char::from(spec.delimiter);
    let mut values = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| err(e.to_string()))?;
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let field = line
            .split(delim)
            .next_back()
            .map(str::trim)
            .unwrap_or_default();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err(err(format!("non-finite value at row {row}"))),
            Err(_) if row == 1 => continue, // header row
            Err(_) => return Err(err(format!("non-numeric cell {field:?} at row {row}"))),
        }
    }
    if values.is_empty() {
        return Err(err("no observations".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    TimeSeries::new(values, spec.frequency, name)
}

/// One observation of the regression task: `p` lags and their target.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    /// Lags in most-recent-first order: `lags[j] = y_{t-1-j}`.
    pub lags: Vec<f64>,
    /// Value to forecast, `y_t`.
    pub target: f64,
    /// Absolute 0-based index of the target in the source series.
    pub target_index: usize,
}

/// The embedded data set `(X_i, y_i)` for one series at dimension `p`.
#[derive(Debug, Clone)]
pub struct EmbeddingDataset {
    rows: Vec<EmbeddingRow>,
    dimension: usize,
    series_name: String,
}

impl EmbeddingDataset {
    pub fn rows(&self) -> &[EmbeddingRow] {
        &self.rows
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn series_name(&self) -> &str {
        &self.series_name
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.target).collect()
    }

    pub fn target_indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.target_index).collect()
    }

    /// Copies the rows whose target index falls in `range`.
    pub fn slice_by_target(&self, range: Range<usize>) -> EmbeddingDataset {
        EmbeddingDataset {
            rows: self
                .rows
                .iter()
                .filter(|r| range.contains(&r.target_index))
                .cloned()
                .collect(),
            dimension: self.dimension,
            series_name: self.series_name.clone(),
        }
    }
}

/// Time-delay embedding of the whole series at dimension `p`.
pub fn embed(series: &TimeSeries, p: usize) -> Result<EmbeddingDataset> {
    embed_range(series, p, 0..series.len())
}

/// Embedding restricted to `range`: both lags and targets stay inside it, so
/// the first target sits `p` positions after `range.start`. Target indices are
/// absolute positions in the full series.
pub fn embed_range(series: &TimeSeries, p: usize, range: Range<usize>) -> Result<EmbeddingDataset> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "embedding dimension must be >= 1".into(),
        ));
    }
    if range.end > series.len() || range.start >= range.end {
        return Err(Error::InvalidArgument(format!(
            "range {range:?} out of bounds for series of length {}",
            series.len()
        )));
    }
    let n = range.end - range.start;
    if p >= n {
        return Err(Error::SeriesTooShort { n, p });
    }
    let values = series.values();
    let rows = (range.start + p..range.end)
        .map(|t| EmbeddingRow {
            lags: (1..=p).map(|j| values[t - j]).collect(),
            target: values[t],
            target_index: t,
        })
        .collect();
    Ok(EmbeddingDataset {
        rows,
        dimension: p,
        series_name: series.name().to_string(),
    })
}

/// Disjoint, contiguous train / validation / test index ranges.
///
/// `train` excludes the validation slice; the full training block of the
/// holdout procedure is `train ∪ validation`, with validation being its final
/// 10%.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoldoutWindow {
    pub train: Range<usize>,
    pub validation: Range<usize>,
    pub test: Range<usize>,
}

impl HoldoutWindow {
    /// Builds a window at `origin` with `train_len` training points
    /// (validation carved from their tail) and `test_len` test points after.
    pub fn at(origin: usize, train_len: usize, test_len: usize) -> Self {
        let val_len = train_len / 10;
        let train_end = origin + train_len;
        HoldoutWindow {
            train: origin..train_end - val_len,
            validation: train_end - val_len..train_end,
            test: train_end..train_end + test_len,
        }
    }

    /// The full training block (fit + validation slices).
    pub fn full_train(&self) -> Range<usize> {
        self.train.start..self.validation.end
    }

    /// The whole window, training block plus test block.
    pub fn span(&self) -> Range<usize> {
        self.train.start..self.test.end
    }

    pub fn origin(&self) -> usize {
        self.train.start
    }
}

impl fmt::Display for HoldoutWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "train [{}, {}), validation [{}, {}), test [{}, {})",
            self.train.start,
            self.train.end,
            self.validation.start,
            self.validation.end,
            self.test.start,
            self.test.end
        )
    }
}

fn window_lengths(n: usize, train_frac: f64, test_frac: f64) -> Result<(usize, usize)> {
    if !(train_frac > 0.0 && test_frac > 0.0 && train_frac + test_frac <= 1.0) {
        return Err(Error::Holdout(format!(
            "invalid fractions train = {train_frac}, test = {test_frac}"
        )));
    }
    let train_len = (train_frac * n as f64).floor() as usize;
    let test_len = (test_frac * n as f64).floor() as usize;
    if train_len < 2 || test_len < 1 {
        return Err(Error::Holdout(format!(
            "series of length {n} too short for one window ({train_frac}/{test_frac})"
        )));
    }
    Ok((train_len, test_len))
}

/// Repeated holdout with deterministic, evenly spaced window origins.
///
/// Origin `r` is `round(r * (n - W) / (repetitions - 1))` with `W` the window
/// size, so the first window starts at 0 and the last ends at `n`.
pub fn repeated_holdout(
    n: usize,
    repetitions: usize,
    train_frac: f64,
    test_frac: f64,
) -> Result<Vec<HoldoutWindow>> {
    if repetitions < 1 {
        return Err(Error::Holdout("repetitions must be >= 1".into()));
    }
    let (train_len, test_len) = window_lengths(n, train_frac, test_frac)?;
    let feasible = n - (train_len + test_len);
    let origins: Vec<usize> = if repetitions == 1 {
        vec![0]
    } else {
        (0..repetitions)
            .map(|r| (r as f64 * feasible as f64 / (repetitions - 1) as f64).round() as usize)
            .collect()
    };
    Ok(origins
        .into_iter()
        .map(|o| HoldoutWindow::at(o, train_len, test_len))
        .collect())
}

/// Seeded variant drawing origins uniformly from the feasible range.
pub fn repeated_holdout_random(
    n: usize,
    repetitions: usize,
    train_frac: f64,
    test_frac: f64,
    seed: u64,
) -> Result<Vec<HoldoutWindow>> {
    if repetitions < 1 {
        return Err(Error::Holdout("repetitions must be >= 1".into()));
    }
    let (train_len, test_len) = window_lengths(n, train_frac, test_frac)?;
    let feasible = n - (train_len + test_len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut origins: Vec<usize> = (0..repetitions)
        .map(|_| rng.gen_range(0..=feasible))
        .collect();
    origins.sort_unstable();
    Ok(origins
        .into_iter()
        .map(|o| HoldoutWindow::at(o, train_len, test_len))
        .collect())
}
