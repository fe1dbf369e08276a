//! Configuration resolution: built-in defaults, flat key-value config
//! files, command-line overrides, and the canonical fingerprint embedded
//! in every output file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};
use vest_core::experiment::default_size_grid;
use vest_core::pipeline::{Method, SelectionConfig};
use vest_core::series::CsvSpec;
use vest_core::synthetic::synthetic_corpus;
use vest_core::{load_series, ExperimentConfig, TimeSeries};

use crate::CommonArgs;

pub const DEFAULT_FREQUENCY: usize = 12;
pub const DEFAULT_CORPUS_SERIES: usize = 10;
pub const DEFAULT_CORPUS_LENGTH: usize = 2000;

/// Effective configuration for one command after merging defaults, the
/// optional config file, and command-line flags (flags win).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: &'static str,
    pub inputs: Vec<PathBuf>,
    pub delimiter: u8,
    pub frequency: Option<usize>,
    pub methods: Vec<Method>,
    pub na_perc: f64,
    pub u_perc: f64,
    pub corr_perc: f64,
    pub repetitions: usize,
    pub train_frac: f64,
    pub test_frac: f64,
    pub p_min: usize,
    pub p_max: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub sizes: Vec<usize>,
    /// Series count of the bundled corpus when no inputs are given.
    pub corpus_series: usize,
    /// Length of the bundled corpus series.
    pub corpus_length: usize,
}

/// Values read from a config file; `None` means the key was absent.
#[derive(Debug, Default)]
struct FileValues {
    input: Option<Vec<PathBuf>>,
    frequency: Option<usize>,
    no_frequency: Option<bool>,
    delimiter: Option<char>,
    methods: Option<Vec<String>>,
    na_perc: Option<f64>,
    u_perc: Option<f64>,
    corr_perc: Option<f64>,
    repetitions: Option<usize>,
    train_frac: Option<f64>,
    test_frac: Option<f64>,
    p_min: Option<usize>,
    p_max: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    sizes: Option<Vec<usize>>,
    series: Option<usize>,
    length: Option<usize>,
}

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("{e}")))
        .collect()
}

fn parse_config_file(path: &Path) -> Result<FileValues> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut v = FileValues::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let fail = |e: anyhow::Error| {
            anyhow!(
                "{}:{}: bad value for `{key}`: {e}",
                path.display(),
                lineno + 1
            )
        };
        match key {
            "input" => v.input = Some(value.split(',').map(|s| s.trim().into()).collect()),
            "frequency" => v.frequency = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "no-frequency" => {
                v.no_frequency = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?)
            }
            "delimiter" => {
                let mut chars = value.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => v.delimiter = Some(c),
                    _ => return Err(fail(anyhow!("expected a single character"))),
                }
            }
            "methods" => v.methods = Some(value.split(',').map(|s| s.trim().into()).collect()),
            "na-perc" => v.na_perc = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "u-perc" => v.u_perc = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "corr-perc" => v.corr_perc = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "repetitions" => v.repetitions = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "train-frac" => v.train_frac = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "test-frac" => v.test_frac = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "p-min" => v.p_min = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "p-max" => v.p_max = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "seed" => v.seed = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "out" => v.out = Some(value.into()),
            "sizes" => v.sizes = Some(parse_list(value).map_err(fail)?),
            "series" => v.series = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            "length" => v.length = Some(value.parse().map_err(|e| fail(anyhow!("{e}")))?),
            other => bail!(
                "{}:{}: unknown config key `{other}`",
                path.display(),
                lineno + 1
            ),
        }
    }
    Ok(v)
}

impl Resolved {
    pub fn new(command: &'static str, args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => parse_config_file(path)?,
            None => FileValues::default(),
        };

        // frequency has an explicit "none" state; the most specific source
        // wins: CLI flag, then config file, then the seasonal default
        let frequency = if args.no_frequency {
            None
        } else if let Some(f) = args.frequency {
            Some(f)
        } else if file.no_frequency == Some(true) {
            None
        } else {
            Some(file.frequency.unwrap_or(DEFAULT_FREQUENCY))
        };

        let method_names = args
            .methods
            .clone()
            .or(file.methods)
            .unwrap_or_else(|| Method::ALL.iter().map(|m| m.id().to_string()).collect());
        let methods = method_names
            .iter()
            .map(|name| Method::from_str(name).map_err(|e| anyhow!("{e}")))
            .collect::<Result<Vec<_>>>()?;

        let sizes = args
            .sizes
            .clone()
            .or(file.sizes)
            .unwrap_or_else(default_size_grid);
        let default_length = if command == "sample-size" {
            sizes.iter().copied().max().unwrap_or(DEFAULT_CORPUS_LENGTH)
        } else {
            DEFAULT_CORPUS_LENGTH
        };

        let resolved = Resolved {
            command,
            inputs: args.input.clone().or(file.input).unwrap_or_default(),
            delimiter: args.delimiter.or(file.delimiter).map_or(b',', |c| c as u8),
            frequency,
            methods,
            na_perc: args.na_perc.or(file.na_perc).unwrap_or(70.0),
            u_perc: args.u_perc.or(file.u_perc).unwrap_or(1.0),
            corr_perc: args.corr_perc.or(file.corr_perc).unwrap_or(95.0),
            repetitions: args.repetitions.or(file.repetitions).unwrap_or(10),
            train_frac: args.train_frac.or(file.train_frac).unwrap_or(0.6),
            test_frac: args.test_frac.or(file.test_frac).unwrap_or(0.1),
            p_min: args.p_min.or(file.p_min).unwrap_or(10),
            p_max: args.p_max.or(file.p_max).unwrap_or(30),
            seed: args.seed.or(file.seed).unwrap_or(0),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| "vest-out".into()),
            sizes,
            corpus_series: args.series.or(file.series).unwrap_or(DEFAULT_CORPUS_SERIES),
            corpus_length: args.length.or(file.length).unwrap_or(default_length),
        };
        resolved.experiment_config().validate()?;
        Ok(resolved)
    }

    pub fn selection_config(&self) -> SelectionConfig {
        SelectionConfig {
            na_perc: self.na_perc,
            u_perc: self.u_perc,
            corr_perc: self.corr_perc,
        }
    }

    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            selection: self.selection_config(),
            methods: self.methods.clone(),
            repetitions: self.repetitions,
            train_frac: self.train_frac,
            test_frac: self.test_frac,
            p_min: self.p_min,
            p_max: self.p_max,
            seed: self.seed,
        }
    }

    /// Canonical key-sorted rendering of the effective configuration. The
    /// output directory is deliberately excluded: it does not affect any
    /// computed result.
    pub fn canonical(&self) -> String {
        let inputs = if self.inputs.is_empty() {
            format!("bundled:{}x{}", self.corpus_series, self.corpus_length)
        } else {
            self.inputs
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        let methods = self
            .methods
            .iter()
            .map(|m| m.id())
            .collect::<Vec<_>>()
            .join(",");
        let sizes = self
            .sizes
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut lines = vec![
            format!("command={}", self.command),
            format!("corr-perc={}", self.corr_perc),
            format!("delimiter={}", self.delimiter as char),
            format!(
                "frequency={}",
                self.frequency.map_or("none".to_string(), |f| f.to_string())
            ),
            format!("inputs={inputs}"),
            format!("methods={methods}"),
            format!("na-perc={}", self.na_perc),
            format!("p-max={}", self.p_max),
            format!("p-min={}", self.p_min),
            format!("repetitions={}", self.repetitions),
            format!("seed={}", self.seed),
            format!("sizes={sizes}"),
            format!("test-frac={}", self.test_frac),
            format!("train-frac={}", self.train_frac),
            format!("u-perc={}", self.u_perc),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }

    pub fn config_hash(&self) -> String {
        sha256_hex(&self.canonical())
    }

    /// Loads the configured inputs, or the bundled synthetic corpus when no
    /// inputs are given. Directories contribute their `.csv` files in name
    /// order; explicit paths keep their given order.
    pub fn load_corpus(&self) -> Result<Vec<TimeSeries>> {
        if self.inputs.is_empty() {
            return synthetic_corpus(self.corpus_series, self.corpus_length, self.seed)
                .into_iter()
                .map(|s| s.with_frequency(self.frequency).map_err(|e| anyhow!("{e}")))
                .collect();
        }
        let mut files = Vec::new();
        for path in &self.inputs {
            if path.is_dir() {
                let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                    .with_context(|| format!("reading directory {}", path.display()))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
                    .collect();
                entries.sort();
                files.extend(entries);
            } else {
                files.push(path.clone());
            }
        }
        if files.is_empty() {
            bail!("no input CSV files found");
        }
        let spec = CsvSpec {
            delimiter: self.delimiter,
            frequency: self.frequency,
        };
        files
            .iter()
            .map(|f| load_series(f, &spec).map_err(|e| anyhow!("{e}")))
            .collect()
    }
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
