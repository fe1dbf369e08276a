//! Batch front-end for the feature engineering pipeline: ingest series,
//! run configured experiments, emit plot-ready CSV and JSON reports.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

mod commands;
mod config;

#[derive(Parser)]
#[command(
    name = "vest",
    version,
    about = "Feature engineering from time-delay embeddings, with forecast evaluation \
             against an auto-regressive baseline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed, transform, summarise and select; writes the per-series
    /// feature matrix (CSV) and fitted selection model (JSON)
    Features(CommonArgs),
    /// Repeated-holdout forecast comparison across the configured methods
    Experiment(CommonArgs),
    /// Feature importance tables: overall, by representation, by summary
    Importance(CommonArgs),
    /// Mean method rank as a function of truncated series length
    #[command(name = "sample-size")]
    SampleSize(CommonArgs),
    /// Write the bundled synthetic benchmark corpus as CSV files
    Generate(GenerateArgs),
}

/// Flags shared by the analysis commands. Every flag can also appear as a
/// `key = value` line in the `--config` file; explicit flags win.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Flat key-value config file; flags given on the command line override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Input CSV files or directories; omit to run on the bundled synthetic corpus
    #[arg(long, value_delimiter = ',', value_name = "PATH")]
    input: Option<Vec<PathBuf>>,

    /// Seasonal frequency attached to every loaded series [default: 12]
    #[arg(long)]
    frequency: Option<usize>,

    /// Treat the series as non-seasonal (drops the SIN/COS representations)
    #[arg(long)]
    no_frequency: bool,

    /// CSV field delimiter [default: ,]
    #[arg(long)]
    delimiter: Option<char>,

    /// Comma-separated method list [default: AR,VEST,AR+VEST,AR+BT,AR+BF]
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,

    /// Drop features missing in more than this percentage of rows [default: 70]
    #[arg(long)]
    na_perc: Option<f64>,

    /// Drop features with fewer distinct values than this percentage of rows [default: 1]
    #[arg(long)]
    u_perc: Option<f64>,

    /// Drop one of each feature pair correlated above this percentage [default: 95]
    #[arg(long)]
    corr_perc: Option<f64>,

    /// Number of repeated holdout windows [default: 10]
    #[arg(long)]
    repetitions: Option<usize>,

    /// Training fraction of each window [default: 0.6]
    #[arg(long)]
    train_frac: Option<f64>,

    /// Test fraction of each window [default: 0.1]
    #[arg(long)]
    test_frac: Option<f64>,

    /// Smallest embedding dimension searched [default: 10]
    #[arg(long)]
    p_min: Option<usize>,

    /// Largest embedding dimension searched [default: 30]
    #[arg(long)]
    p_max: Option<usize>,

    /// Random seed for every stochastic step [default: 0]
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory [default: vest-out]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Size grid for the sample-size study [default: 100,200,...,3000]
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,

    /// Number of bundled synthetic series when no --input is given [default: 10]
    #[arg(long)]
    series: Option<usize>,

    /// Length of the bundled synthetic series [default: 2000; sample-size: max of --sizes]
    #[arg(long)]
    length: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Number of series to generate
    #[arg(long, default_value_t = 10)]
    series: usize,

    /// Observations per series
    #[arg(long, default_value_t = 2000)]
    length: usize,

    /// Base seed; each series derives its own stream from it
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "vest-out")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Features(a) => config::Resolved::new("features", &a).and_then(commands::features),
        Command::Experiment(a) => {
            config::Resolved::new("experiment", &a).and_then(commands::experiment)
        }
        Command::Importance(a) => {
            config::Resolved::new("importance", &a).and_then(commands::importance)
        }
        Command::SampleSize(a) => {
            config::Resolved::new("sample-size", &a).and_then(commands::sample_size)
        }
        Command::Generate(a) => commands::generate(&a),
    };
    if let Err(e) = result {
        eprintln!("vest: error: {e:#}");
        std::process::exit(1);
    }
}
