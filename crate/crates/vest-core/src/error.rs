use thiserror::Error;

/// Errors produced by the feature-engineering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("load error in {path}: {reason}")]
    Load { path: String, reason: String },

    #[error("series too short for embedding dimension (n = {n}, p = {p})")]
    SeriesTooShort { n: usize, p: usize },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("holdout configuration infeasible: {0}")]
    Holdout(String),

    #[error("Box-Cox lambda selection failed: {0}")]
    BoxCox(String),

    #[error("selection removed every feature")]
    AllFeaturesDropped,

    #[error("missing expected column {0:?}")]
    MissingColumn(String),

    #[error("misaligned rows: {0}")]
    MisalignedRows(String),

    #[error("non-finite input in {0}")]
    NonFiniteInput(&'static str),

    #[error("target constant")]
    TargetConstant,

    #[error("constant training series")]
    ConstantTrainingSeries,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("unknown {kind} {name:?}; valid: {valid}")]
    UnknownId {
        kind: &'static str,
        name: String,
        valid: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
