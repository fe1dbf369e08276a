//! Automatic feature engineering for one-step forecasting of univariate
//! time series.
//!
//! The pipeline embeds a series into its recent lags, maps every embedding
//! vector through a catalog of 8 transforms, compresses each representation
//! with 32 summary statistics, filters the resulting feature matrix with
//! missing-value, uniqueness, and correlation filters, and feeds the
//! surviving features (optionally next to the raw lags) into a lasso
//! regression. Evaluation compares method variants with MASE under repeated
//! holdout, average ranks, and a Bayes sign test.

pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod importance;
pub mod learner;
pub mod matrix;
pub mod pipeline;
pub mod series;
pub mod summary;
pub mod synthetic;
pub mod transform;

pub use error::{Error, Result};
pub use evaluate::{bayes_sign_test, mase, percentage_difference, BayesSignResult};
pub use experiment::{
    run_experiment, sample_size_study, window_importance, EvaluationReport, ExperimentConfig,
};
pub use importance::{rrelieff, ImportanceReport};
pub use learner::{fit_lasso, lasso_path_and_select, LinearModel};
pub use matrix::{DenseMatrix, FeatureMatrix};
pub use pipeline::{
    apply_selection, fit_selection, generate_features, Method, SelectionConfig, SelectionModel,
};
pub use series::{embed, load_series, repeated_holdout, HoldoutWindow, TimeSeries};
pub use summary::{apply_summary, compute_all, SummaryId};
pub use transform::{TransformContext, TransformId};
