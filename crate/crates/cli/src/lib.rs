//! Experiment harness for the one-shot knowledge-transfer simulator:
//! dataset ingestion (CSV / LIBSVM), train/public/test splitting, synthetic
//! task generators, SOLO and centralized teacher-ensemble baselines, sweep
//! runs, and versioned JSON reports. The `fedkt` binary wraps all of it in
//! `run`, `gen`, and `accountant` subcommands.

pub mod accountant;
pub mod baselines;
pub mod experiment;
pub mod formats;
pub mod report;
pub mod split;
pub mod synth;

use fedkt_core::domain::Dataset;
use fedkt_core::models::Classifier;

/// Errors surfaced by the harness, each naming the stage that failed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: fedkt_core::Error,
    },
    #[error(transparent)]
    Core(#[from] fedkt_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn stage(stage: &'static str) -> impl Fn(fedkt_core::Error) -> Error {
    move |source| Error::Stage { stage, source }
}

/// Fraction of test examples the model classifies correctly.
pub fn accuracy(model: &Classifier, test: &Dataset) -> Result<f64> {
    let mut correct = 0usize;
    for i in 0..test.len() {
        let predicted = model.predict(test.features(i)).map_err(stage("evaluate"))?;
        if Some(predicted) == test.label(i) {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}
