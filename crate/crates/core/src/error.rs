use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solvers, assembly routines and the front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{}", config_message(*.line, .key.as_deref(), .message))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn config_message(line: Option<usize>, key: Option<&str>, message: &str) -> String {
    match (line, key) {
        (Some(line), Some(key)) => format!("config error at line {line} (key `{key}`): {message}"),
        (Some(line), None) => format!("config error at line {line}: {message}"),
        (None, Some(key)) => format!("config error (key `{key}`): {message}"),
        (None, None) => format!("config error: {message}"),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            key: None,
            message: msg.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Domain(_) | Error::Shape { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
