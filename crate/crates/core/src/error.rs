use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading data, parsing expressions or running the
/// mining pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column {column}: cannot parse `{cell}` as a finite number")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        cell: String,
    },

    #[error("{0}: no traces found")]
    EmptyInput(PathBuf),

    #[error("invalid signal `{id}`: {reason}")]
    InvalidSignal { id: String, reason: String },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}, column {column}: empty interval for `{param}`: {lo} > {hi}")]
    EmptyInterval {
        line: usize,
        column: usize,
        param: String,
        lo: f64,
        hi: f64,
    },

    #[error("symbol `{0}` is not part of the alphabet")]
    UnknownSymbol(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
