use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("moment of order {order} does not converge for {what}")]
    NonSummable { what: String, order: usize },
    #[error("degenerate distribution: {0}")]
    Degenerate(String),
    #[error("cannot equalise stub counts: vertex side has {vertex_stubs} stubs, edge side cannot reach it ({detail})")]
    ParityFailure {
        vertex_stubs: u64,
        detail: String,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("incidence graph has a repeated (vertex, edge) pair and is not a hyper-multigraph")]
    NotAHypergraph,
    #[error("conditioning too rare: no accepted sample after {attempts} attempts (acceptance estimate < {acceptance_upper:.3e})")]
    ConditioningTooRare {
        attempts: u64,
        acceptance_upper: f64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("pattern is disconnected; realisation counts are only defined for connected patterns")]
    Disconnected,
    #[error("tree is truncated at depth {0} and cannot be scored")]
    Unscoreable(usize),
    #[error("formula has free variables: {0:?}")]
    NotASentence(Vec<String>),
    #[error("pattern has excess {0}, expected a unicyclic pattern (excess 0)")]
    NotUnicyclic(i64),
    #[error("tree is not realisable under the given supports: {0}")]
    NotInTheory(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
