use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed graph notation {notation:?}: {reason}")]
    Syntax { notation: String, reason: String },
    #[error("graph {0} contains a directed cycle")]
    Cycle(String),
    #[error("negative effect on the {0} edge; only the W-X edge may be negative")]
    Sign(&'static str),
    #[error("graph {0} is not one of the catalog classes")]
    UnknownClass(String),
    #[error("unknown name {0:?}")]
    UnknownName(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("vectors have mismatched lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("predictor has zero variance")]
    DegeneratePredictor,
    #[error("predictors are collinear")]
    Collinear,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("need at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("columns have mismatched lengths (x {x}, w {w}, y {y})")]
    LengthMismatch { x: usize, w: usize, y: usize },
    #[error("non-finite value in column {column} at row {row}")]
    NonFinite { column: &'static str, row: usize },
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("sample size must be at least 3, got {0}")]
    SampleSize(usize),
    #[error("replication count must be at least 1")]
    Replications,
    #[error("no catalog graph with id {0}")]
    UnknownGraphId(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot summarize an empty sample")]
    EmptySample,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("panel {panel} has no {technique} row")]
    MissingTechnique { panel: String, technique: String },
    #[error("no summaries for graph {0}")]
    MissingGraph(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}
