use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading datasets or building complexes.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}, line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("edges.tsv, line {line}: endpoint {node} is not a known node id")]
    DanglingEdge { line: usize, node: u64 },

    #[error("labels.tsv, line {line}: node {node} is not a known node id")]
    DanglingLabel { line: usize, node: u64 },

    #[error("target node {node} has no label")]
    UnlabeledTarget { node: u32 },

    #[error("labels span node types `{first}` and `{second}`; exactly one target type is expected")]
    MixedLabelTypes { first: String, second: String },

    #[error("splits.json: node {node} appears in more than one split")]
    OverlappingSplits { node: u32 },

    #[error("splits.json: split `{split}` contains node {node}, which is not a target node")]
    NonTargetInSplit { split: String, node: u32 },

    #[error("splits.json: split `{split}` references unknown node {node}")]
    UnknownSplitNode { split: String, node: u64 },

    #[error("node ids must be the contiguous range 0..{expected}; {msg}")]
    NonContiguousIds { expected: usize, msg: String },

    #[error("nodes of type `{ty}` have inconsistent feature widths ({a} vs {b}, first at node {node})")]
    InconsistentFeatureWidth {
        ty: String,
        a: usize,
        b: usize,
        node: u32,
    },

    #[error("no labeled nodes; cannot determine target type")]
    NoLabels,

    #[error("invalid lift config: {0}")]
    InvalidLiftConfig(String),

    #[error("malformed bundle at {path}: {msg}")]
    MalformedBundle { path: PathBuf, msg: String },

    #[error("1-simplex {simplex:?} has no shared {eta}-hop neighbors; complex is inconsistent")]
    NoSharedNeighbors { simplex: Vec<u32>, eta: usize },
}

impl CoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: &str, line: usize, msg: impl Into<String>) -> Self {
        CoreError::Parse {
            file: file.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
