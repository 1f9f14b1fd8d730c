//! Error type shared across the pipeline.

use crate::corpus::CommentKey;
use thiserror::Error;

/// Everything that can go wrong between a raw transcript and a dominance report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed record in a transcript or annotation file. `line` is 1-based
    /// and counts the header.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty transcript")]
    EmptyTranscript,

    /// Bad lexicon, run configuration, or serialized model.
    #[error("configuration error: {0}")]
    Config(String),

    /// The response vector contains only one class; the likelihood has no
    /// interior maximum.
    #[error("single-class response: every observation is {0}")]
    SingleClassResponse(u8),

    #[error("rank-deficient design; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    /// Prediction rows do not carry the columns the model was fitted on.
    #[error("column mismatch: missing [{}], extra [{}]", missing.join(", "), extra.join(", "))]
    ColumnMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("invalid design matrix: {0}")]
    Design(String),

    /// Precondition violations on otherwise well-typed inputs (empty label
    /// lists, misaligned vectors, out-of-range thresholds).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Annotation rows referencing comments that do not exist in the corpus.
    #[error("unknown comment keys in annotations: {}", format_keys(.0))]
    UnknownKeys(Vec<CommentKey>),

    /// Coder disagreements without a consensus value block model fitting.
    #[error("{0} comments have unresolved coder disagreements; reconcile them or enable the coder-a fallback")]
    Unresolved(usize),

    #[error(
        "resolutions do not match the disagreements: missing [{}], extraneous [{}]",
        format_keys(missing),
        format_keys(extraneous)
    )]
    ResolutionMismatch {
        missing: Vec<CommentKey>,
        extraneous: Vec<CommentKey>,
    },
}

fn format_keys(keys: &[CommentKey]) -> String {
    keys.iter()
        .map(|k| format!("{}:{}", k.group_id, k.seq))
        .collect::<Vec<_>>()
        .join(", ")
}
