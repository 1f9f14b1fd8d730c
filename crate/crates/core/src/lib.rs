//! Analytics for synchronous chat transcripts: who dominates a group discussion,
//! and which textual signals predict it.
//!
//! The pipeline runs in five stages, each its own module:
//!
//! 1. [`corpus`] — parse timestamped transcripts and compute descriptive statistics.
//! 2. [`features`] — extract per-comment dominance indicators (caps, punctuation,
//!    self/choice/time references) with configurable lexicons.
//! 3. [`annotations`] — ingest human-coded variables and dual-coder dominance labels,
//!    measure inter-coder reliability, reconcile disagreements.
//! 4. [`glm`] — binary logistic regression by maximum likelihood, with the standard
//!    diagnostics (standard errors, Wald chi-square, residual deviance, AIC).
//! 5. [`dominance`] — score comments, compute each member's share of their group's
//!    dominance comments, and flag members above the mean + 1 SD threshold.
//!
//! All values are immutable once constructed and safe to share across threads;
//! every operation is a pure function of its inputs.

pub mod annotations;
pub mod chart;
pub mod corpus;
pub mod dominance;
pub mod error;
pub mod features;
pub mod glm;
pub mod numfmt;

pub use annotations::{AnnotationSet, EdLabel, ManualCodes, ReliabilityReport};
pub use corpus::{Comment, CommentKey, CorpusStats, Transcript, TranscriptFormat};
pub use dominance::{DominanceReport, EdScore, ScoringMetrics};
pub use error::Error;
pub use features::{CommentFeatures, LexiconConfig, ParticipantAggregate};
pub use glm::{DesignMatrix, FitOptions, LogitModel, ModelRank};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
