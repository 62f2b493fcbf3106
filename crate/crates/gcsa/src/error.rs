//! Error types for model construction, file ingestion and analysis.

use thiserror::Error;

/// Errors raised while building or validating a variational model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("duplicate entity id `{0}`")]
    DuplicateEntityId(String),

    #[error("duplicate constraint id `{0}`")]
    DuplicateConstraintId(String),

    #[error("constraint `{constraint}`: dangling reference to unknown entity `{entity}`")]
    DanglingReference { constraint: String, entity: String },

    #[error("entity `{id}`: orientation norm {norm} deviates from 1 by more than 1e-9")]
    NonUnitOrientation { id: String, norm: f64 },

    #[error("entity `{id}` ({kind}): missing orientation vector")]
    MissingOrientation { id: String, kind: String },

    #[error("entity `{id}` ({kind}): orientation not allowed for this kind")]
    UnexpectedOrientation { id: String, kind: String },

    #[error("entity `{id}`: size parameter {value} must be strictly positive")]
    NonPositiveSizeParam { id: String, value: f64 },

    #[error("entity `{id}` ({kind}): expected {expected} size parameter(s), got {got}")]
    SizeParamCount {
        id: String,
        kind: String,
        expected: usize,
        got: usize,
    },

    #[error("tolerance must be strictly positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error("model must contain at least one entity")]
    EmptyModel,

    #[error("constraint `{id}` ({kind}): signature mismatch, expected {expected}, got {got}")]
    SignatureMismatch {
        id: String,
        kind: String,
        expected: String,
        got: String,
    },

    #[error("constraint `{id}`: expected exactly {expected} entity references, got {got}")]
    ReferenceCount {
        id: String,
        expected: usize,
        got: usize,
    },

    #[error("constraint `{id}`: entity references must be distinct")]
    RepeatedReference { id: String },

    #[error("constraint `{id}`: angle value {value} outside the open interval (0, pi)")]
    AngleOutOfRange { id: String, value: f64 },

    #[error("constraint `{id}`: zero-length edge at witness, Jacobian row degenerate")]
    DegenerateEdge { id: String },

    #[error("constraint `{id}`: line directions are parallel at witness, distance row degenerate")]
    ParallelLines { id: String },

    #[error("constraint `{id}` ({kind}): requires a value")]
    MissingValue { id: String, kind: String },

    #[error("constraint `{id}` ({kind}): does not take a value")]
    UnexpectedValue { id: String, kind: String },

    #[error("constraint `{id}`: negative distance value {value}")]
    NegativeValue { id: String, value: f64 },
}

/// Errors raised by analysis operations that require a valid witness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("witness invalid: max residual {max_residual:.3e} exceeds threshold {threshold:.3e}")]
    InvalidWitness { max_residual: f64, threshold: f64 },
}

/// Errors raised while reading or writing model and report files.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("cannot write `{path}`: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error in `{path}` at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("entity `{id}` ({kind}): missing field `{field}`")]
    MissingField {
        id: String,
        kind: String,
        field: String,
    },

    #[error("entity `{id}` ({kind}): field `{field}` is not applicable")]
    UnexpectedField {
        id: String,
        kind: String,
        field: String,
    },

    #[error("entity `{id}`: unknown kind `{kind}`")]
    UnknownEntityKind { id: String, kind: String },

    #[error("constraint `{id}`: unknown kind `{kind}`")]
    UnknownConstraintKind { id: String, kind: String },

    #[error(transparent)]
    Model(#[from] ModelError),
}
