//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("{what}: arity {arity} exceeds cap {cap}")]
    ArityCap {
        what: &'static str,
        arity: usize,
        cap: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires a non-constant function")]
    ConstantFunction,

    #[error("OR-reduction precondition violated: {0}")]
    OrPrecondition(String),

    #[error("exact error mode requires an explicit support")]
    NoSupport,

    #[error("decision tree not reduced: node querying variable {var} has identical child functions")]
    NotReduced { var: usize },

    #[error("projection sampling exhausted {attempts} retries without a large good set")]
    RetriesExhausted { attempts: usize },

    #[error("projection produced a degenerate certificate (no addressed variables); retry with a new seed")]
    DegenerateProjection,

    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
