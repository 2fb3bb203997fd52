//! Crate-wide error type.

use thiserror::Error;

use crate::models::Station;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("settings panel has no entry for station {0}")]
    EmptyStation(Station),
    #[error("duplicate setting label `{0}` in panel")]
    DuplicateLabel(String),
    #[error("panel is missing required setting label `{0}`")]
    MissingLabel(String),
    #[error("panel label `{0}` not supported by generator `{1}`")]
    UnexpectedLabel(String, String),
    #[error("no setting labeled `{0}` in this run")]
    UnknownLabel(String),
    #[error("unknown hidden-variable family `{0}`")]
    UnknownFamily(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),
    #[error("inequality `{inequality}` takes {expected} probabilities, got {got}")]
    ArityMismatch {
        inequality: String,
        expected: usize,
        got: usize,
    },
    #[error("{n_vars} observables exceed the supported maximum of {max}")]
    TooManyVariables { n_vars: usize, max: usize },
    #[error("malformed constraint: {0}")]
    InvalidConstraint(String),
    #[error("experiment plan requires n_pairs >= 1")]
    ZeroPairs,
    #[error("events are simultaneous for this observer; no station is later")]
    AmbiguousOrdering,
    #[error("label `{label}` belongs to station {actual}, expected station {expected}")]
    WrongStation {
        label: String,
        expected: Station,
        actual: Station,
    },
    #[error("generator `{0}` is not deterministic under a fixed seed")]
    NonDeterministic(String),
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
}
