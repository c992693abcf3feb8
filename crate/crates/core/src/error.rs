use thiserror::Error;

use crate::gates::GateKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),

    #[error("unsupported qubit count {0} (expected 1..=4)")]
    QubitCount(usize),

    #[error("malformed {kind:?} gate: {reason}")]
    MalformedGate { kind: GateKind, reason: String },

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite objective encountered during optimization")]
    NonFinite,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("Fock cutoff too small: population {population:e} above level {level}")]
    CutoffViolation { population: f64, level: usize },

    #[error("integration unstable: norm drift {0:e}")]
    StepInstability(f64),

    #[error("ill-conditioned Hessian (condition number {0:e})")]
    IllConditioned(f64),

    #[error("computation cancelled")]
    Cancelled,
}

pub type Result<T> = std::result::Result<T, Error>;
