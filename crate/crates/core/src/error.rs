use thiserror::Error;

/// Errors raised while building circuits, simulating states or running
/// propagation experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("amplitude vector is all zero")]
    ZeroVector,
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit {0} appears more than once in a single gate")]
    DuplicateQubit(usize),
    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    QubitCountMismatch { circuit: usize, state: usize },
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },
    #[error("polynomial order {0} outside supported range 1..=4")]
    OrderOutOfRange(u32),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("gate with {0} controls has no OpenQASM 2.0 export")]
    UnsupportedArity(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
