use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("qubit {0} appears more than once in a single gate")]
    DuplicateQubit(usize),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("register error: {0}")]
    Register(String),

    #[error("gate {index} has an unresolved classical condition")]
    UnresolvedCondition { index: usize },

    #[error("gate {index} is an undecomposed multi-controlled X; instantiate the circuit first")]
    Undecomposed { index: usize },

    #[error("gate {index} ({kind}) is not a classical reversible gate")]
    NonClassicalGate { index: usize, kind: &'static str },

    #[error("message space of 2^{bits} is too large for exhaustive search")]
    MessageSpaceTooLarge { bits: u32 },

    #[error("digest {digest:#04x} has no preimages")]
    NoPreimages { digest: u8 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
