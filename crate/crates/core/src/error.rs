use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    OperandOutOfRange { qubit: usize, width: usize },
    #[error("duplicate operand {0}")]
    DuplicateOperand(usize),
    #[error("{kind} expects {expected} operand(s), got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("MEASURE is not allowed in unitary simulation")]
    MeasureInUnitary,
    #[error("qubit list is empty")]
    EmptyQubitList,
    #[error("{0} qubits exceeds the dense simulation limit of {max}", max = crate::simcore::MAX_DENSE_QUBITS)]
    TooManyQubits(usize),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value {value} out of range: {what}")]
    OutOfRange { value: u64, what: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("qubit {0} has no chain position")]
    UnplacedQubit(usize),
    #[error("qubit sets overlap at device qubit {0}")]
    Overlap(usize),
    #[error("device too small: need {needed} qubits, device has {available}")]
    DeviceOverflow { needed: usize, available: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input rather than execution failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
