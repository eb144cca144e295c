use thiserror::Error;

/// Errors raised by the simulator and the protocol layers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),
    #[error("labels overlap on `{0}`")]
    OverlappingLabels(String),
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid basis string `{0}`")]
    InvalidBasisString(String),
    #[error("state vector is zero")]
    ZeroVector,
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("{0} qubits exceeds the supported maximum of {max}", max = crate::qsim::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("control and target are the same qubit `{0}`")]
    SameControlTarget(String),
    #[error("outcome has probability {0:e}, cannot be forced")]
    ZeroProbability(f64),
    #[error("invalid outcome {0}")]
    InvalidOutcome(u8),
    #[error("new order is not a permutation of the register labels")]
    NotPermutation,
    #[error("label sets differ")]
    LabelMismatch,
    #[error("keep-set is empty")]
    EmptyKeep,
    #[error("GHZ index {0} out of range 0..8")]
    GhzIndex(usize),
    #[error("input is not normalized (|c0|^2 + |c1|^2 = {0})")]
    NotNormalized(f64),
    #[error("ownership violation: {0}")]
    Ownership(String),
    #[error("correction table: {0}")]
    Table(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
