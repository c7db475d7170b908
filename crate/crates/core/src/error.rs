use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} circuit parameters, got {got}")]
    ParamCount { expected: usize, got: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("unknown ansatz template `{0}`")]
    UnknownTemplate(String),

    #[error("template registry: {0}")]
    Registry(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid dataset split: {0}")]
    InvalidSplit(String),

    #[error("{m} coefficients requested but the coefficient circuit only has {capacity} basis states")]
    Capacity { m: usize, capacity: usize },

    #[error("training set is empty")]
    EmptyTraining,

    #[error("training data contains a single class")]
    SingleClass,

    #[error("invalid hyperparameters: {0}")]
    Hyperparams(String),

    #[error("malformed record: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
