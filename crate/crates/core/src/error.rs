use thiserror::Error;

/// Errors raised by every layer of the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("subsystem `{label}` has no basis index {index} (dimension {dim})")]
    IndexOutOfRange {
        label: String,
        index: usize,
        dim: usize,
    },
    #[error("label `{0}` was not assigned a basis index")]
    MissingAssignment(String),
    #[error("invalid subsystem `{label}`: {reason}")]
    InvalidSubsystem { label: String, reason: String },
    #[error("total dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("operation on a zero-norm state")]
    ZeroNorm,
    #[error("measurement basis is not orthonormal (deviation {0:e})")]
    NonOrthonormalBasis(f64),
    #[error("measurement basis on `{label}` spans {rank} of {dim} dimensions")]
    IncompleteBasis {
        label: String,
        rank: usize,
        dim: usize,
    },
    #[error("operator is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("optical pump on `{0}` would merge coexisting |1> and |r> amplitudes")]
    AmbiguousPump(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("branch enumeration exceeded {0} branches")]
    BranchExplosion(usize),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
