use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("extension modulus must have degree 2..=8, got {0}")]
    ModulusDegree(usize),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("not divisible: {0}")]
    NonDivisible(String),
    #[error("division by zero in the coefficient field")]
    DivisionByZero,
    #[error("value {0} is not representable in the field")]
    NotRepresentable(String),
    #[error("face with slope {0} is unbounded")]
    UnboundedFace(String),
    #[error("negative coordinate in {0}")]
    NegativeCoordinate(String),
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("boundary component {0} lies in the ideal of the u-parameters")]
    BoundaryInUIdeal(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("point {0} is not a vertex")]
    NotAVertex(String),
    #[error("generators are not weakly normalized at index {0}")]
    NotWeaklyNormalized(usize),
    #[error("preparation exceeded the step cap of {cap} steps: {detail}")]
    NonTermination { cap: usize, detail: String },
    #[error("label is not prepared: {0}")]
    NotPrepared(String),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("monotonicity violated: {0}")]
    MonotonicityViolation(String),
    #[error("ledger violated: {0}")]
    LedgerViolation(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("not a Hilbert polynomial: {0}")]
    NotAHilbertPolynomial(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Process exit code for this error: 1 invariant violation, 2 inconclusive, 3 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MonotonicityViolation(_)
            | Error::LedgerViolation(_)
            | Error::InvariantViolation(_) => 1,
            Error::Inconclusive(_) | Error::NonTermination { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
