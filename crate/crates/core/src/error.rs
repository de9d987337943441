use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field descriptor mismatch")]
    FieldMismatch,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("minimal polynomial is reducible")]
    Reducible,
    #[error("unverified irreducibility for a minimal polynomial of degree {0}")]
    UnverifiedIrreducibility(usize),
    #[error("unsupported factor degree {0}")]
    UnsupportedFactorDegree(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inner space is not contained in the outer space")]
    NotContained,
    #[error("matrix is singular")]
    Singular,
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("window parameter is not an integer: {0}")]
    NonIntegralWindow(String),
    #[error("index {0} is outside the support window")]
    OutsideSupport(i64),
    #[error("ramification insufficient: iteration stabilized at dimension {dim} < {m}")]
    RamificationInsufficient { dim: usize, m: usize },
    #[error("dimension overflow: {dim} > {m}")]
    DimensionOverflow { dim: usize, m: usize },
    #[error("right-hand side has a term of nonnegative support: {0}")]
    NonNegativeSupport(String),
    #[error("unsupported in characteristic {0}: {1}")]
    Characteristic(u64, String),
    #[error("product of constants with two nontrivial exponentials or two logarithms")]
    ConstantProduct,
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
