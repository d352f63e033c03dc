use thiserror::Error;

/// Errors raised by the exact algebra engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("quadratic field mismatch: d={0} versus d={1}")]
    FieldMismatch(u64, u64),
    #[error("basis mismatch: {0} versus {1}")]
    BasisMismatch(String, String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("element is not homogeneous of a single degree")]
    NotHomogeneous,
    #[error("element is not parity homogeneous")]
    NotParityHomogeneous,
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not alternating")]
    NotAlternating,
    #[error("matrix has odd size {0}")]
    OddSize(usize),
    #[error("vector norm condition violated: {0}")]
    NormCondition(String),
    #[error("element is not nilpotent")]
    NotNilpotent,
    #[error("spin certificate failed: {0}")]
    NotSpin(String),
    #[error("element is not in the Clifford group: {0}")]
    NotCliffordGroup(String),
    #[error("subspace is not maximal isotropic")]
    NotMaximalIsotropic,
    #[error("the Igusa invariant vanishes, the secant plane is not unique")]
    TangentialCase,
    #[error("secant plane has rational or real pure spinors (no imaginary quadratic field)")]
    NoCmField,
    #[error("eigenspace dimension condition fails: {0}")]
    EigenspaceCondition(String),
    #[error("operators do not commute: {0}")]
    NotCommuting(String),
    #[error("form is degenerate")]
    Degenerate,
    #[error("unsupported rank n={0}")]
    UnsupportedRank(usize),
    #[error("zero rank component")]
    ZeroRank,
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("not a basis: {0}")]
    NotABasis(String),
    #[error("value is not rational")]
    NotRational,
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
