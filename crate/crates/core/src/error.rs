use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalar modes differ: {0}")]
    ModeMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation is not available for symbolic scalars: {0}")]
    UnsupportedInSymbolicMode(&'static str),
    #[error("minimal polynomial is reducible: {0}")]
    ReducibleFieldSpec(String),
    #[error("invalid number field specification: {0}")]
    InvalidFieldSpec(String),
    #[error("pfaffian of an odd-dimensional matrix ({0})")]
    OddDimension(usize),
    #[error("invalid index tuple: {0}")]
    InvalidIndexTuple(String),
    #[error("matrix is not skew-symmetric: {0}")]
    NotSkew(String),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("matrix is not an integral skew-symmetric matrix")]
    NotSkewIntegral,
    #[error("invalid p = {p} for dimension n = {n}")]
    BadP { n: usize, p: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("C theta + D is singular; the action is undefined")]
    ActionUndefined,
    #[error("matrix is not block diagonal with a {0}x{0} leading block")]
    NotBlockDiagonal(usize),
    #[error("matrix is not theta-symplectic")]
    NotSymplectic,
    #[error("matrix does not have finite order within {0}")]
    InfiniteOrder(usize),
    #[error("ranges live in different coordinate systems: {0}")]
    LabelMismatch(String),
    #[error("scale factor is zero")]
    ZeroScale,
    #[error("inputs are of different kinds: {0}")]
    MixedKinds(String),
    #[error("field must be quadratic for continued fractions (degree {0})")]
    NotQuadratic(usize),
    #[error("leading block is singular (pfaffian is zero)")]
    SingularBlock,
    #[error("translation leaves the grid: {0}")]
    OutOfGrid(String),
    #[error("no metaplectic operator in the catalog for this block: {0}")]
    UnsupportedW1(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("input does not match the expected shape: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable code used in CLI reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ModeMismatch(_) => "MODE_MISMATCH",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::UnsupportedInSymbolicMode(_) => "UNSUPPORTED_IN_SYMBOLIC_MODE",
            Error::ReducibleFieldSpec(_) => "REDUCIBLE_FIELD_SPEC",
            Error::InvalidFieldSpec(_) => "INVALID_FIELD_SPEC",
            Error::OddDimension(_) => "ODD_DIMENSION",
            Error::InvalidIndexTuple(_) => "INVALID_INDEX_TUPLE",
            Error::NotSkew(_) => "NOT_SKEW",
            Error::NotUnimodular(_) => "NOT_UNIMODULAR",
            Error::NotSkewIntegral => "NOT_SKEW_INTEGRAL",
            Error::BadP { .. } => "BAD_P",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::InvariantViolation(_) => "INVARIANT_VIOLATION",
            Error::ActionUndefined => "ACTION_UNDEFINED",
            Error::NotBlockDiagonal(_) => "NOT_BLOCK_DIAGONAL",
            Error::NotSymplectic => "NOT_SYMPLECTIC",
            Error::InfiniteOrder(_) => "INFINITE_ORDER",
            Error::LabelMismatch(_) => "LABEL_MISMATCH",
            Error::ZeroScale => "ZERO_SCALE",
            Error::MixedKinds(_) => "MIXED_KINDS",
            Error::NotQuadratic(_) => "NOT_QUADRATIC",
            Error::SingularBlock => "SINGULAR_BLOCK",
            Error::OutOfGrid(_) => "OUT_OF_GRID",
            Error::UnsupportedW1(_) => "UNSUPPORTED_W1",
            Error::InvalidGrid(_) => "INVALID_GRID",
            Error::Parse(_) => "PARSE_ERROR",
            Error::Schema(_) => "SCHEMA_ERROR",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
