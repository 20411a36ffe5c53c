use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid scalar `{0}`")]
    Scalar(String),
    #[error("invalid catalog key `{0}`")]
    CatalogKey(String),
    #[error("invalid symbol: {0}")]
    Symbol(String),
    #[error("line {line}: {msg}")]
    SystemFile { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("systems have different numbers of subspaces ({0} vs {1})")]
    ArityMismatch(usize, usize),
    #[error("operation needs a system of four subspaces, got {0}")]
    NotFourSubspaces(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("operation is only available on the exact backend")]
    ExactOnly,
    #[error("polynomial degree {0} exceeds the factoring bound {1}")]
    DegreeBound(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("symbol determinant vanishes identically")]
    DegenerateSymbol,
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("result could not be certified: {0}")]
    Uncertified(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
