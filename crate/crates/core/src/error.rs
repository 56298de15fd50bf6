use thiserror::Error;

/// Errors raised by the matrix, geometry and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix order {n} is too small (need at least {min})")]
    DegenerateOrder { n: usize, min: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("hypomorphism search on order {n} exceeds the search cap {cap}")]
    SearchTooLarge { n: usize, cap: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("matrix is not positive semidefinite (lowest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (lowest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("presentation is not in good position: {0}")]
    BadPosition(String),

    #[error("cone is not simplicial: {generators} generators span dimension {rank}")]
    NonSimplicialCone { generators: usize, rank: usize },

    #[error("cones are not nested: generator {generator} of the inner cone lies outside the outer cone")]
    NotNested { generator: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("matrices are not hypomorphic under the given permutations (index {index:?}, residual {residual:e})")]
    NotHypomorphic { index: Option<usize>, residual: f64 },

    #[error("lambda {lambda} is below the certified lambda0 {lambda0}")]
    LambdaTooSmall { lambda: f64, lambda0: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateOrder { .. } => "DegenerateOrder",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::SearchTooLarge { .. } => "SearchTooLarge",
            Error::Parse { .. } => "ParseError",
            Error::NotPositiveSemidefinite { .. } => "NotPositiveSemidefinite",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::BadPosition(_) => "BadPosition",
            Error::NonSimplicialCone { .. } => "NonSimplicialCone",
            Error::NotNested { .. } => "NotNested",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NotHypomorphic { .. } => "NotHypomorphic",
            Error::LambdaTooSmall { .. } => "LambdaTooSmall",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
