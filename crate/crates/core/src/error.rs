use thiserror::Error;

/// Errors surfaced by constructors and checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pmf sums to {sum}, outside the renormalization window around 1")]
    NonNormalizable { sum: f64 },

    #[error("negative probability {value} for pattern {pattern:?}")]
    NegativeProbability { pattern: String, value: f64 },

    #[error("inconsistent dimension: {0}")]
    InconsistentDimension(String),

    #[error("empty coordinate set")]
    EmptyCoordinateSet,

    #[error("coordinate index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("{operation}: dimension {n} exceeds the supported limit {limit}")]
    DimensionTooLarge {
        operation: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("negative coefficient {value} on subset {mask:#b}")]
    NegativeCoefficient { mask: u32, value: f64 },

    #[error("covariance matrix asymmetric at ({i},{j}): difference {delta}")]
    AsymmetricCov { i: usize, j: usize, delta: f64 },

    #[error("matrix not positive semidefinite: smallest eigenvalue {min_eigenvalue}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("factorization failed: {0}")]
    FactorizationFailure(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("no closed form available: {0}")]
    ClosedFormUnavailable(String),

    #[error("precision {precision} unreachable under the sample cap of {cap} draws")]
    PrecisionUnreachable { precision: f64, cap: u64 },

    #[error("singular block covariance: {0}")]
    SingularBlock(String),

    #[error("covariance sequence not nested: {0}")]
    InconsistentNesting(String),

    #[error("positive off-diagonal covariance {value} at ({i},{j})")]
    PositiveOffDiagonal { i: usize, j: usize, value: f64 },

    #[error("matrix not Toeplitz at ({i},{j})")]
    NotToeplitz { i: usize, j: usize },

    #[error("overlapping index ranges: {0}")]
    OverlappingRanges(String),

    #[error("laws have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("search budget exhausted after {evaluations} evaluations")]
    BudgetExhausted { evaluations: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
