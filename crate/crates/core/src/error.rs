use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not one (got {0})")]
    TraceNotOne(f64),

    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("bipartite dimensions are required")]
    MissingDims,

    #[error("matrix is singular")]
    Singular,

    #[error("measurement is incomplete (max deviation from identity {0:e})")]
    IncompleteMeasurement(f64),

    #[error("outcome {label} has probability {probability:e}")]
    ZeroProbabilityOutcome { label: String, probability: f64 },

    #[error("unknown outcome label {0}")]
    UnknownOutcome(String),

    #[error("posterior states need Kraus operators; a POVM only yields statistics")]
    PosteriorFromPovm,

    #[error("vector is not majorized (first violation at index {0})")]
    NotMajorized(usize),

    #[error("matrix is not doubly stochastic: {0}")]
    NotDoublyStochastic(String),

    #[error("density operator is singular on the requested support")]
    SingularDensity,

    #[error("states are not orthogonal (overlap magnitude {0:e})")]
    NotOrthogonal(f64),

    #[error("states are linearly dependent (Gram determinant {0:e})")]
    LinearlyDependent(f64),

    #[error("separation matrix is infeasible (min eigenvalue {0:e})")]
    InfeasibleK(f64),

    #[error("target is unreachable: q1 = {q1} is below p1 = {p1}")]
    InfeasibleTarget { p1: f64, q1: f64 },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("both states are product states; the bound is vacuous")]
    DegenerateProduct,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
