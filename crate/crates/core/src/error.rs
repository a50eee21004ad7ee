use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring parameter d = {d}: {reason}")]
    InvalidRing { d: i64, reason: String },
    #[error("operands belong to different rings (d = {0} and d = {1})")]
    MixedRings(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("moduli are not pairwise coprime")]
    ModuliNotCoprime,
    #[error("modulus must be positive")]
    InvalidModulus,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{0} has a composite cofactor beyond trial-division range")]
    FactorizationTooHard(String),
    #[error("{0} is a perfect square")]
    SquareInput(String),
    #[error("operation needs a real quadratic ring, got d = {0}")]
    NotRealQuadratic(i64),
    #[error("norm equation with right-hand side 0")]
    ZeroNorm,
    #[error("both elements are zero")]
    BothZero,
    #[error("weak chain requested with zero second element")]
    ZeroDivisorChain,
    #[error("invalid weak chain: {0}")]
    InvalidChain(String),
    #[error("replay does not terminate: final remainder is {0}")]
    NonTerminatingReplay(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("zero input")]
    ZeroInput,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("weak-chain search exhausted for ({x}, {y}) at budget {budget}")]
    SearchExhausted { x: String, y: String, budget: usize },
    #[error("matrix is not singular")]
    NotSingular,
    #[error("matrix is not of Hermitian shape")]
    NotHermitianShape,
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("ring d = {0} does not have idempotent factorizations for all singular matrices")]
    NotId2Imaginary(i64),
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
