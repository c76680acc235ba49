use thiserror::Error;

/// Errors raised by the library. Verification *failures* are not errors;
/// they are recorded as outcomes inside a [`crate::VerificationReport`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero is infinite")]
    InfiniteValuation,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("factorial of negative argument {0}")]
    NegativeFactorial(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weight {0} must be even and at least 12")]
    InvalidWeight(i64),
    #[error("series inversion needs a nonzero leading coefficient within precision")]
    NonInvertibleSeries,
    #[error("series is not a polynomial in f of degree <= {maxdeg}: residual at q^{index}")]
    NotAnFPolynomial { maxdeg: usize, index: usize },
    #[error("expected an integer, got {0}")]
    NonIntegral(String),
    #[error("point set has no origin (0, 0)")]
    MissingOrigin,
    #[error("duplicate index {0} in point set")]
    DuplicateIndex(usize),
    #[error("polygon extent {extent} is smaller than requested {requested}")]
    InsufficientExtent { extent: usize, requested: usize },
    #[error("pole at j = {0}: factor -k-12j vanishes")]
    Pole(u64),
    #[error("index ({0}, {1}) is outside the support band i <= 2j, j <= 2i")]
    OutOfSupport(u64, u64),
    #[error("slopes did not stabilise below truncation cap {0}")]
    NoStabilization(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
