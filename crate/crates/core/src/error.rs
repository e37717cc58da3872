use thiserror::Error;

/// Every failure mode the library reports.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(String),
    #[error("Barnes G vanishes at {0}; its logarithm is undefined")]
    Zero(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("point {0} coincides with a singularity of the symbol")]
    SingularPoint(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("extended precision result could not be certified: {0}")]
    Precision(String),
    #[error("symbol is not even: {0}")]
    Symmetry(String),
    #[error("leading Toeplitz minor vanishes: {0}")]
    SingularMinor(String),
    #[error("degenerate symbol: {0}")]
    Degenerate(String),
    #[error("beta seminorm {0} is not below 1")]
    Seminorm(f64),
    #[error("asymptotic series did not reach the requested accuracy: {0}")]
    Divergence(String),
    #[error("integration approached a pole: {0}")]
    PoleProximity(String),
    #[error("instability detected: {0}")]
    Instability(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    #[error("size out of range: {0}")]
    Size(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The error's type name, e.g. `SeminormError`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "PoleError",
            Error::Zero(_) => "ZeroError",
            Error::Parameter(_) => "ParameterError",
            Error::SingularPoint(_) => "SingularPointError",
            Error::Quadrature(_) => "QuadratureError",
            Error::Precision(_) => "PrecisionError",
            Error::Symmetry(_) => "SymmetryError",
            Error::SingularMinor(_) => "SingularMinorError",
            Error::Degenerate(_) => "DegenerateError",
            Error::Seminorm(_) => "SeminormError",
            Error::Divergence(_) => "DivergenceError",
            Error::PoleProximity(_) => "PoleProximityError",
            Error::Instability(_) => "InstabilityError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Domain(_) => "DomainError",
            Error::InvalidPermutation(_) => "InvalidPermutationError",
            Error::Size(_) => "SizeError",
        }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Domain(_) | Error::Size(_) | Error::InvalidPermutation(_) | Error::Symmetry(_)
        )
    }
}
