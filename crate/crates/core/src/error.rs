use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Variants are coarse on purpose: the command-line front end maps them onto
/// a small exit-code taxonomy (see [`Error::kind`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime must be a prime number >= 5, got {0}")]
    InvalidPrime(u64),
    #[error("precision must be at least 1")]
    InvalidPrecision,
    #[error("{0} is not p-integral")]
    NotPIntegral(String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("element has positive valuation and cannot be inverted")]
    NotAUnit,
    #[error("argument lies outside the convergence domain: {0}")]
    OutOfConvergenceDomain(String),
    #[error("series is indistinguishable from zero at the carried precision")]
    IndistinguishableFromZero,
    #[error("truncated tail could attain the Gauss norm (tail floor {tail_floor} <= valuation {valuation})")]
    TailAmbiguous { tail_floor: u32, valuation: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("residue point is not fixed by the reduced map iterate (period {0})")]
    NotPeriodicResidue(u64),
    #[error("Mahler expansion is not certified; refusing to convert it to a power series")]
    UncertifiedExpansion,
    #[error("series coefficient of degree {0} is not p-integral")]
    NonIntegralSeries(usize),
    #[error("observable is indeterminate at index {0}")]
    IndeterminatePoint(u64),
    #[error("no return-rate witness below the horizon")]
    HorizonTooSmall,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Failure classes used for exit codes and machine-readable error payloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Precision,
    Resource,
    Other,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. }
            | Error::UnknownVariable(_)
            | Error::InvalidPrime(_)
            | Error::InvalidPrecision
            | Error::DimensionMismatch(_)
            | Error::InvalidInput(_)
            | Error::NotPIntegral(_) => ErrorKind::Input,
            Error::PrecisionExhausted(_)
            | Error::IndistinguishableFromZero
            | Error::TailAmbiguous { .. } => ErrorKind::Precision,
            Error::ResourceLimit(_) => ErrorKind::Resource,
            _ => ErrorKind::Other,
        }
    }

    /// Stable snake-case name for JSON error payloads.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "invalid_prime",
            Error::InvalidPrecision => "invalid_precision",
            Error::NotPIntegral(_) => "not_p_integral",
            Error::PrimeMismatch(..) => "prime_mismatch",
            Error::NotAUnit => "not_a_unit",
            Error::OutOfConvergenceDomain(_) => "out_of_convergence_domain",
            Error::IndistinguishableFromZero => "indistinguishable_from_zero",
            Error::TailAmbiguous { .. } => "tail_ambiguous",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::Syntax { .. } => "syntax_error",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::ResourceLimit(_) => "resource_limit",
            Error::NotPeriodicResidue(_) => "not_periodic_residue",
            Error::UncertifiedExpansion => "uncertified_expansion",
            Error::NonIntegralSeries(_) => "non_integral_series",
            Error::IndeterminatePoint(_) => "indeterminate_point",
            Error::HorizonTooSmall => "horizon_too_small",
            Error::InsufficientData(_) => "insufficient_data",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
