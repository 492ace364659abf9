use std::fmt;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A weight vector failed validation (negative, non-finite, or sum above
    /// the simplex cap).
    InvalidWeights(String),
    /// Every weight is zero and no augmentation atoms were supplied, so there
    /// is no distribution to build.
    DegenerateDistribution,
    /// An argument lies outside the documented domain of the operation.
    Domain(String),
    /// The requested derivative order does not exist at x = 0: the density of
    /// a sum with total multiplicity m is only (m-2) times differentiable
    /// there (the order-(m-1) derivative jumps).
    DiscontinuousDerivative { order: u32, total_multiplicity: u32 },
    /// The distribution has total multiplicity 1 (a single exponential), whose
    /// density is maximal at the left endpoint rather than an interior mode.
    NoInteriorMode,
    /// A quadrature tail bound or bracketing step could not reach the
    /// requested accuracy.
    Accuracy(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidWeights(msg) => write!(f, "invalid weights: {msg}"),
            Error::DegenerateDistribution => {
                write!(f, "all weights are zero; the sum has no distribution")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DiscontinuousDerivative { order, total_multiplicity } => write!(
                f,
                "derivative of order {order} is discontinuous at 0 for total multiplicity {total_multiplicity}"
            ),
            Error::NoInteriorMode => {
                write!(f, "a single exponential has no interior mode")
            }
            Error::Accuracy(msg) => write!(f, "accuracy failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
