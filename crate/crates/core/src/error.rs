//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by the Gaussian algebra, coordinate and reduction layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A packet width with non-positive real part cannot be normalized.
    NonNormalizable { re_width: f64 },
    /// The state has (numerically) zero norm and cannot be rescaled.
    DegenerateState,
    /// Vector or matrix dimensions do not match.
    DimensionMismatch { expected: usize, found: usize },
    /// A coordinate matrix is singular (or numerically so).
    SingularMatrix,
    /// A contract precondition was violated.
    Contract(&'static str),
    /// The requested operation is not supported for this input shape.
    Unsupported(&'static str),
    /// A grid is too coarse to resolve the requested structure.
    Resolution(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonNormalizable { re_width } => {
                write!(f, "non-normalizable packet: Re(width_param) = {re_width} <= 0")
            }
            Error::DegenerateState => write!(f, "state has zero norm"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::SingularMatrix => write!(f, "singular coordinate matrix"),
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported case: {msg}"),
            Error::Resolution(msg) => write!(f, "resolution error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
