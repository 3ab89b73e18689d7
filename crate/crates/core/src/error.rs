use alloc::string::String;
use core::fmt;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Context parameters rejected (p = 2, composite p, precision too large, ...).
    InvalidContext(String),
    /// Two operands live in different contexts.
    ContextMismatch,
    /// An argument violated a documented precondition.
    Precondition(String),
    /// Attempt to invert a non-unit.
    NotUnit,
    /// Exact division requested but the dividend is not divisible.
    NotDivisible,
    /// A series was asked to converge outside its margin.
    Convergence(String),
    /// Working precision ran out before a result could be certified.
    PrecisionExhausted(String),
    /// A search that must succeed found nothing.
    SearchFailed(String),
    /// Dimensions of matrices or vectors do not fit together.
    Dimension(String),
    /// An iteration did not stabilise within its proven bound.
    NoConvergence(String),
    /// Truncations at different sizes disagree.
    Unstable(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidContext(s) => write!(f, "invalid context: {s}"),
            Error::ContextMismatch => f.write_str("operands belong to different contexts"),
            Error::Precondition(s) => write!(f, "precondition violated: {s}"),
            Error::NotUnit => f.write_str("element is not a unit"),
            Error::NotDivisible => f.write_str("exact division impossible"),
            Error::Convergence(s) => write!(f, "series does not converge: {s}"),
            Error::PrecisionExhausted(s) => write!(f, "precision exhausted: {s}"),
            Error::SearchFailed(s) => write!(f, "search failed: {s}"),
            Error::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            Error::NoConvergence(s) => write!(f, "no convergence: {s}"),
            Error::Unstable(s) => write!(f, "truncation unstable: {s}"),
        }
    }
}

impl core::error::Error for Error {}
