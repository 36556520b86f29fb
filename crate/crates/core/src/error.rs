use alloc::string::String;
use core::fmt;

use crate::exact::Natural;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// Two computations that must agree did not. Always a bug in a formula
    /// transcription or in the arithmetic underneath it.
    Consistency(String),
    /// The oracle would need more loop iterations than it is allowed.
    BudgetExceeded { work: Natural, budget: Natural },
    /// Euler-Maclaurin correction terms stop shrinking before the requested
    /// order at this `n`.
    TermsNotDecreasing { n: Natural, p: u32, failed_at: u32 },
    /// The residual to be measured sits below the arithmetic error floor.
    PrecisionInsufficient { have_bits: u32, required_bits: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Consistency(msg) => write!(f, "consistency failure: {msg}"),
            Error::BudgetExceeded { work, budget } => write!(
                f,
                "oracle budget exceeded: {work} iterations requested, budget is {budget}"
            ),
            Error::TermsNotDecreasing { n, p, failed_at } => write!(
                f,
                "n = {n} is too small for p = {p}: correction term {failed_at} is not smaller than its predecessor"
            ),
            Error::PrecisionInsufficient {
                have_bits,
                required_bits,
            } => write!(
                f,
                "precision of {have_bits} bits cannot resolve the residual; at least {required_bits} bits are required"
            ),
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn inconsistent(msg: impl Into<String>) -> Error {
    Error::Consistency(msg.into())
}
