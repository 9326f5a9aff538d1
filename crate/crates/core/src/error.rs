use core::fmt;

/// Errors reported by the sorting entry points and helper operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A [`SortConfig`](crate::SortConfig) field is out of range.
    InvalidConfig(&'static str),
    /// The task is small enough to be a base case; no bucket count applies.
    TaskTooSmall { size: usize, limit: usize },
    /// Splitter selection was handed an empty sample.
    EmptySample,
    /// An operation that needs at least one element got none.
    EmptyRange,
    /// Radix sorting was requested for a model without a radix key.
    MissingRadixKey,
    /// More threads were requested than the scheduler can run.
    Threads(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(what) => write!(f, "invalid sort configuration: {what}"),
            Error::TaskTooSmall { size, limit } => {
                write!(f, "task of {size} elements is a base case (limit {limit})")
            }
            Error::EmptySample => f.write_str("cannot select splitters from an empty sample"),
            Error::EmptyRange => f.write_str("operation requires a non-empty range"),
            Error::MissingRadixKey => f.write_str("element model has no radix key"),
            Error::Threads(t) => write!(f, "unsupported thread count {t}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
