use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An operation was queried outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Newton-polygon prefix could not be certified final within the
    /// enumeration cap. Never a silent wrong answer.
    #[error("uncertified truncation: {0}")]
    UncertifiedTruncation(String),

    /// A dimension table is missing an entry the recursion needs.
    #[error("missing dimension: {0}")]
    MissingDimension(String),

    /// An internal invariant of the recursive algorithm failed; the message
    /// names the (s_eps, k) path.
    #[error("internal invariant violation: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
