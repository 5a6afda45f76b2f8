use thiserror::Error;

/// Failure classes shared by every module.
///
/// `Precision` means the tracked precision cannot certify the requested
/// statement; `Domain` means an input violates a mathematical precondition;
/// `Internal` means an invariant that the theory guarantees was observed to
/// fail and signals a bug or inconsistent input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision failure in {origin}: {msg}")]
    Precision { origin: &'static str, msg: String },
    #[error("domain error in {origin}: {msg}")]
    Domain { origin: &'static str, msg: String },
    #[error("internal error in {origin}: {msg}")]
    Internal { origin: &'static str, msg: String },
}

impl Error {
    pub fn precision(origin: &'static str, msg: impl Into<String>) -> Self {
        Error::Precision { origin, msg: msg.into() }
    }
    pub fn domain(origin: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { origin, msg: msg.into() }
    }
    pub fn internal(origin: &'static str, msg: impl Into<String>) -> Self {
        Error::Internal { origin, msg: msg.into() }
    }
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
