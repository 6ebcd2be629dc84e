use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates a precondition (symbol out of range, bad length, bad parameter).
    #[error("domain error: {0}")]
    Domain(String),
    /// An absorption pattern breaks the spacing or weight rules.
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    /// Two words over different alphabets were combined.
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(u32, u32),
    /// The received word is not consistent with any codeword.
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    /// A configured enumeration cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// A guarantee that should hold by construction did not.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn decode_failure<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DecodeFailure(msg.into()))
}
