use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument is out of its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// NaN or infinity where only finite values are admitted.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Shapes or identities of cooperating objects do not line up.
    #[error("structure mismatch: {0}")]
    Structure(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
