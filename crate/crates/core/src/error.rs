use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class; the CLI prints it on standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Mismatch,
    Capacity,
    Decode,
    Invalid,
    Undefined,
    Io,
}

impl std::fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorCategory::Mismatch => "mismatch",
            ErrorCategory::Capacity => "capacity",
            ErrorCategory::Decode => "decode",
            ErrorCategory::Invalid => "invalid",
            ErrorCategory::Undefined => "undefined",
            ErrorCategory::Io => "io",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input space mismatch: {left} bits vs {right} bits")]
    SpaceMismatch { left: u32, right: u32 },
    #[error("{what} supports at most {max} input bits, got {got}")]
    Capacity { what: &'static str, max: u32, got: u32 },
    #[error("decode error at offset {offset}: {reason}")]
    Decode { offset: usize, reason: String },
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    #[error("undefined {0}")]
    Undefined(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { what, reason: reason.into() }
    }

    pub(crate) fn decode(offset: usize, reason: impl Into<String>) -> Self {
        Error::Decode { offset, reason: reason.into() }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::SpaceMismatch { .. } => ErrorCategory::Mismatch,
            Error::Capacity { .. } => ErrorCategory::Capacity,
            Error::Decode { .. } => ErrorCategory::Decode,
            Error::Invalid { .. } => ErrorCategory::Invalid,
            Error::Undefined(_) => ErrorCategory::Undefined,
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}
