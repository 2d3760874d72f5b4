use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input exceeds a configured oracle or enumeration cap.
    #[error("refused: {what} is {size}, cap is {cap}")]
    Refusal {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Nothing found where the caller asked for a result (grid exhausted, retries spent).
    #[error("not found: {0}")]
    NotFound(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn refuse(what: &'static str, size: usize, cap: usize) -> Result<()> {
        if size > cap {
            Err(Error::Refusal { what, size, cap })
        } else {
            Ok(())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
