use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("degenerate simplex: {0}")]
    Degenerate(String),
    #[error("cochain is not a cocycle")]
    NotACocycle,
    #[error("coefficient ring mismatch: {0}")]
    RingMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn guard(msg: impl Into<String>) -> Self {
        Error::GuardExceeded(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GuardExceeded(_) => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
