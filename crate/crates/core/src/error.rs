use thiserror::Error;

/// Errors raised by the engine. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("budget exceeded: {what} needs {needed} but `{flag}` allows {limit}")]
    Budget {
        what: String,
        flag: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("region too small: {0}; expand the materialized region")]
    Region(String),

    #[error("orientation error: {0}")]
    Orientation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not tame: {0}")]
    NotTame(String),

    #[error("strong tameness violated: {0}; apply one more barycentric subdivision")]
    FaceFixedPoint(String),

    #[error("numerical ambiguity: {0}")]
    Ambiguous(String),

    #[error("internal invariant breached: {0}")]
    Invariant(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } | Error::Region(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }

    /// Short machine-readable tag, also used across the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Budget { .. } => "budget",
            Error::Region(_) => "region",
            Error::Orientation(_) => "orientation",
            Error::Unsupported(_) => "unsupported",
            Error::NotTame(_) => "not-tame",
            Error::FaceFixedPoint(_) => "face-fixed-point",
            Error::Ambiguous(_) => "ambiguous",
            Error::Invariant(_) => "invariant",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(format!("malformed JSON: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
