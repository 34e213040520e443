use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be parsed. Line numbers are 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tag {tag:?} is not a {expected} tag")]
    WrongTag { tag: String, expected: &'static str },

    #[error("invalid token: {0}")]
    InvalidToken(String),

    #[error("invalid extraction config: {0}")]
    Config(String),

    #[error("count overflow while combining matrices")]
    Overflow,

    #[error("count matrix is empty")]
    EmptyMatrix,

    #[error("category {0:?} is missing from the standard rates")]
    MissingCategory(String),

    #[error("invalid population table: {0}")]
    Population(String),

    #[error("total exposure is zero")]
    ZeroExposure,

    #[error("expected events are zero")]
    ZeroExpected,

    #[error("conflicting stem verbs: {}", .0.join("; "))]
    LexiconConflict(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Line number for parse errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}
