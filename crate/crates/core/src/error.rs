use thiserror::Error;

/// Errors raised by the library. Parse failures carry the byte offset of the
/// offending character.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator `{name}` at position {position}")]
    UnknownGenerator { name: String, position: usize },
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("illegal torus mark `{label}`: {reason}")]
    IllegalMark { label: String, reason: String },
    #[error("fundamental group effect not expressible: {0}")]
    NotExpressible(String),
    #[error("unknown or unsupported group family: {0}")]
    UnknownFamily(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unregistered sequence family `{0}`")]
    UnregisteredSequence(String),
    #[error("empty witness set")]
    EmptyWitnessSet,
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
