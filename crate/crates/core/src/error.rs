use std::fmt;

use thiserror::Error;

/// A located syntax error in one of the textual formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(ParseError),

    #[error("invalid sketch `{sketch}`: {details}")]
    InvalidSketch { sketch: String, details: String },

    #[error("invalid specification `{spec}`: {details}")]
    InvalidSpec { spec: String, details: String },

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("specifications are over different sketches (`{0}` vs `{1}`)")]
    SketchMismatch(String, String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("truncated: {0}")]
    Truncated(String),

    #[error("pushout failed: {0}")]
    Pushout(String),

    #[error("step {step} (`{rule}`): no match")]
    NoMatch { step: usize, rule: String },

    #[error("translation failed: {0}")]
    Translation(String),

    #[error("functor is not functorial: {0}")]
    NotFunctorial(String),

    #[error("type error: {0}")]
    Type(String),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
