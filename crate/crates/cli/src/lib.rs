//! Command-line driver for `upslope-core`: a JSON wire format, the shipped fixture corpus and
//! a scenario runner producing deterministic reports.

use std::fmt;

pub mod app;
pub mod corpus;
pub mod literal;
pub mod scenario;
pub mod wire;

/// Anything wrong with the input rather than with the mathematics; exit code 2.
#[derive(Debug)]
pub enum InputError {
    Core(upslope_core::Error),
    Literal(literal::ParseError),
    Json(serde_json::Error),
    Io(std::io::Error),
    Usage(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Core(e) => e.fmt(f),
            InputError::Literal(e) => e.fmt(f),
            InputError::Json(e) => write!(f, "invalid JSON: {e}"),
            InputError::Io(e) => e.fmt(f),
            InputError::Usage(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for InputError {}

impl From<upslope_core::Error> for InputError {
    fn from(e: upslope_core::Error) -> Self {
        InputError::Core(e)
    }
}

impl From<literal::ParseError> for InputError {
    fn from(e: literal::ParseError) -> Self {
        InputError::Literal(e)
    }
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError::Json(e)
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        InputError::Io(e)
    }
}
