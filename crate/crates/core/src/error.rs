use thiserror::Error;

use crate::arith::ArithError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VopaError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("nonlinear in unknowns")]
    Nonlinear,
    #[error("nonlinear stage; reorder constraint stages")]
    NonlinearStage,
    #[error("{0}")]
    Presentation(String),
    #[error("word {0} is not in the basis")]
    UnsupportedWord(String),
    #[error("not a Virasoro field: {0}")]
    Shape(String),
    #[error("no nontrivial commutant representative")]
    NoCommutant,
    #[error("gate failed: {0}")]
    Gate(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{0}")]
    Io(String),
}
