use thiserror::Error;

/// Errors raised by tree construction, rule loading, parsing and the
/// character machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown edge type `{0}`")]
    UnknownType(String),
    #[error("decoration {got:?} has {} entries, expected {expected}", got.len())]
    Arity { got: Vec<u32>, expected: usize },
    #[error("invalid rule table: {0}")]
    Rule(String),
    #[error("tree does not conform to the rule: {0}")]
    NonConforming(String),
    #[error("character has no value for generator `{0}`")]
    MissingGenerator(String),
    #[error("expected a forest with a distinguished root")]
    MissingRoot,
    #[error("recursion depth exceeded while evaluating {0}")]
    Depth(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
