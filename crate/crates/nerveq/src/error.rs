use thiserror::Error;

/// Source location inside a DSL input, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub len: usize,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("truncation mismatch: {0}")]
    TruncationMismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("axiom `{axiom}` fails: {detail}")]
    AxiomFailure { axiom: String, detail: String },
    #[error("associator equations have no solution at degree {0}")]
    Unsolvable(usize),
    #[error("parse error at {span}: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("type error at {span}: {msg}")]
    Type { span: Span, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
