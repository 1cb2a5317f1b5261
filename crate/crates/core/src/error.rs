use thiserror::Error;

/// Well-sortedness failures against a signature.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` has arity 0; use a constant")]
    ZeroArity(String),
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("signature mismatch: `{0}` vs `{1}`")]
    SignatureMismatch(String, String),
}

/// The distinct categories reported by the text front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: positivity violation: {message}")]
    Positivity { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, column: usize, symbol: String },
    #[error("{line}:{column}: arity mismatch for `{symbol}`: expected {expected}, found {found}")]
    Arity { line: usize, column: usize, symbol: String, expected: usize, found: usize },
    #[error("{line}:{column}: {message}")]
    Semantic { line: usize, column: usize, message: String },
}

impl ParseError {
    pub fn category(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "syntax",
            ParseError::Positivity { .. } => "positivity",
            ParseError::UnknownSymbol { .. } => "unknown-symbol",
            ParseError::Arity { .. } => "arity",
            ParseError::Semantic { .. } => "semantic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("function `{symbol}` is not total: no value at ({args})")]
    NotTotal { symbol: String, args: String },
    #[error("function `{symbol}` given two values at ({args})")]
    Conflict { symbol: String, args: String },
    #[error("constant `{0}` has no value")]
    MissingConstant(String),
    #[error(transparent)]
    Sort(#[from] SortError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable `{0}` has no value")]
    Unbound(String),
    #[error("element index {0} outside the universe")]
    OutOfRange(usize),
    #[error(transparent)]
    Sort(#[from] SortError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("domain and codomain have different signatures")]
    SignatureMismatch,
    #[error("map has {found} entries, domain has {expected} elements")]
    NotTotal { expected: usize, found: usize },
    #[error("map sends an element to {0}, outside the codomain")]
    OutOfRange(usize),
    #[error("structures with more than 64 elements are not supported by the search")]
    TooLarge,
    #[error("morphism literal: {0}")]
    Literal(String),
}

/// Errors from the bounded semantic engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("structure `{structure}` is not a model of `{theory}`: axiom `{axiom}` fails")]
    NotAModel { structure: String, theory: String, axiom: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sort(#[from] SortError),
}
