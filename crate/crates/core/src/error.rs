use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("symbol {symbol} used with arity {found}, expected {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("variable {0} is bound inside the scope of another binder for it")]
    Rebinding(String),
    #[error("sort error: {0}")]
    Sort(String),
    #[error("not a term: {0}")]
    NotATerm(String),
    #[error("not an ε-term: {0}")]
    NotEpsTerm(String),
}

/// A parse failure with its 1-based source position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("formula contains quantifiers: {0}")]
    Quantified(String),
    #[error("proof does not check: {0}")]
    Invalid(String),
    #[error("eigenvariable {0} occurs in the discharged hypothesis")]
    EigenvariableInHypothesis(String),
    #[error("calculus mismatch: {0}")]
    Calculus(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EliminationError {
    #[error("nothing to eliminate: the proof has no critical formulas")]
    NothingToEliminate,
    #[error("ε-term {0} is not a critical term of maximal rank and degree")]
    NotMaximal(String),
    #[error("ε-term {0} occurs in the matrix")]
    InMatrix(String),
    #[error("matrix {matrix} does not match end formula {end}")]
    MatrixMismatch { matrix: String, end: String },
    #[error("final disjunction is not a tautology (internal error)")]
    NotTautology,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HerbrandError {
    #[error("formula is not prenex: {0}")]
    NotPrenex(String),
    #[error("certificate disjunction is not a tautology")]
    NotTautology,
    #[error("replaced disjunction is not a tautology")]
    ReplacedNotTautology,
    #[error("eigenvariable condition violated: {0}")]
    Eigenvariable(String),
    #[error("certificate does not fit the goal: {0}")]
    Shape(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Elimination(#[from] EliminationError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LowerBoundError {
    #[error("depth bound {depth} is below the largest required numeral {needed}")]
    DepthTooSmall { needed: u64, depth: u64 },
    #[error("numeral {0} exceeds the depth bound {1}")]
    DepthExceeded(u64, u64),
    #[error("k = {0} is beyond the supported range")]
    TooLarge(usize),
    #[error("canonical witness sequent is not valid (internal error)")]
    WitnessInvalid,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
