//! Proof transformations for Hilbert's ε-calculus: proof checking, the
//! ε-embedding of predicate-calculus proofs, elimination of critical formulas
//! with Herbrand-disjunction extraction, reconstruction of quantified proofs,
//! and a certified lower-bound family.

pub mod document;
pub mod elimination;
pub mod embedding;
pub mod error;
pub mod herbrand;
pub mod kernel;
pub mod lowerbound;
pub mod parser;
pub mod print;
pub mod syntax;

pub use error::{
    EliminationError, HerbrandError, KernelError, LowerBoundError, ParseError, SyntaxError,
};
pub use syntax::{Expr, Name};
