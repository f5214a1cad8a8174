//! Elimination of critical formulas and extraction of Herbrand disjunctions.

mod engine;
mod expansion;
mod hyperexp;

pub use engine::{compress, Engine, EliminationTrace, HerbrandDisjunction, RoundRecord};
pub use expansion::{match_row, Expansion};
pub use hyperexp::{hyperexp, hyperexp_with, HyperExp, DEFAULT_MAX_BITS};
