//! Hilbert-style proofs in EC, EC_ε, PC and PC_ε: checking, metrics,
//! propositional validity and the basic proof transformations.

mod check;
mod derive;
mod metrics;
mod proof;
pub mod taut;
mod transform;

pub use check::{check, CheckReport, Violation};
pub use derive::{Deriver, Sequent};
pub use metrics::{critical_terms, metrics, metrics_with, CriticalTerm, Metrics};
pub use proof::{
    critical_term, critical_witness, is_critical_for, is_exists_axiom, is_forall_axiom,
    match_instance, Calculus, Justification, Proof, Step,
};
pub use taut::{is_tautology, is_valid, tautology_witness, Assignment};
pub use transform::{
    case_combine, compile_witness, dedup, deduction, negated_conjunction, weaken,
};
