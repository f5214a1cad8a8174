//! The ε-translation of quantified formulas and the embedding of
//! predicate-calculus proofs into the ε-calculus.
//!
//! `∃x A(x)` becomes `A(ε_x A(x))` and `∀x A(x)` becomes `A(ε_x ¬A(x))`,
//! applied bottom-up (bodies are translated first, so inner quantifiers turn
//! into ε-terms that may mention outer bound variables).

use crate::error::KernelError;
use crate::kernel::{check, Calculus, Justification, Proof};
use crate::syntax::{instantiate, substitute_unchecked, Expr, Name};

/// Record of one translation: every quantified subformula with its image,
/// and the ε-terms introduced, in creation order.
#[derive(Clone, Debug, Default)]
pub struct TranslationTrace {
    pub pairs: Vec<(Expr, Expr)>,
    pub eps_terms: Vec<Expr>,
}

/// The quantifier-free ε-translation of `f`.
pub fn eps_translate(f: &Expr) -> Expr {
    go(f, &mut None)
}

/// [`eps_translate`] together with its trace.
pub fn eps_translate_traced(f: &Expr) -> (Expr, TranslationTrace) {
    let mut tr = Some(TranslationTrace::default());
    let out = go(f, &mut tr);
    (out, tr.unwrap_or_default())
}

fn go(e: &Expr, tr: &mut Option<TranslationTrace>) -> Expr {
    if !e.has_quantifier() {
        return e.clone();
    }
    match e {
        Expr::Exists(x, b) | Expr::Forall(x, b) => {
            let body = go(b, tr);
            let matrix = if matches!(e, Expr::Exists(..)) {
                body.clone()
            } else {
                Expr::not(body.clone())
            };
            let eps = Expr::eps(x, matrix);
            let out = instantiate(&body, x, &eps);
            if let Some(t) = tr {
                t.eps_terms.push(eps);
                t.pairs.push((e.clone(), out.clone()));
            }
            out
        }
        _ => e.map_children(|c| go(c, tr)),
    }
}

/// Translates a proof of the predicate calculus (with or without ε) into a
/// proof of the ε-calculus of the translated end formula.
///
/// Existential axioms become critical formulas; universal axioms become the
/// contrapositive of a critical formula (two extra steps); each
/// generalization is removed by substituting an ε-term for its eigenvariable
/// throughout the steps emitted so far.
pub fn embed_proof(p: &Proof) -> Result<Proof, KernelError> {
    check(p).into_result()?;
    let mut out = Proof::new(Calculus::EcEps);
    out.hypotheses = p.hypotheses.clone();
    let mut map: Vec<usize> = Vec::with_capacity(p.size());
    for s in &p.steps {
        let f = eps_translate(&s.formula);
        let k = match &s.just {
            Justification::Tautology | Justification::Hypothesis(_) => out.push(f, s.just.clone()),
            Justification::Critical(e) => out.push(f, Justification::Critical(eps_translate(e))),
            Justification::ExistsAxiom => {
                let Some((_, Expr::Exists(x, body))) = s.formula.as_imp() else {
                    return Err(shape_error("existential axiom"));
                };
                let e = Expr::eps(x, eps_translate(body));
                out.push(f, Justification::Critical(e))
            }
            Justification::ForallAxiom => {
                let Some((Expr::Forall(x, body), _)) = s.formula.as_imp() else {
                    return Err(shape_error("universal axiom"));
                };
                let e = Expr::eps(x, Expr::not(eps_translate(body)));
                let (l, r) = f.as_imp().expect("translation keeps implications");
                let contra = Expr::imp(Expr::not(r.clone()), Expr::not(l.clone()));
                let c = out.push(contra, Justification::Critical(e));
                out.taut_mp(c, f.clone())
            }
            Justification::ModusPonens(i, j) => {
                out.push(f, Justification::ModusPonens(map[*i], map[*j]))
            }
            Justification::GenForall(i, a) | Justification::GenExists(i, a) => {
                let forall = matches!(s.just, Justification::GenForall(..));
                let t = eigen_term(&s.formula, forall).ok_or_else(|| shape_error("generalization"))?;
                replace_everywhere(&mut out, a, &t);
                map[*i]
            }
        };
        map.push(k);
    }
    // a trailing generalization maps to an earlier step; repeat it at the end
    if let Some(&k) = map.last() {
        if k + 1 != out.size() {
            let f = out.steps[k].formula.clone();
            out.taut_mp(k, f);
        }
    }
    Ok(out)
}

fn shape_error(what: &str) -> KernelError {
    KernelError::Other(format!("malformed {what}"))
}

/// The ε-term that replaces the eigenvariable of a generalization with
/// conclusion `B -> ∀x C(x)` (resp. `∃x B(x) -> C`).
fn eigen_term(concl: &Expr, forall: bool) -> Option<Expr> {
    let (b, c) = concl.as_imp()?;
    match (forall, b, c) {
        (true, _, Expr::Forall(x, body)) => Some(Expr::eps(x, Expr::not(eps_translate(body)))),
        (false, Expr::Exists(x, body), _) => Some(Expr::eps(x, eps_translate(body))),
        _ => None,
    }
}

fn replace_everywhere(p: &mut Proof, a: &Name, t: &Expr) {
    for s in &mut p.steps {
        if s.formula.contains_free(a) {
            s.formula = substitute_unchecked(&s.formula, a, t);
        }
        if let Justification::Critical(e) = &mut s.just {
            if e.contains_free(a) {
                *e = substitute_unchecked(e, a, t);
            }
        }
    }
}
