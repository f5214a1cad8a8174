//! Terms and formulas of the ε-calculus languages.

mod expr;
mod measures;
mod signature;
mod subst;

pub use expr::{name, Binder, Connective, Expr, Name};
pub use measures::{
    degree, immediate_sub_semiterms, immediate_subterms, maximal_eps_subterms, rank,
    sub_semiterms, subordinate, subordinates, subterms, Measures,
};
pub use signature::Signature;
pub use subst::{
    abstract_free, alpha_eq, canonical, fresh_name, instantiate, is_rectified, name_base,
    rectify, rename_bound, replace_eps, replace_eps_many, substitute, substitute_many,
    substitute_unchecked,
};

use std::collections::BTreeMap;

/// Result of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Term,
    Semiterm,
    Formula,
    Semiformula,
    Illformed,
}

/// Most specific syntactic class of `e` (in the signature implied by `e`
/// itself).
pub fn classify(e: &Expr) -> Class {
    classify_in(&Signature::new(), e)
}

/// Like [`classify`], additionally checking arities against `sig`.
pub fn classify_in(sig: &Signature, e: &Expr) -> Class {
    if well_shaped(sig, e).is_err() {
        return Class::Illformed;
    }
    match (e.is_term_sort(), e.is_closed()) {
        (true, true) => Class::Term,
        (true, false) => Class::Semiterm,
        (false, true) => Class::Formula,
        (false, false) => Class::Semiformula,
    }
}

/// Checks sorts, arities and the no-rebinding discipline.
pub fn well_shaped(sig: &Signature, e: &Expr) -> Result<(), crate::error::SyntaxError> {
    use crate::error::SyntaxError;
    let mut funcs: BTreeMap<Name, usize> = sig.funcs.clone();
    let mut preds: BTreeMap<Name, usize> = sig.preds.clone();
    fn go(
        e: &Expr,
        scope: &mut Vec<Name>,
        funcs: &mut BTreeMap<Name, usize>,
        preds: &mut BTreeMap<Name, usize>,
    ) -> Result<(), SyntaxError> {
        let arity = |m: &mut BTreeMap<Name, usize>, s: &Name, n: usize| match m.get(s) {
            Some(&a) if a != n => Err(SyntaxError::Arity {
                symbol: s.to_string(),
                expected: a,
                found: n,
            }),
            Some(_) => Ok(()),
            None => {
                m.insert(s.clone(), n);
                Ok(())
            }
        };
        let term = |c: &Expr| {
            if c.is_term_sort() {
                Ok(())
            } else {
                Err(SyntaxError::Sort(format!("formula {c} in term position")))
            }
        };
        let formula = |c: &Expr| {
            if c.is_term_sort() {
                Err(SyntaxError::Sort(format!("term {c} in formula position")))
            } else {
                Ok(())
            }
        };
        match e {
            Expr::Free(_) | Expr::Bound(_) => Ok(()),
            Expr::Func(f, xs) => {
                arity(funcs, f, xs.len())?;
                for x in xs.iter() {
                    term(x)?;
                    go(x, scope, funcs, preds)?;
                }
                Ok(())
            }
            Expr::Pred(p, xs) => {
                arity(preds, p, xs.len())?;
                for x in xs.iter() {
                    term(x)?;
                    go(x, scope, funcs, preds)?;
                }
                Ok(())
            }
            Expr::Not(a) => {
                formula(a)?;
                go(a, scope, funcs, preds)
            }
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
                formula(a)?;
                formula(b)?;
                go(a, scope, funcs, preds)?;
                go(b, scope, funcs, preds)
            }
            Expr::Forall(x, b) | Expr::Exists(x, b) | Expr::Eps(x, b) => {
                if scope.contains(x) {
                    return Err(SyntaxError::Rebinding(x.to_string()));
                }
                formula(b)?;
                scope.push(x.clone());
                let r = go(b, scope, funcs, preds);
                scope.pop();
                r
            }
        }
    }
    go(e, &mut Vec::new(), &mut funcs, &mut preds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify(&Expr::free("a")), Class::Term);
        assert_eq!(classify(&Expr::bound("x")), Class::Semiterm);
        // ∃y P(ε_x ∃y P(x,y), y): the inner ∃y rebinds y
        let inner = Expr::eps(
            "x",
            Expr::exists("y", Expr::pred("P", vec![Expr::bound("x"), Expr::bound("y")])),
        );
        let bad = Expr::exists("y", Expr::pred("P", vec![inner, Expr::bound("y")]));
        assert_eq!(classify(&bad), Class::Illformed);
        let f = Expr::pred("P", vec![Expr::bound("x")]);
        assert_eq!(classify(&f), Class::Semiformula);
        assert_eq!(classify(&Expr::forall("x", f)), Class::Formula);
    }

    #[test]
    fn arity_and_sort_violations() {
        let e = Expr::and(
            Expr::pred("P", vec![Expr::free("a")]),
            Expr::pred("P", vec![Expr::free("a"), Expr::free("b")]),
        );
        assert_eq!(classify(&e), Class::Illformed);
        let e = Expr::not(Expr::free("a"));
        assert_eq!(classify(&e), Class::Illformed);
        let mut sig = Signature::new();
        sig.declare_pred("P", 2).unwrap();
        assert_eq!(classify_in(&sig, &Expr::pred("P", vec![Expr::free("a")])), Class::Illformed);
    }
}
