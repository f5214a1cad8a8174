//! Sub-term structure, degree, subordination and rank of ε-expressions.

use std::collections::{BTreeSet, HashMap};

use super::expr::Expr;
use super::subst::canonical;
use crate::error::SyntaxError;

/// All sub-semiterms of `e` (including `e` itself when it is a semiterm).
pub fn sub_semiterms(e: &Expr) -> BTreeSet<Expr> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| {
        if n.is_term_sort() {
            out.insert(n.clone());
        }
    });
    out
}

/// All subterms: the sub-semiterms that are terms (no unbound variables).
pub fn subterms(e: &Expr) -> BTreeSet<Expr> {
    sub_semiterms(e)
        .into_iter()
        .filter(|t| t.is_closed())
        .collect()
}

/// Immediate sub-semiterms: the argument terms of a function or predicate
/// application, looking through connectives and binders (an ε-term's
/// immediate sub-semiterms are those of its matrix).
pub fn immediate_sub_semiterms(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    fn go(e: &Expr, out: &mut Vec<Expr>) {
        match e {
            Expr::Free(_) | Expr::Bound(_) => {}
            Expr::Func(_, xs) | Expr::Pred(_, xs) => {
                for x in xs.iter() {
                    if !out.contains(x) {
                        out.push(x.clone());
                    }
                }
            }
            Expr::Not(a) => go(a, out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
                go(a, out);
                go(b, out);
            }
            Expr::Forall(_, b) | Expr::Exists(_, b) | Expr::Eps(_, b) => go(b, out),
        }
    }
    go(e, &mut out);
    out
}

/// Immediate subterms: immediate sub-semiterms that are terms, plus the
/// immediate subterms of those that are not.
pub fn immediate_subterms(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    for s in immediate_sub_semiterms(e) {
        if s.is_closed() {
            if !out.contains(&s) {
                out.push(s);
            }
        } else {
            for t in immediate_subterms(&s) {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// The outermost closed ε-terms properly inside `e` (not descending into
/// them).
pub fn maximal_eps_subterms(e: &Expr) -> Vec<Expr> {
    fn go(e: &Expr, out: &mut Vec<Expr>) {
        match e {
            Expr::Eps(..) if e.is_closed() => {
                if !out.contains(e) {
                    out.push(e.clone());
                }
            }
            Expr::Free(_) | Expr::Bound(_) => {}
            _ => {
                let _ = e.map_children(|c| {
                    go(c, out);
                    c.clone()
                });
            }
        }
    }
    let mut out = Vec::new();
    match e {
        Expr::Eps(_, b) => go(b, &mut out),
        _ => go(e, &mut out),
    }
    out
}

/// Degree and rank calculator with a memo table keyed by canonical form.
#[derive(Default)]
pub struct Measures {
    deg: HashMap<Expr, usize>,
    rk: HashMap<Expr, usize>,
}

impl Measures {
    pub fn new() -> Self {
        Self::default()
    }

    /// Degree of an ε-term: 1 if its matrix has no ε-subterms, otherwise one
    /// more than the maximum degree of the immediate ε-subterms of its matrix.
    pub fn degree(&mut self, e: &Expr) -> Result<usize, SyntaxError> {
        let Expr::Eps(..) = e else {
            return Err(SyntaxError::NotEpsTerm(e.to_string()));
        };
        let key = canonical(e);
        if let Some(&d) = self.deg.get(&key) {
            return Ok(d);
        }
        let mut d = 1;
        for s in maximal_eps_subterms(e) {
            d = d.max(self.degree(&s)? + 1);
        }
        self.deg.insert(key, d);
        Ok(d)
    }

    /// Rank of an ε-expression: one more than the maximal rank of its
    /// subordinate ε-expressions (1 if there are none).
    pub fn rank(&mut self, e: &Expr) -> Result<usize, SyntaxError> {
        let Expr::Eps(..) = e else {
            return Err(SyntaxError::NotEpsTerm(e.to_string()));
        };
        let key = canonical(e);
        if let Some(&r) = self.rk.get(&key) {
            return Ok(r);
        }
        let mut r = 1;
        for s in subordinates(e) {
            r = r.max(self.rank(&s)? + 1);
        }
        self.rk.insert(key, r);
        Ok(r)
    }
}

/// ε-expressions subordinate to `outer`: proper sub-semiterms of its matrix
/// that are ε-expressions containing its bound variable.
pub fn subordinates(outer: &Expr) -> Vec<Expr> {
    let Expr::Eps(x, body) = outer else {
        return Vec::new();
    };
    let mut out = Vec::new();
    body.walk(&mut |n| {
        if n.is_eps() && n.contains_unbound(x) && !out.contains(n) {
            out.push(n.clone());
        }
    });
    out
}

pub fn subordinate(inner: &Expr, outer: &Expr) -> bool {
    inner.is_eps() && subordinates(outer).iter().any(|s| s == inner)
}

pub fn degree(e: &Expr) -> Result<usize, SyntaxError> {
    Measures::new().degree(e)
}

pub fn rank(e: &Expr) -> Result<usize, SyntaxError> {
    Measures::new().rank(e)
}
