//! Substitution, α-equivalence and ε-term replacement.
//!
//! The naming discipline: a binder for `x` must never sit in the scope of
//! another binder for `x`. Every operation that can violate this (plugging a
//! term that carries its own binders under a binder of the same name) finishes
//! with [`rectify`], which renames the *inner* binder to a fresh name. Fresh
//! names are `base_N` with the smallest `N` not used anywhere in the
//! expression, so outputs are deterministic.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::expr::{name, Expr, Name};
use crate::error::SyntaxError;

/// True iff the two expressions differ only in the names of bound variables.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    fn go(a: &Expr, b: &Expr, env: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (Expr::Free(x), Expr::Free(y)) => x == y,
            (Expr::Bound(x), Expr::Bound(y)) => {
                let lx = env.iter().rposition(|(p, _)| p == x);
                let ly = env.iter().rposition(|(_, q)| q == y);
                match (lx, ly) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Expr::Func(f, xs), Expr::Func(g, ys)) | (Expr::Pred(f, xs), Expr::Pred(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| go(x, y, env))
            }
            (Expr::Not(x), Expr::Not(y)) => go(x, y, env),
            (Expr::And(a1, a2), Expr::And(b1, b2))
            | (Expr::Or(a1, a2), Expr::Or(b1, b2))
            | (Expr::Imp(a1, a2), Expr::Imp(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Expr::Forall(x, s), Expr::Forall(y, t))
            | (Expr::Exists(x, s), Expr::Exists(y, t))
            | (Expr::Eps(x, s), Expr::Eps(y, t)) => {
                env.push((x.clone(), y.clone()));
                let r = go(s, t, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    if std::ptr::eq(a, b) {
        return true;
    }
    go(a, b, &mut Vec::new())
}

/// Canonical representative of the α-class: every binder is renamed to `#d`
/// where `d` is its binder depth. Unbound bound variables keep their names.
/// Two expressions are α-equivalent iff their canonical forms are equal.
pub fn canonical(e: &Expr) -> Expr {
    fn go(e: &Expr, env: &mut Vec<(Name, Name)>) -> Expr {
        match e {
            Expr::Bound(x) => match env.iter().rev().find(|(p, _)| p == x) {
                Some((_, n)) => Expr::Bound(n.clone()),
                None => e.clone(),
            },
            Expr::Free(_) => e.clone(),
            Expr::Forall(x, b) | Expr::Exists(x, b) | Expr::Eps(x, b) => {
                let n = name(&format!("#{}", env.len()));
                env.push((x.clone(), n.clone()));
                let body = go(b, env);
                env.pop();
                let kind = e.as_binder().unwrap().0;
                Expr::binder(kind, n, body)
            }
            _ => e.map_children(|c| go(c, env)),
        }
    }
    go(e, &mut Vec::new())
}

/// Strips a trailing `_N` suffix so fresh names stay short.
pub fn name_base(x: &str) -> &str {
    match x.rfind('_') {
        Some(i) if i > 0 && x[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < x.len() => {
            &x[..i]
        }
        _ => x,
    }
}

/// Smallest `base_N` (N ≥ 1) not contained in `used`.
pub fn fresh_name(base: &str, used: &BTreeSet<Name>) -> Name {
    let base = name_base(base);
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !used.contains(c.as_str()))
        .map(|s| name(&s))
        .unwrap()
}

/// Renames every binder that occurs in the scope of a binder for the same
/// variable. Expressions that already satisfy the discipline are returned
/// unchanged (and shared).
pub fn rectify(e: &Expr) -> Expr {
    if is_rectified(e) {
        return e.clone();
    }
    let mut used = e.bound_names();
    fn go(e: &Expr, env: &mut Vec<(Name, Name)>, used: &mut BTreeSet<Name>) -> Expr {
        match e {
            Expr::Bound(x) => match env.iter().rev().find(|(p, _)| p == x) {
                Some((_, n)) => Expr::Bound(n.clone()),
                None => e.clone(),
            },
            Expr::Free(_) => e.clone(),
            Expr::Forall(x, b) | Expr::Exists(x, b) | Expr::Eps(x, b) => {
                let n = if env.iter().any(|(_, n)| n == x) {
                    let f = fresh_name(x, used);
                    used.insert(f.clone());
                    f
                } else {
                    x.clone()
                };
                env.push((x.clone(), n.clone()));
                let body = go(b, env, used);
                env.pop();
                Expr::binder(e.as_binder().unwrap().0, n, body)
            }
            _ => e.map_children(|c| go(c, env, used)),
        }
    }
    go(e, &mut Vec::new(), &mut used)
}

/// True iff no binder is nested inside a binder for the same variable.
pub fn is_rectified(e: &Expr) -> bool {
    fn go(e: &Expr, scope: &mut Vec<Name>) -> bool {
        match e {
            Expr::Free(_) | Expr::Bound(_) => true,
            Expr::Forall(x, b) | Expr::Exists(x, b) | Expr::Eps(x, b) => {
                if scope.contains(x) {
                    return false;
                }
                scope.push(x.clone());
                let r = go(b, scope);
                scope.pop();
                r
            }
            Expr::Func(_, xs) | Expr::Pred(_, xs) => xs.iter().all(|x| go(x, scope)),
            Expr::Not(a) => go(a, scope),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => go(a, scope) && go(b, scope),
        }
    }
    go(e, &mut Vec::new())
}

fn replace_free_raw(e: &Expr, map: &HashMap<&str, &Expr>) -> Expr {
    match e {
        Expr::Free(a) => match map.get(&**a) {
            Some(t) => (*t).clone(),
            None => e.clone(),
        },
        Expr::Bound(_) => e.clone(),
        _ => e.map_children(|c| replace_free_raw(c, map)),
    }
}

/// `a{var ← t}`: replaces every occurrence of the free variable `var` by the
/// term `t`, renaming bound variables where they would clash.
pub fn substitute(a: &Expr, var: &str, t: &Expr) -> Result<Expr, SyntaxError> {
    if let Some(x) = t.unbound_vars().into_iter().next() {
        return Err(SyntaxError::NotATerm(format!(
            "substituted expression has unbound variable {x}"
        )));
    }
    if !t.is_term_sort() {
        return Err(SyntaxError::NotATerm(format!("{t} is a formula")));
    }
    Ok(substitute_unchecked(a, var, t))
}

/// [`substitute`] without the closedness check on `t`.
pub fn substitute_unchecked(a: &Expr, var: &str, t: &Expr) -> Expr {
    if !a.contains_free(var) {
        return a.clone();
    }
    let mut map = HashMap::new();
    map.insert(var, t);
    rectify(&replace_free_raw(a, &map))
}

/// Simultaneous substitution for several free variables.
pub fn substitute_many(a: &Expr, pairs: &[(Name, Expr)]) -> Expr {
    let map: HashMap<&str, &Expr> = pairs.iter().map(|(v, t)| (&**v, t)).collect();
    rectify(&replace_free_raw(a, &map))
}

/// Plugs `t` for the occurrences of bound variable `x` that are unbound in
/// `body` (i.e. `A(t)` from the binder body `A(x)`).
pub fn instantiate(body: &Expr, x: &str, t: &Expr) -> Expr {
    fn go(e: &Expr, x: &str, t: &Expr) -> Expr {
        match e {
            Expr::Bound(y) if &**y == x => t.clone(),
            Expr::Bound(_) | Expr::Free(_) => e.clone(),
            Expr::Forall(y, _) | Expr::Exists(y, _) | Expr::Eps(y, _) if &**y == x => e.clone(),
            _ => e.map_children(|c| go(c, x, t)),
        }
    }
    rectify(&go(body, x, t))
}

/// Abstracts every occurrence of the free variable `a` in `e` into the bound
/// variable `x` (the inverse of [`instantiate`]).
pub fn abstract_free(e: &Expr, a: &str, x: &str) -> Expr {
    match e {
        Expr::Free(b) if &**b == a => Expr::Bound(name(x)),
        Expr::Free(_) | Expr::Bound(_) => e.clone(),
        _ => e.map_children(|c| abstract_free(c, a, x)),
    }
}

/// Replaces every ε-term α-equivalent to `target` by `t`, outermost first.
pub fn replace_eps(host: &Expr, target: &Expr, t: &Expr) -> Expr {
    fn go(e: &Expr, target: &Expr, t: &Expr, hit: &mut bool) -> Expr {
        match e {
            Expr::Free(_) | Expr::Bound(_) => e.clone(),
            Expr::Func(_, a) | Expr::Pred(_, a) if a.is_empty() => e.clone(),
            Expr::Eps(..) if alpha_eq(e, target) => {
                *hit = true;
                t.clone()
            }
            _ => e.map_children(|c| go(c, target, t, hit)),
        }
    }
    let mut hit = false;
    let out = go(host, target, t, &mut hit);
    if hit {
        rectify(&out)
    } else {
        host.clone()
    }
}

/// Replaces several ε-terms at once (each by its own term), outermost first.
pub fn replace_eps_many(host: &Expr, pairs: &[(Expr, Expr)]) -> Expr {
    let canon: HashMap<Expr, &Expr> = pairs.iter().map(|(e, t)| (canonical(e), t)).collect();
    fn go(e: &Expr, canon: &HashMap<Expr, &Expr>, hit: &mut bool) -> Expr {
        match e {
            Expr::Free(_) | Expr::Bound(_) => e.clone(),
            Expr::Eps(..) => {
                if let Some(t) = canon.get(&canonical(e)) {
                    *hit = true;
                    return (*t).clone();
                }
                e.map_children(|c| go(c, canon, hit))
            }
            _ => e.map_children(|c| go(c, canon, hit)),
        }
    }
    let mut hit = false;
    let out = go(host, &canon, &mut hit);
    if hit {
        rectify(&out)
    } else {
        host.clone()
    }
}

/// Clones an expression while renaming one bound variable everywhere
/// (binders and occurrences). Used to pick readable binder names.
pub fn rename_bound(e: &Expr, from: &str, to: &str) -> Expr {
    match e {
        Expr::Bound(x) if &**x == from => Expr::Bound(Arc::from(to)),
        Expr::Bound(_) | Expr::Free(_) => e.clone(),
        Expr::Forall(x, b) | Expr::Exists(x, b) | Expr::Eps(x, b) => {
            let n = if &**x == from { Arc::from(to) } else { x.clone() };
            Expr::binder(e.as_binder().unwrap().0, n, rename_bound(b, from, to))
        }
        _ => e.map_children(|c| rename_bound(c, from, to)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn renames_clashing_binder_on_substitution() {
        let a = p("exists y. P(a, y)");
        let t = p("eps x. exists y. P(x, y)");
        let out = substitute(&a, "a", &t).unwrap();
        assert!(alpha_eq(&out, &p("exists y. P(eps x. exists z. P(x, z), y)")));
        assert!(is_rectified(&out));
    }

    #[test]
    fn identity_and_plain_substitution() {
        assert_eq!(substitute(&p("P(a)"), "a", &p("a")).unwrap(), p("P(a)"));
        assert_eq!(
            substitute(&p("P(a) & Q(b)"), "a", &p("f(b)")).unwrap(),
            p("P(f(b)) & Q(b)")
        );
    }

    #[test]
    fn rejects_semiterm() {
        assert!(substitute(&p("P(a)"), "a", &Expr::bound("x")).is_err());
    }

    #[test]
    fn alpha_equivalence() {
        assert!(alpha_eq(&p("eps x. exists y. P(x,y)"), &p("eps x. exists z. P(x,z)")));
        assert!(!alpha_eq(&p("eps x. P(x)"), &p("eps x. Q(x)")));
        assert!(!alpha_eq(&p("forall x. forall y. P(x,y)"), &p("forall y. forall x. P(x,y)")));
        let e = p("eps x. P(x)");
        assert!(alpha_eq(&e, &e));
        assert_eq!(
            canonical(&p("eps x. exists y. P(x,y)")),
            canonical(&p("eps u. exists v. P(u,v)"))
        );
    }

    #[test]
    fn replace_eps_examples() {
        let host = p("exists y. P(eps x. exists z. P(x, z), y)");
        let e = p("eps x. exists y. P(x, y)");
        let t = p("t0");
        assert_eq!(replace_eps(&host, &e, &t), p("exists y. P(t0, y)"));
        assert_eq!(replace_eps(&p("Q(c)"), &e, &t), p("Q(c)"));
        let crit = p("P(c) -> P(eps x. P(x))");
        assert_eq!(replace_eps(&crit, &p("eps x. P(x)"), &p("c")), p("P(c) -> P(c)"));
    }

    #[test]
    fn fresh_names() {
        let used: BTreeSet<Name> = ["y", "y_1"].iter().map(|s| name(s)).collect();
        assert_eq!(&*fresh_name("y", &used), "y_2");
        assert_eq!(&*fresh_name("y_1", &used), "y_2");
        assert_eq!(name_base("z_10"), "z");
        assert_eq!(name_base("_1"), "_1");
    }
}
