//! The unified expression tree for terms and formulas of the four languages
//! L(EC), L(PC), L(EC_eps) and L(PC_eps).
//!
//! Terms and formulas share one enum. Free variables (`a`, `b`, ...) and bound
//! variables (`x`, `y`, ...) are distinct node kinds: a bound variable is only
//! meaningful under a matching binder, and an expression with an unmatched
//! bound variable is a *semi*-term or *semi*-formula.
//!
//! Children are reference counted so that cloning large formulas is cheap and
//! rewrites can share untouched subtrees.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Symbol and variable names.
pub type Name = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Free(Name),
    Bound(Name),
    Func(Name, Arc<[Expr]>),
    Pred(Name, Arc<[Expr]>),
    Not(Arc<Expr>),
    And(Arc<Expr>, Arc<Expr>),
    Or(Arc<Expr>, Arc<Expr>),
    Imp(Arc<Expr>, Arc<Expr>),
    Forall(Name, Arc<Expr>),
    Exists(Name, Arc<Expr>),
    Eps(Name, Arc<Expr>),
}

/// Binder kinds, used where code treats the three binders uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Binder {
    Forall,
    Exists,
    Eps,
}

/// Binary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Imp,
}

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

impl Expr {
    pub fn free(n: &str) -> Expr {
        Expr::Free(name(n))
    }

    pub fn bound(n: &str) -> Expr {
        Expr::Bound(name(n))
    }

    pub fn func(f: &str, args: Vec<Expr>) -> Expr {
        Expr::Func(name(f), args.into())
    }

    pub fn constant(f: &str) -> Expr {
        Expr::Func(name(f), Arc::from(Vec::new()))
    }

    pub fn pred(p: &str, args: Vec<Expr>) -> Expr {
        Expr::Pred(name(p), args.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Expr {
        Expr::Not(Arc::new(a))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Expr, b: Expr) -> Expr {
        Expr::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn forall(x: &str, body: Expr) -> Expr {
        Expr::Forall(name(x), Arc::new(body))
    }

    pub fn exists(x: &str, body: Expr) -> Expr {
        Expr::Exists(name(x), Arc::new(body))
    }

    pub fn eps(x: &str, body: Expr) -> Expr {
        Expr::Eps(name(x), Arc::new(body))
    }

    pub fn binder(kind: Binder, x: Name, body: Expr) -> Expr {
        let body = Arc::new(body);
        match kind {
            Binder::Forall => Expr::Forall(x, body),
            Binder::Exists => Expr::Exists(x, body),
            Binder::Eps => Expr::Eps(x, body),
        }
    }

    pub fn binary(op: Connective, a: Expr, b: Expr) -> Expr {
        match op {
            Connective::And => Expr::and(a, b),
            Connective::Or => Expr::or(a, b),
            Connective::Imp => Expr::imp(a, b),
        }
    }

    /// Disjunction of a non-empty list. Long lists are split into a balanced
    /// tree so that recursive traversals stay shallow.
    pub fn disj(items: &[Expr]) -> Expr {
        Self::balanced(items, Connective::Or)
    }

    /// Conjunction of a non-empty list, balanced like [`Expr::disj`].
    pub fn conj(items: &[Expr]) -> Expr {
        Self::balanced(items, Connective::And)
    }

    fn balanced(items: &[Expr], op: Connective) -> Expr {
        assert!(!items.is_empty(), "empty junction");
        if items.len() == 1 {
            return items[0].clone();
        }
        if items.len() <= 4 {
            let mut acc = items[0].clone();
            for it in &items[1..] {
                acc = Expr::binary(op, acc, it.clone());
            }
            return acc;
        }
        let mid = items.len() / 2;
        Expr::binary(
            op,
            Self::balanced(&items[..mid], op),
            Self::balanced(&items[mid..], op),
        )
    }

    /// Right-nested implication `h1 -> (h2 -> ... -> goal)`.
    pub fn imp_chain(hyps: &[Expr], goal: Expr) -> Expr {
        hyps.iter()
            .rev()
            .fold(goal, |acc, h| Expr::imp(h.clone(), acc))
    }

    pub fn as_binder(&self) -> Option<(Binder, &Name, &Expr)> {
        match self {
            Expr::Forall(x, b) => Some((Binder::Forall, x, b)),
            Expr::Exists(x, b) => Some((Binder::Exists, x, b)),
            Expr::Eps(x, b) => Some((Binder::Eps, x, b)),
            _ => None,
        }
    }

    pub fn as_binary(&self) -> Option<(Connective, &Expr, &Expr)> {
        match self {
            Expr::And(a, b) => Some((Connective::And, a, b)),
            Expr::Or(a, b) => Some((Connective::Or, a, b)),
            Expr::Imp(a, b) => Some((Connective::Imp, a, b)),
            _ => None,
        }
    }

    pub fn as_imp(&self) -> Option<(&Expr, &Expr)> {
        match self {
            Expr::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// True for node kinds that live in term position.
    pub fn is_term_sort(&self) -> bool {
        matches!(
            self,
            Expr::Free(_) | Expr::Bound(_) | Expr::Func(..) | Expr::Eps(..)
        )
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Expr::Eps(..))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Pre-order visit of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Free(_) | Expr::Bound(_) => {}
            Expr::Func(_, args) | Expr::Pred(_, args) => {
                for a in args.iter() {
                    a.walk(f);
                }
            }
            Expr::Not(a) => a.walk(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Forall(_, b) | Expr::Exists(_, b) | Expr::Eps(_, b) => b.walk(f),
        }
    }

    /// Names of free variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Free(a) = e {
                out.insert(a.clone());
            }
        });
        out
    }

    pub fn contains_free(&self, a: &str) -> bool {
        let mut hit = false;
        self.walk(&mut |e| {
            if let Expr::Free(b) = e {
                hit |= &**b == a;
            }
        });
        hit
    }

    /// Bound-variable names occurring without a matching binder.
    pub fn unbound_vars(&self) -> BTreeSet<Name> {
        fn go(e: &Expr, scope: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match e {
                Expr::Bound(x) => {
                    if !scope.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Expr::Free(_) => {}
                Expr::Func(_, args) | Expr::Pred(_, args) => {
                    for a in args.iter() {
                        go(a, scope, out);
                    }
                }
                Expr::Not(a) => go(a, scope, out),
                Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
                    go(a, scope, out);
                    go(b, scope, out);
                }
                Expr::Forall(x, b) | Expr::Exists(x, b) | Expr::Eps(x, b) => {
                    scope.push(x.clone());
                    go(b, scope, out);
                    scope.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn contains_unbound(&self, x: &str) -> bool {
        self.unbound_vars().iter().any(|y| &**y == x)
    }

    /// No bound variable without a matching binder.
    pub fn is_closed(&self) -> bool {
        self.unbound_vars().is_empty()
    }

    /// Every name used as a bound variable or binder variable.
    pub fn bound_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| match e {
            Expr::Bound(x) | Expr::Forall(x, _) | Expr::Exists(x, _) | Expr::Eps(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    pub fn has_quantifier(&self) -> bool {
        let mut hit = false;
        self.walk(&mut |e| hit |= matches!(e, Expr::Forall(..) | Expr::Exists(..)));
        hit
    }

    pub fn has_eps(&self) -> bool {
        let mut hit = false;
        self.walk(&mut |e| hit |= e.is_eps());
        hit
    }

    /// Function and predicate symbols with the arities they are used at.
    pub fn symbols(&self) -> BTreeSet<(bool, Name, usize)> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| match e {
            Expr::Func(f, args) => {
                out.insert((false, f.clone(), args.len()));
            }
            Expr::Pred(p, args) => {
                out.insert((true, p.clone(), args.len()));
            }
            _ => {}
        });
        out
    }

    /// Rebuilds this node with `f` applied to each immediate child.
    pub fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Free(_) | Expr::Bound(_) => self.clone(),
            Expr::Func(g, args) => Expr::Func(g.clone(), args.iter().map(&mut f).collect()),
            Expr::Pred(p, args) => Expr::Pred(p.clone(), args.iter().map(&mut f).collect()),
            Expr::Not(a) => Expr::Not(Arc::new(f(a))),
            Expr::And(a, b) => Expr::And(Arc::new(f(a)), Arc::new(f(b))),
            Expr::Or(a, b) => Expr::Or(Arc::new(f(a)), Arc::new(f(b))),
            Expr::Imp(a, b) => Expr::Imp(Arc::new(f(a)), Arc::new(f(b))),
            Expr::Forall(x, b) => Expr::Forall(x.clone(), Arc::new(f(b))),
            Expr::Exists(x, b) => Expr::Exists(x.clone(), Arc::new(f(b))),
            Expr::Eps(x, b) => Expr::Eps(x.clone(), Arc::new(f(b))),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::print_expr(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::print_expr(self))
    }
}
