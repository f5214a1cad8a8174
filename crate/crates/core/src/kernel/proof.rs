use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{alpha_eq, instantiate, Expr, Name};

/// The four calculi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Calculus {
    #[serde(rename = "EC")]
    Ec,
    #[serde(rename = "EC_eps")]
    EcEps,
    #[serde(rename = "PC")]
    Pc,
    #[serde(rename = "PC_eps")]
    PcEps,
}

impl Calculus {
    pub fn allows_eps(self) -> bool {
        matches!(self, Calculus::EcEps | Calculus::PcEps)
    }

    pub fn allows_quantifiers(self) -> bool {
        matches!(self, Calculus::Pc | Calculus::PcEps)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Calculus::Ec => "EC",
            Calculus::EcEps => "EC_eps",
            Calculus::Pc => "PC",
            Calculus::PcEps => "PC_eps",
        }
    }

    pub fn from_tag(s: &str) -> Option<Calculus> {
        Some(match s {
            "EC" => Calculus::Ec,
            "EC_eps" | "ECeps" | "EC_ε" => Calculus::EcEps,
            "PC" => Calculus::Pc,
            "PC_eps" | "PCeps" | "PC_ε" => Calculus::PcEps,
            _ => return None,
        })
    }

    /// Smallest calculus whose language contains `e`.
    pub fn of_formula(e: &Expr) -> Calculus {
        match (e.has_quantifier(), e.has_eps()) {
            (false, false) => Calculus::Ec,
            (false, true) => Calculus::EcEps,
            (true, false) => Calculus::Pc,
            (true, true) => Calculus::PcEps,
        }
    }

    /// Least upper bound of two calculi.
    pub fn join(self, other: Calculus) -> Calculus {
        let q = self.allows_quantifiers() || other.allows_quantifiers();
        let e = self.allows_eps() || other.allows_eps();
        match (q, e) {
            (false, false) => Calculus::Ec,
            (false, true) => Calculus::EcEps,
            (true, false) => Calculus::Pc,
            (true, true) => Calculus::PcEps,
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Why a step is in the proof. Step indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Tautology,
    /// A critical formula `A(t) -> A(ε_x A(x))`, with its ε-term.
    Critical(Expr),
    /// `A(t) -> ∃x A(x)`
    ExistsAxiom,
    /// `∀x A(x) -> A(t)`
    ForallAxiom,
    /// `MP(i, j)`: step `j` is `A_i -> A`.
    ModusPonens(usize, usize),
    /// From `B -> C(a)` at step `i` infer `B -> ∀x C(x)`.
    GenForall(usize, Name),
    /// From `B(a) -> C` at step `i` infer `∃x B(x) -> C`.
    GenExists(usize, Name),
    Hypothesis(String),
}

impl Justification {
    pub fn premises(&self) -> Vec<usize> {
        match self {
            Justification::ModusPonens(i, j) => vec![*i, *j],
            Justification::GenForall(i, _) | Justification::GenExists(i, _) => vec![*i],
            _ => Vec::new(),
        }
    }

    /// Same justification with premise indices mapped through `f`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Justification {
        match self {
            Justification::ModusPonens(i, j) => Justification::ModusPonens(f(*i), f(*j)),
            Justification::GenForall(i, a) => Justification::GenForall(f(*i), a.clone()),
            Justification::GenExists(i, a) => Justification::GenExists(f(*i), a.clone()),
            j => j.clone(),
        }
    }

    pub fn is_quantifier_axiom(&self) -> bool {
        matches!(self, Justification::ExistsAxiom | Justification::ForallAxiom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: Expr,
    pub just: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub calculus: Calculus,
    /// Open-theory axioms, by label.
    pub hypotheses: Vec<(String, Expr)>,
    pub steps: Vec<Step>,
}

impl Proof {
    pub fn new(calculus: Calculus) -> Self {
        Proof {
            calculus,
            hypotheses: Vec::new(),
            steps: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.steps.len()
    }

    pub fn end(&self) -> Option<&Expr> {
        self.steps.last().map(|s| &s.formula)
    }

    pub fn push(&mut self, formula: Expr, just: Justification) -> usize {
        self.steps.push(Step { formula, just });
        self.steps.len() - 1
    }

    pub fn hypothesis(&self, label: &str) -> Option<&Expr> {
        self.hypotheses.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }

    /// Adds a hypothesis (reusing an existing label for an α-equal formula)
    /// and returns its label.
    pub fn add_hypothesis(&mut self, f: &Expr) -> String {
        if let Some((l, _)) = self.hypotheses.iter().find(|(_, g)| alpha_eq(f, g)) {
            return l.clone();
        }
        let label = (1..)
            .map(|i| format!("H{i}"))
            .find(|l| self.hypothesis(l).is_none())
            .unwrap();
        self.hypotheses.push((label.clone(), f.clone()));
        label
    }

    /// Appends all steps of `other` (premise indices shifted) and merges its
    /// hypotheses. Returns the index offset.
    pub fn append(&mut self, other: &Proof) -> usize {
        let off = self.steps.len();
        let mut relabel = Vec::new();
        for (l, f) in &other.hypotheses {
            let nl = match self.hypotheses.iter().find(|(_, g)| alpha_eq(f, g)) {
                Some((m, _)) => m.clone(),
                None if self.hypothesis(l).is_none() => {
                    self.hypotheses.push((l.clone(), f.clone()));
                    l.clone()
                }
                None => self.add_hypothesis(f),
            };
            relabel.push((l.clone(), nl));
        }
        self.calculus = self.calculus.join(other.calculus);
        for s in &other.steps {
            let just = match &s.just {
                Justification::Hypothesis(l) => Justification::Hypothesis(
                    relabel
                        .iter()
                        .find(|(o, _)| o == l)
                        .map(|(_, n)| n.clone())
                        .unwrap_or_else(|| l.clone()),
                ),
                j => j.remap(|i| i + off),
            };
            self.steps.push(Step {
                formula: s.formula.clone(),
                just,
            });
        }
        off
    }

    /// Appends `A -> B` (a tautology) and modus ponens from step `a_idx`
    /// (proving `A`), giving `B`. Returns the index of `B`.
    pub fn taut_mp(&mut self, a_idx: usize, b: Expr) -> usize {
        let a = self.steps[a_idx].formula.clone();
        let t = self.push(Expr::imp(a, b.clone()), Justification::Tautology);
        self.push(b, Justification::ModusPonens(a_idx, t))
    }

    /// Appends modus ponens on steps `i` (`A`) and `j` (`A -> B`).
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let b = match self.steps[j].formula.as_imp() {
            Some((_, b)) => b.clone(),
            None => panic!("modus ponens on a non-implication"),
        };
        self.push(b, Justification::ModusPonens(i, j))
    }

    /// Applies `f` to every formula and every critical ε-term.
    pub fn map_formulas(&self, f: impl Fn(&Expr) -> Expr) -> Proof {
        Proof {
            calculus: self.calculus,
            hypotheses: self.hypotheses.clone(),
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    formula: f(&s.formula),
                    just: match &s.just {
                        Justification::Critical(e) => Justification::Critical(f(e)),
                        j => j.clone(),
                    },
                })
                .collect(),
        }
    }
}

/// If `target` is `body` with the bound variable `x` replaced by some term,
/// returns `Some(Some(t))`; `Some(None)` if it matches and `x` does not
/// occur; `None` if it does not match.
pub fn match_instance(body: &Expr, x: &str, target: &Expr) -> Option<Option<Expr>> {
    fn go(
        p: &Expr,
        t: &Expr,
        x: &str,
        env: &mut Vec<(Name, Name)>,
        found: &mut Option<Expr>,
    ) -> bool {
        match (p, t) {
            (Expr::Bound(y), _) if &**y == x && !env.iter().any(|(a, _)| &**a == x) => {
                // the instance term must not mention binders local to the target
                if env.iter().any(|(_, b)| t.contains_unbound(b)) {
                    return false;
                }
                match found {
                    Some(s) => alpha_eq(s, t),
                    None => {
                        *found = Some(t.clone());
                        true
                    }
                }
            }
            (Expr::Bound(a), Expr::Bound(b)) => {
                let la = env.iter().rposition(|(p, _)| p == a);
                let lb = env.iter().rposition(|(_, q)| q == b);
                match (la, lb) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => a == b,
                    _ => false,
                }
            }
            (Expr::Free(a), Expr::Free(b)) => a == b,
            (Expr::Func(f, xs), Expr::Func(g, ys)) | (Expr::Pred(f, xs), Expr::Pred(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(a, b)| go(a, b, x, env, found))
            }
            (Expr::Not(a), Expr::Not(b)) => go(a, b, x, env, found),
            (Expr::And(a1, a2), Expr::And(b1, b2))
            | (Expr::Or(a1, a2), Expr::Or(b1, b2))
            | (Expr::Imp(a1, a2), Expr::Imp(b1, b2)) => {
                go(a1, b1, x, env, found) && go(a2, b2, x, env, found)
            }
            (Expr::Forall(y, s), Expr::Forall(z, u))
            | (Expr::Exists(y, s), Expr::Exists(z, u))
            | (Expr::Eps(y, s), Expr::Eps(z, u)) => {
                env.push((y.clone(), z.clone()));
                let r = go(s, u, x, env, found);
                env.pop();
                r
            }
            _ => false,
        }
    }
    let mut found = None;
    if go(body, target, x, &mut Vec::new(), &mut found) {
        Some(found)
    } else {
        None
    }
}

/// Recognizes `A(t) -> A(ε_x A(x))` for the ε-term `e`.
pub fn is_critical_for(f: &Expr, e: &Expr) -> bool {
    let (Some((lhs, rhs)), Expr::Eps(x, body)) = (f.as_imp(), e) else {
        return false;
    };
    if !e.is_closed() {
        return false;
    }
    alpha_eq(rhs, &instantiate(body, x, e)) && match_instance(body, x, lhs).is_some()
}

/// The ε-term a critical formula belongs to, if `f` is one.
pub fn critical_term(f: &Expr) -> Option<Expr> {
    let (_, rhs) = f.as_imp()?;
    let mut cands = Vec::new();
    rhs.walk(&mut |n| {
        if n.is_eps() && n.is_closed() && !cands.contains(n) {
            cands.push(n.clone());
        }
    });
    cands.into_iter().find(|e| is_critical_for(f, e))
}

/// The witness term `t` of a critical formula (None if `x` is vacuous).
pub fn critical_witness(f: &Expr, e: &Expr) -> Option<Expr> {
    let (lhs, _) = f.as_imp()?;
    let Expr::Eps(x, body) = e else { return None };
    match_instance(body, x, lhs).flatten()
}

/// Recognizes `A(t) -> ∃x A(x)`.
pub fn is_exists_axiom(f: &Expr) -> bool {
    match f.as_imp() {
        Some((lhs, Expr::Exists(x, body))) => match_instance(body, x, lhs).is_some(),
        _ => false,
    }
}

/// Recognizes `∀x A(x) -> A(t)`.
pub fn is_forall_axiom(f: &Expr) -> bool {
    match f.as_imp() {
        Some((Expr::Forall(x, body), rhs)) => match_instance(body, x, rhs).is_some(),
        _ => false,
    }
}
