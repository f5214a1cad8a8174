//! The proof checker. It never stops at the first problem: every step is
//! validated and all violations are reported.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::proof::{
    is_critical_for, is_exists_axiom, is_forall_axiom, Justification, Proof,
};
use super::taut::is_valid;
use crate::syntax::{alpha_eq, instantiate, is_rectified, well_shaped, Expr, Name, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 0-based step index.
    pub step: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step + 1, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Converts into a `Result` with a summary of the first few violations.
    pub fn into_result(self) -> Result<(), crate::error::KernelError> {
        if self.is_ok() {
            return Ok(());
        }
        let msgs: Vec<String> = self.violations.iter().take(5).map(|v| v.to_string()).collect();
        Err(crate::error::KernelError::Invalid(msgs.join("; ")))
    }
}

/// Validates every step of `p`.
pub fn check(p: &Proof) -> CheckReport {
    let mut out = Vec::new();
    let cal = p.calculus;
    let mut bad = |step: usize, message: String| out.push(Violation { step, message });

    for (l, h) in &p.hypotheses {
        if h.has_quantifier() || h.has_eps() || !h.is_closed() {
            bad(0, format!("hypothesis {l} must be a quantifier- and ε-free formula"));
        }
    }

    // last step index at which each free variable occurs
    let mut last: HashMap<Name, usize> = HashMap::new();
    for (k, s) in p.steps.iter().enumerate() {
        for a in s.formula.free_vars() {
            last.insert(a, k);
        }
    }
    let hyp_vars: BTreeSet<Name> = p.hypotheses.iter().flat_map(|(_, h)| h.free_vars()).collect();
    let mut eigen: BTreeSet<Name> = BTreeSet::new();
    let mut sig = Signature::new();

    for (k, s) in p.steps.iter().enumerate() {
        let f = &s.formula;
        if let Err(e) = well_shaped(&sig, f).and_then(|_| sig.absorb(f)) {
            bad(k, format!("ill-formed formula: {e}"));
            continue;
        }
        if f.is_term_sort() {
            bad(k, "a term is not a formula".into());
            continue;
        }
        if !f.is_closed() {
            bad(k, "formula contains unbound variables".into());
            continue;
        }
        if !is_rectified(f) {
            bad(k, "nested rebinding of a bound variable".into());
        }
        if f.has_eps() && !cal.allows_eps() {
            bad(k, format!("ε-term outside the ε-calculus ({cal})"));
        }
        if f.has_quantifier() && !cal.allows_quantifiers() {
            bad(k, format!("quantifier outside the predicate calculus ({cal})"));
        }
        for i in s.just.premises() {
            if i >= k {
                bad(k, format!("premise {} does not precede step {}", i + 1, k + 1));
            }
        }
        if s.just.premises().iter().any(|&i| i >= k) {
            continue;
        }
        match &s.just {
            Justification::Tautology => {
                if !is_valid(f) {
                    bad(k, "not a tautology".into());
                }
            }
            Justification::Critical(e) => {
                if !cal.allows_eps() {
                    bad(k, format!("critical formula outside the ε-calculus ({cal})"));
                } else if !is_critical_for(f, e) {
                    bad(k, format!("not a critical formula for {e}"));
                }
            }
            Justification::ExistsAxiom => {
                if !cal.allows_quantifiers() {
                    bad(k, format!("quantifier axiom outside the predicate calculus ({cal})"));
                } else if !is_exists_axiom(f) {
                    bad(k, "not an instance of A(t) -> exists x. A(x)".into());
                }
            }
            Justification::ForallAxiom => {
                if !cal.allows_quantifiers() {
                    bad(k, format!("quantifier axiom outside the predicate calculus ({cal})"));
                } else if !is_forall_axiom(f) {
                    bad(k, "not an instance of forall x. A(x) -> A(t)".into());
                }
            }
            Justification::ModusPonens(i, j) => {
                let ok = match p.steps[*j].formula.as_imp() {
                    Some((a, b)) => alpha_eq(a, &p.steps[*i].formula) && alpha_eq(b, f),
                    None => false,
                };
                if !ok {
                    bad(k, format!("step {} is not step {} -> this formula", j + 1, i + 1));
                }
            }
            Justification::GenForall(i, a) | Justification::GenExists(i, a) => {
                if !cal.allows_quantifiers() {
                    bad(k, format!("generalization outside the predicate calculus ({cal})"));
                    continue;
                }
                let forall = matches!(s.just, Justification::GenForall(..));
                if let Err(m) = check_generalization(&p.steps[*i].formula, f, a, forall) {
                    bad(k, m);
                }
                if f.contains_free(a) || last.get(a).is_some_and(|&l| l > k) {
                    bad(k, format!("eigenvariable {a} occurs in this or a later step"));
                }
                if !eigen.insert(a.clone()) {
                    bad(k, format!("eigenvariable {a} used twice"));
                }
                if hyp_vars.contains(a) {
                    bad(k, format!("eigenvariable {a} occurs in a hypothesis"));
                }
            }
            Justification::Hypothesis(l) => match p.hypothesis(l) {
                Some(h) if alpha_eq(h, f) => {}
                Some(_) => bad(k, format!("formula differs from hypothesis {l}")),
                None => bad(k, format!("unknown hypothesis {l}")),
            },
        }
    }
    CheckReport { violations: out }
}

fn check_generalization(prem: &Expr, concl: &Expr, a: &str, forall: bool) -> Result<(), String> {
    let shape = || {
        if forall {
            "premise must be B -> C(a) and conclusion B -> forall x. C(x)".to_string()
        } else {
            "premise must be B(a) -> C and conclusion exists x. B(x) -> C".to_string()
        }
    };
    let (Some((pb, pc)), Some((cb, cc))) = (prem.as_imp(), concl.as_imp()) else {
        return Err(shape());
    };
    let ok = if forall {
        match cc {
            Expr::Forall(x, body) => {
                alpha_eq(pb, cb) && alpha_eq(&instantiate(body, x, &Expr::free(a)), pc)
            }
            _ => false,
        }
    } else {
        match cb {
            Expr::Exists(x, body) => {
                alpha_eq(pc, cc) && alpha_eq(&instantiate(body, x, &Expr::free(a)), pb)
            }
            _ => false,
        }
    };
    if ok {
        Ok(())
    } else {
        Err(shape())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::proof::Calculus;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Expr {
        parse_formula(s).unwrap()
    }

    fn proof(cal: Calculus, steps: &[(&str, Justification)]) -> Proof {
        let mut pr = Proof::new(cal);
        for (f, j) in steps {
            pr.push(p(f), j.clone());
        }
        pr
    }

    #[test]
    fn critical_step_needs_eps_calculus() {
        let e = crate::parser::parse_term("eps x. P(x)").unwrap();
        let steps = [("P(c) -> P(eps x. P(x))", Justification::Critical(e))];
        assert!(check(&proof(Calculus::EcEps, &steps)).is_ok());
        let r = check(&proof(Calculus::Ec, &steps));
        assert!(r.violations.iter().any(|v| v.message.contains("critical formula outside")));
    }

    #[test]
    fn eigenvariable_recurring_later_is_flagged() {
        let steps = [
            ("Q(c) -> P(a) -> P(a)", Justification::Tautology),
            ("Q(c) -> forall x. (P(x) -> P(x))", Justification::GenForall(0, "a".into())),
            ("P(a) -> P(a)", Justification::Tautology),
            ("Q(c) -> (P(a) | ~P(a))", Justification::Tautology),
        ];
        let r = check(&proof(Calculus::Pc, &steps));
        assert_eq!(r.violations.len(), 1, "{:?}", r.violations);
        assert_eq!(r.violations[0].step, 1);
        assert!(check(&proof(Calculus::Pc, &steps[..2])).is_ok());
    }

    #[test]
    fn modus_ponens_and_bad_indices() {
        let ok = [
            ("P(c)", Justification::Hypothesis("H1".into())),
            ("P(c) -> (P(c) | Q(c))", Justification::Tautology),
            ("P(c) | Q(c)", Justification::ModusPonens(0, 1)),
        ];
        let mut pr = proof(Calculus::Ec, &ok);
        pr.hypotheses.push(("H1".into(), p("P(c)")));
        assert!(check(&pr).is_ok());
        pr.steps[2].just = Justification::ModusPonens(1, 0);
        assert!(!check(&pr).is_ok());
        pr.steps[2].just = Justification::ModusPonens(0, 7);
        assert!(!check(&pr).is_ok());
    }

    #[test]
    fn quantifier_axioms() {
        let steps = [
            ("P(c) -> exists x. P(x)", Justification::ExistsAxiom),
            ("(forall x. P(x)) -> P(c)", Justification::ForallAxiom),
        ];
        assert!(check(&proof(Calculus::Pc, &steps)).is_ok());
        assert_eq!(check(&proof(Calculus::Ec, &steps)).violations.len(), 4);
    }
}
