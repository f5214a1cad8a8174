//! Natural deduction on top of the Hilbert calculus.
//!
//! A [`Sequent`] `Γ ⊢ F` is represented by a proof step of the formula
//! `G₁ -> (G₂ -> … -> F)`. Propositional reasoning in a context is a single
//! tautology plus modus ponens; quantifier rules go through the axioms and
//! the two generalization rules, with `⋀Γ` as the side formula.

use std::collections::BTreeSet;

use super::proof::{Calculus, Justification, Proof};
use crate::error::KernelError;
use crate::syntax::{alpha_eq, fresh_name, instantiate, Expr, Name};

/// `ctx ⊢ concl`, proved at `step`.
#[derive(Clone, Debug)]
pub struct Sequent {
    pub ctx: Vec<Expr>,
    pub concl: Expr,
    pub step: usize,
}

/// Builds a Hilbert proof from natural-deduction steps.
pub struct Deriver {
    pub proof: Proof,
    used: BTreeSet<Name>,
}

impl Deriver {
    pub fn new(calculus: Calculus) -> Self {
        Deriver {
            proof: Proof::new(calculus),
            used: BTreeSet::new(),
        }
    }

    /// Continues an existing proof; its free variables are never reused as
    /// eigenvariables.
    pub fn extend(proof: Proof) -> Self {
        let used = proof.steps.iter().flat_map(|s| s.formula.free_vars()).collect();
        Deriver { proof, used }
    }

    /// Marks names as taken for [`Deriver::fresh`].
    pub fn reserve(&mut self, names: impl IntoIterator<Item = Name>) {
        self.used.extend(names);
    }

    /// A free variable not used anywhere so far (`base` must start with
    /// `a`..`e` to stay in the free-variable class of the text syntax).
    pub fn fresh(&mut self, base: &str) -> Name {
        let n = fresh_name(base, &self.used);
        self.used.insert(n.clone());
        n
    }

    pub fn finish(self) -> Proof {
        self.proof
    }

    fn push(&mut self, f: Expr, j: Justification) -> usize {
        self.used.extend(f.free_vars());
        self.proof.push(f, j)
    }

    fn seq(ctx: &[Expr], concl: Expr, step: usize) -> Sequent {
        Sequent {
            ctx: ctx.to_vec(),
            concl,
            step,
        }
    }

    /// The formula of step `i` as a context-free sequent.
    pub fn lift(&self, i: usize) -> Sequent {
        Self::seq(&[], self.proof.steps[i].formula.clone(), i)
    }

    /// `Γ ⊢ Γ[i]`.
    pub fn assume(&mut self, ctx: &[Expr], i: usize) -> Sequent {
        let f = Expr::imp_chain(ctx, ctx[i].clone());
        let s = self.push(f, Justification::Tautology);
        Self::seq(ctx, ctx[i].clone(), s)
    }

    /// `Γ ⊢ G` from premises `Γᵢ ⊢ Fᵢ` (each `Γᵢ ⊆ Γ`) when `F₁ … Fₙ ⊨ G`
    /// propositionally. One tautology and `n` modus ponens steps.
    pub fn prop(&mut self, ctx: &[Expr], prem: &[&Sequent], concl: Expr) -> Sequent {
        let goal = Expr::imp_chain(ctx, concl.clone());
        if let [p] = prem {
            if p.ctx.len() == ctx.len() && alpha_eq(&self.proof.steps[p.step].formula, &goal) {
                return Self::seq(ctx, concl, p.step);
            }
        }
        let fs: Vec<Expr> = prem.iter().map(|p| self.proof.steps[p.step].formula.clone()).collect();
        let mut cur = self.push(Expr::imp_chain(&fs, goal), Justification::Tautology);
        for p in prem {
            cur = self.proof.mp(p.step, cur);
        }
        Self::seq(ctx, concl, cur)
    }

    /// `Γ ⊢ F` where `F` is an axiom (or already proved without context).
    pub fn axiom(&mut self, ctx: &[Expr], f: Expr, just: Justification) -> Sequent {
        let i = self.push(f, just);
        let s = self.lift(i);
        if ctx.is_empty() {
            return s;
        }
        let c = s.concl.clone();
        self.prop(ctx, &[&s], c)
    }

    /// From `Γ ⊢ ∀x A(x)` infer `Γ ⊢ A(t)`.
    pub fn forall_elim(&mut self, s: &Sequent, t: &Expr) -> Result<Sequent, KernelError> {
        let Expr::Forall(x, body) = &s.concl else {
            return Err(KernelError::Other(format!("not universal: {}", s.concl)));
        };
        let inst = instantiate(body, x, t);
        let ax = self.axiom(&[], Expr::imp(s.concl.clone(), inst.clone()), Justification::ForallAxiom);
        Ok(self.prop(&s.ctx.clone(), &[s, &ax], inst))
    }

    /// From `Γ ⊢ A(t)` infer `Γ ⊢ ∃x A(x)` (given as `target`).
    pub fn exists_intro(&mut self, s: &Sequent, target: &Expr) -> Result<Sequent, KernelError> {
        if !matches!(target, Expr::Exists(..)) {
            return Err(KernelError::Other(format!("not existential: {target}")));
        }
        let ax = self.axiom(&[], Expr::imp(s.concl.clone(), target.clone()), Justification::ExistsAxiom);
        Ok(self.prop(&s.ctx.clone(), &[s, &ax], target.clone()))
    }

    /// The side formula `⋀Γ` of a generalization (a closed tautology-free
    /// stand-in when `Γ` is empty).
    fn side(ctx: &[Expr], fallback: &Expr) -> Expr {
        if ctx.is_empty() {
            Expr::imp(fallback.clone(), fallback.clone())
        } else {
            Expr::conj(ctx)
        }
    }

    /// From `Γ ⊢ A(a)` with `a` not in `Γ` infer `Γ ⊢ ∀x A(x)` (`target`).
    pub fn forall_intro(&mut self, s: &Sequent, a: &Name, target: &Expr) -> Result<Sequent, KernelError> {
        let Expr::Forall(x, body) = target else {
            return Err(KernelError::Other(format!("not universal: {target}")));
        };
        if !alpha_eq(&instantiate(body, x, &Expr::Free(a.clone())), &s.concl) {
            return Err(KernelError::Other(format!("{} is not an instance of {target}", s.concl)));
        }
        if s.ctx.iter().any(|g| g.contains_free(a)) || target.contains_free(a) {
            return Err(KernelError::EigenvariableInHypothesis(a.to_string()));
        }
        let ctx = s.ctx.clone();
        let side = Self::side(&ctx, target);
        // with an empty context the side formula is a tautology of its own
        let guard = ctx.is_empty().then(|| self.push(side.clone(), Justification::Tautology));
        // side -> A(a)
        let pre_f = Expr::imp(side.clone(), s.concl.clone());
        let t = self.push(
            Expr::imp(self.proof.steps[s.step].formula.clone(), pre_f),
            Justification::Tautology,
        );
        let pre = self.proof.mp(s.step, t);
        let g = self.push(
            Expr::imp(side, target.clone()),
            Justification::GenForall(pre, a.clone()),
        );
        let gs = self.lift(g);
        match guard {
            Some(gd) => {
                let gd = self.lift(gd);
                Ok(self.prop(&ctx, &[&gs, &gd], target.clone()))
            }
            None => Ok(self.prop(&ctx, &[&gs], target.clone())),
        }
    }

    /// From `Γ ⊢ ∃x B(x)` and `Γ, B(a) ⊢ C` (with `a` in neither `Γ` nor
    /// `C`) infer `Γ ⊢ C`.
    pub fn exists_elim(&mut self, ex: &Sequent, body: &Sequent, a: &Name) -> Result<Sequent, KernelError> {
        let Expr::Exists(x, b) = &ex.concl else {
            return Err(KernelError::Other(format!("not existential: {}", ex.concl)));
        };
        let ctx = ex.ctx.clone();
        let Some((last, prefix)) = body.ctx.split_last() else {
            return Err(KernelError::Other("witness context is empty".into()));
        };
        if !alpha_eq(&instantiate(b, x, &Expr::Free(a.clone())), last) {
            return Err(KernelError::Other(format!("{last} is not an instance of {}", ex.concl)));
        }
        if prefix.iter().any(|g| !ctx.iter().any(|h| alpha_eq(g, h))) {
            return Err(KernelError::Other("witness context is not the outer context".into()));
        }
        if ctx.iter().any(|g| g.contains_free(a)) || body.concl.contains_free(a) || ex.concl.contains_free(a) {
            return Err(KernelError::EigenvariableInHypothesis(a.to_string()));
        }
        // B(a) -> (⋀Γ -> C)
        let inner = if ctx.is_empty() {
            body.concl.clone()
        } else {
            Expr::imp(Expr::conj(&ctx), body.concl.clone())
        };
        let f = Expr::imp(last.clone(), inner.clone());
        let t = self.push(
            Expr::imp(self.proof.steps[body.step].formula.clone(), f),
            Justification::Tautology,
        );
        let pre = self.proof.mp(body.step, t);
        let g = self.push(
            Expr::imp(ex.concl.clone(), inner),
            Justification::GenExists(pre, a.clone()),
        );
        let gs = self.lift(g);
        Ok(self.prop(&ctx, &[ex, &gs], body.concl.clone()))
    }

    /// `Γ, A ⊢ B` read as `Γ ⊢ A -> B` (same step).
    pub fn imp_intro(&self, s: &Sequent) -> Sequent {
        let mut ctx = s.ctx.clone();
        let a = ctx.pop().expect("non-empty context");
        Sequent {
            ctx,
            concl: Expr::imp(a, s.concl.clone()),
            step: s.step,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check::check;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Expr {
        parse_formula(s).unwrap()
    }

    #[test]
    fn quantifier_rules_produce_checking_proofs() {
        // ⊢ (forall x. P(x)) -> exists y. P(y)
        let mut d = Deriver::new(Calculus::Pc);
        let ctx = vec![p("forall x. P(x)")];
        let h = d.assume(&ctx, 0);
        let inst = d.forall_elim(&h, &Expr::constant("c")).unwrap();
        let ex = d.exists_intro(&inst, &p("exists y. P(y)")).unwrap();
        let s = d.imp_intro(&ex);
        let pr = d.finish();
        assert!(check(&pr).is_ok(), "{:?}", check(&pr));
        assert!(alpha_eq(&pr.steps[s.step].formula, &p("(forall x. P(x)) -> exists y. P(y)")));
    }

    #[test]
    fn generalization_and_witness_elimination() {
        // (exists x. forall y. R(x, y)) -> forall y. exists x. R(x, y)
        let mut d = Deriver::new(Calculus::Pc);
        let ctx = vec![p("exists x. forall y. R(x, y)")];
        let ex = d.assume(&ctx, 0);
        let b = d.fresh("b");
        let a = d.fresh("a");
        let inner_ctx = vec![ctx[0].clone(), Expr::forall("y", Expr::pred("R", vec![Expr::Free(a.clone()), Expr::bound("y")]))];
        let w = d.assume(&inner_ctx, 1);
        let r = d.forall_elim(&w, &Expr::Free(b.clone())).unwrap();
        let e = d.exists_intro(&r, &Expr::exists("x", Expr::pred("R", vec![Expr::bound("x"), Expr::Free(b.clone())]))).unwrap();
        let c = d.exists_elim(&ex, &e, &a).unwrap();
        let all = d.forall_intro(&c, &b, &p("forall y. exists x. R(x, y)")).unwrap();
        let s = d.imp_intro(&all);
        let pr = d.finish();
        assert!(check(&pr).is_ok(), "{:?}", check(&pr));
        assert!(alpha_eq(
            &pr.steps[s.step].formula,
            &p("(exists x. forall y. R(x, y)) -> forall y. exists x. R(x, y)")
        ));
    }
}
