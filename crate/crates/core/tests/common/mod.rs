//! Seeded corpus generators shared by the integration tests.
#![allow(dead_code)]

use epsilon_core::elimination::Expansion;
use epsilon_core::herbrand::{herbrand_to_pc, HerbrandForm};
use epsilon_core::kernel::{check, is_tautology, Calculus, Deriver, Justification, Proof};
use epsilon_core::parser::{parse_formula, parse_term};
use epsilon_core::syntax::instantiate;
use epsilon_core::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn b(x: &str) -> Expr {
    Expr::bound(x)
}

// ---------------------------------------------------------------------------
// Formulas

/// Random formulas over `P/1, Q/1, R/2`, the free variables `c, d` and `f/1`.
pub struct FormulaGen<'a, R: Rng> {
    pub rng: &'a mut R,
    /// Allow closed ε-terms as terms.
    pub eps: bool,
}

impl<R: Rng> FormulaGen<'_, R> {
    /// A closed term; `εz …` bodies are quantifier-free.
    pub fn term(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..6) {
            0 | 1 => Expr::free("c"),
            2 => Expr::free("d"),
            3 if depth > 0 => Expr::func("f", vec![self.term(depth - 1)]),
            4 if self.eps && depth > 0 => {
                let body = self.atom_over(Some("z"), depth - 1);
                Expr::eps("z", self.ensure(body, "z"))
            }
            _ => Expr::free("c"),
        }
    }

    fn slot(&mut self, x: Option<&str>, depth: u32) -> Expr {
        match x {
            Some(x) if self.rng.gen_bool(0.6) => b(x),
            _ => self.term(depth),
        }
    }

    /// An atom whose term slots may be `x`.
    pub fn atom_over(&mut self, x: Option<&str>, depth: u32) -> Expr {
        match self.rng.gen_range(0..3) {
            0 => Expr::pred("P", vec![self.slot(x, depth)]),
            1 => Expr::pred("Q", vec![self.slot(x, depth)]),
            _ => {
                let (s, t) = (self.slot(x, depth), self.slot(x, depth));
                Expr::pred("R", vec![s, t])
            }
        }
    }

    /// Quantifier-free formula over `x`.
    pub fn qf(&mut self, x: Option<&str>, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.atom_over(x, depth.min(1));
        }
        match self.rng.gen_range(0..4) {
            0 => Expr::not(self.qf(x, depth - 1)),
            1 => Expr::and(self.qf(x, depth - 1), self.qf(x, depth - 1)),
            2 => Expr::or(self.qf(x, depth - 1), self.qf(x, depth - 1)),
            _ => Expr::imp(self.qf(x, depth - 1), self.qf(x, depth - 1)),
        }
    }

    /// Makes sure `x` occurs in `f`.
    pub fn ensure(&mut self, f: Expr, x: &str) -> Expr {
        if f.contains_unbound(x) {
            f
        } else {
            Expr::or(f, Expr::pred("P", vec![b(x)]))
        }
    }

    /// A closed quantified formula binding `y` (never nested around `x`).
    pub fn closed_quantified(&mut self) -> Expr {
        let body = self.qf(Some("y"), 1);
        let body = self.ensure(body, "y");
        if self.rng.gen_bool(0.5) {
            Expr::forall("y", body)
        } else {
            Expr::exists("y", body)
        }
    }

    /// A body `A(x)`: `x` occurs only outside inner binders, so instances
    /// at ε-terms stay rectified.
    pub fn body(&mut self, x: &str) -> Expr {
        let m = self.qf(Some(x), 2);
        let m = self.ensure(m, x);
        if self.rng.gen_bool(0.25) {
            let q = self.closed_quantified();
            if self.rng.gen_bool(0.5) {
                Expr::or(m, q)
            } else {
                Expr::and(q, m)
            }
        } else {
            m
        }
    }

    pub fn closed(&mut self) -> Expr {
        match self.rng.gen_range(0..4) {
            0 => self.closed_quantified(),
            1 => {
                let body = self.body("x");
                Expr::exists("x", body)
            }
            _ => self.qf(None, 2),
        }
    }
}

// ---------------------------------------------------------------------------
// Random PC_ε proofs

/// A checking PC_ε proof of at most `max_steps` steps, built from random
/// axioms, critical formulas, modus ponens and generalizations.
pub fn random_pc_eps_proof<R: Rng>(rng: &mut R, max_steps: usize) -> Proof {
    let mut p = Proof::new(Calculus::PcEps);
    let mut eigen = 0usize;
    // premises of generalizations mention their eigenvariable: never reused
    let mut retired: Vec<usize> = Vec::new();
    while p.size() + 3 <= max_steps {
        let usable: Vec<usize> = (0..p.size()).filter(|i| !retired.contains(i)).collect();
        let mut g = FormulaGen { rng: &mut *rng, eps: true };
        let op = g.rng.gen_range(0..8);
        match op {
            0 => {
                let f = g.closed();
                p.push(Expr::or(f.clone(), Expr::not(f)), Justification::Tautology);
            }
            1 => {
                let a = g.body("x");
                let t = g.term(2);
                p.push(Expr::imp(instantiate(&a, "x", &t), Expr::exists("x", a)), Justification::ExistsAxiom);
            }
            2 => {
                let a = g.body("x");
                let t = g.term(2);
                p.push(Expr::imp(Expr::forall("x", a.clone()), instantiate(&a, "x", &t)), Justification::ForallAxiom);
            }
            3 => {
                let a = g.body("x");
                let t = g.term(2);
                let e = Expr::eps("x", a.clone());
                p.push(
                    Expr::imp(instantiate(&a, "x", &t), instantiate(&a, "x", &e)),
                    Justification::Critical(e),
                );
            }
            4 if !usable.is_empty() => {
                // weaken an earlier step
                let i = usable[g.rng.gen_range(0..usable.len())];
                let extra = g.closed();
                let f = p.steps[i].formula.clone();
                p.taut_mp(i, Expr::or(f, extra));
            }
            5 if usable.len() > 1 => {
                // conjoin two earlier steps
                let i = usable[g.rng.gen_range(0..usable.len())];
                let j = usable[g.rng.gen_range(0..usable.len())];
                let (fi, fj) = (p.steps[i].formula.clone(), p.steps[j].formula.clone());
                let goal = Expr::and(fi.clone(), fj.clone());
                let t = p.push(Expr::imp(fi, Expr::imp(fj, goal)), Justification::Tautology);
                let m = p.mp(i, t);
                p.mp(j, m);
            }
            6 => {
                // G -> C(a) ⊢ G -> ∀x C(x)
                eigen += 1;
                let a = format!("a_{eigen}");
                let h = g.body("x");
                let c = Expr::or(h.clone(), Expr::not(h));
                let side = g.closed();
                let inst = instantiate(&c, "x", &Expr::free(&a));
                let i = p.push(Expr::imp(side.clone(), inst), Justification::Tautology);
                retired.push(i);
                p.push(Expr::imp(side, Expr::forall("x", c)), Justification::GenForall(i, a.as_str().into()));
            }
            7 => {
                // C(a) -> G ⊢ ∃x C(x) -> G
                eigen += 1;
                let a = format!("a_{eigen}");
                let h = g.body("x");
                // the side formula ends up under ∃x: it must not bind x
                let side = if g.rng.gen_bool(0.5) { g.closed_quantified() } else { g.qf(None, 2) };
                let c = Expr::and(side.clone(), h);
                let inst = instantiate(&c, "x", &Expr::free(&a));
                let i = p.push(Expr::imp(inst, side.clone()), Justification::Tautology);
                retired.push(i);
                p.push(Expr::imp(Expr::exists("x", c), side), Justification::GenExists(i, a.as_str().into()));
            }
            _ => {}
        }
    }
    let rep = check(&p);
    assert!(rep.is_ok(), "generator produced a bad proof: {:?}", rep.violations);
    p
}

// ---------------------------------------------------------------------------
// EC_ε proofs

pub struct EcCase {
    pub proof: Proof,
    pub critical: Vec<Expr>,
    pub goal: Expr,
    /// Number of distinct critical ε-terms.
    pub terms: usize,
}

/// A quantifier-free EC_ε proof over 1–4 critical ε-terms of rank ≤ 2:
/// critical formulas, one tautology and modus ponens.
pub fn random_ec_eps_case<R: Rng>(rng: &mut R) -> EcCase {
    let n_terms = rng.gen_range(1..=4);
    let mut terms: Vec<(Expr, Expr, &str)> = Vec::new(); // (ε-term, body, var)
    let mut g = FormulaGen { rng: &mut *rng, eps: false };
    while terms.len() < n_terms {
        let kind = g.rng.gen_range(0..4);
        let (body, x) = match kind {
            // rank 2: εx A(x, εz B(x, z))
            0 => {
                let inner = Expr::eps("z", Expr::pred("R", vec![b("x"), b("z")]));
                let pred = if g.rng.gen_bool(0.5) { "P" } else { "Q" };
                let a = Expr::or(Expr::pred(pred, vec![inner]), g.atom_over(Some("x"), 1));
                (a, "x")
            }
            // degree 2: εx A(x, e) with e a closed ε-term
            1 if !terms.is_empty() => {
                let e = terms[g.rng.gen_range(0..terms.len())].0.clone();
                let a = Expr::or(g.atom_over(Some("x"), 1), Expr::pred("Q", vec![e]));
                (g.ensure(a, "x"), "x")
            }
            _ => {
                let a = g.qf(Some("x"), 2);
                (g.ensure(a, "x"), "x")
            }
        };
        let e = Expr::eps(x, body.clone());
        if terms.iter().any(|(t, _, _)| *t == e) {
            continue;
        }
        terms.push((e, body, x));
    }
    let mut critical = Vec::new();
    for (e, body, x) in &terms {
        let width = g.rng.gen_range(1..=2);
        for _ in 0..width {
            let t = match g.rng.gen_range(0..3) {
                0 => Expr::free("c"),
                1 => Expr::free("d"),
                _ => Expr::func("f", vec![Expr::free("c")]),
            };
            let cf = Expr::imp(instantiate(body, x, &t), instantiate(body, x, e));
            if !critical.contains(&cf) {
                critical.push(cf);
            }
        }
    }
    // a tautological consequence of the critical formulas
    let parts: Vec<Expr> = critical
        .iter()
        .map(|c| {
            let (l, r) = c.as_imp().unwrap();
            if g.rng.gen_bool(0.5) {
                Expr::or(Expr::not(l.clone()), r.clone())
            } else {
                c.clone()
            }
        })
        .collect();
    let mut goal = parts[0].clone();
    for q in &parts[1..] {
        goal = if g.rng.gen_bool(0.5) {
            Expr::and(goal, q.clone())
        } else {
            Expr::or(goal, q.clone())
        };
    }
    if g.rng.gen_bool(0.3) {
        let a = g.atom_over(None, 1);
        goal = Expr::or(goal, a);
    }
    let mut p = Proof::new(Calculus::EcEps);
    let mut steps = Vec::new();
    for c in &critical {
        let e = terms
            .iter()
            .find(|(e, body, x)| {
                let (_, r) = c.as_imp().unwrap();
                *r == instantiate(body, x, e)
            })
            .map(|(e, _, _)| e.clone())
            .unwrap();
        steps.push(p.push(c.clone(), Justification::Critical(e)));
    }
    let mut cur = p.push(Expr::imp_chain(&critical, goal.clone()), Justification::Tautology);
    for s in steps {
        cur = p.mp(s, cur);
    }
    let rep = check(&p);
    assert!(rep.is_ok(), "generator produced a bad proof: {:?}", rep.violations);
    EcCase {
        proof: p,
        critical,
        goal,
        terms: n_terms,
    }
}

// ---------------------------------------------------------------------------
// Second ε-theorem corpus

fn f(s: &str) -> Expr {
    parse_formula(s).unwrap()
}

fn t(s: &str) -> Expr {
    parse_term(s).unwrap()
}

/// Prenex theorems with a Herbrand expansion of their Herbrand normal form
/// (rows over the existentials; the introduced function symbols are
/// `f1, f2, …` in prefix order).
pub fn second_eps_theorems() -> Vec<(&'static str, Vec<Vec<&'static str>>)> {
    vec![
        ("exists x. (P(x) -> P(x))", vec![vec!["c"]]),
        ("exists x. (Q(x) | ~Q(x))", vec![vec!["d"]]),
        ("exists x. forall y. (P(x) -> P(y))", vec![vec!["c"], vec!["f1(c)"]]),
        ("exists x. forall y. (Q(y) -> Q(x))", vec![vec!["c"], vec!["f1(c)"]]),
        ("forall y. exists z. (P(y) -> P(z))", vec![vec!["f1"]]),
        ("forall y. exists z. (R(y, z) | ~R(y, z))", vec![vec!["c"]]),
        ("exists x. forall y. exists z. (R(x, y) -> R(x, z))", vec![vec!["c", "f1(c)"]]),
        ("exists x. forall y. exists z. (P(y) -> P(z))", vec![vec!["c", "f1(c)"]]),
        ("exists x. forall y. exists z. (P(x) -> P(y) | Q(z))", vec![vec!["c", "c"], vec!["f1(c)", "c"]]),
        ("exists x. forall y. exists z. (Q(z) -> Q(y) | P(x))", vec![vec!["c", "f1(c)"]]),
        ("exists x. forall y. exists z. ((Q(x) -> Q(x)) | R(y, z))", vec![vec!["c", "c"]]),
        ("exists x. forall y. exists z. (R(x, y) -> R(z, y))", vec![vec!["c", "c"]]),
        ("exists x. forall y. exists z. (P(x) & Q(y) -> Q(z))", vec![vec!["c", "f1(c)"]]),
        ("exists x. forall y. forall w. (P(x) -> P(y) & P(w))", vec![vec!["c"], vec!["f1(c)"], vec!["f2(c)"]]),
        ("forall y. exists x. forall w. (R(y, x) -> R(y, w))", vec![vec!["c"], vec!["f2(c)"]]),
        ("exists x. exists z. (P(x) -> P(z))", vec![vec!["c", "c"]]),
        ("forall y. forall w. (P(y) & Q(w) -> Q(w))", vec![vec![]]),
        ("exists x. forall y. exists z. (R(y, x) | ~R(y, z))", vec![vec!["c", "c"]]),
        ("exists x. forall y. (P(x) & Q(x) -> P(y) | ~Q(y))", vec![vec!["c"], vec!["f1(c)"]]),
        ("exists x. forall y. exists z. ((P(x) -> P(y)) | R(z, z))", vec![vec!["c", "c"], vec!["f1(c)", "c"]]),
        ("exists x. forall y. (P(f(x)) -> P(f(y)))", vec![vec!["c"], vec!["f1(c)"]]),
        ("forall y. exists z. forall w. (R(y, z) -> R(y, w))", vec![vec!["c"], vec!["f2(c)"]]),
    ]
}

/// A PC proof of the theorem, rebuilt from its Herbrand expansion.
pub fn second_eps_proof(goal: &str, rows: &[Vec<&str>]) -> (Expr, Proof) {
    let a = f(goal);
    let h = HerbrandForm::new(&a).unwrap();
    let (matrix, params) = h.open_matrix(&Default::default());
    let rows: Vec<Vec<Expr>> = rows.iter().map(|r| r.iter().map(|s| t(s)).collect()).collect();
    let exp = Expansion { matrix, params, rows };
    assert!(is_tautology(&exp.disjunction()).unwrap(), "{goal}: rows do not give a tautology");
    let mut p = herbrand_to_pc(&exp, &a).unwrap();
    p.calculus = Calculus::PcEps;
    (a, p)
}

/// PC_ε proofs that go through critical formulas.
pub fn second_eps_eps_proofs() -> Vec<Proof> {
    let mut out = Vec::new();
    for (pred, witness) in [("P", "c"), ("Q", "d"), ("P", "f(c)")] {
        let mut d = Deriver::new(Calculus::PcEps);
        let body = Expr::imp(Expr::pred(pred, vec![b("x")]), Expr::pred(pred, vec![b("x")]));
        let e = Expr::eps("x", body.clone());
        let w = t(witness);
        let taut = d.axiom(&[], instantiate(&body, "x", &w), Justification::Tautology);
        let crit = d.axiom(
            &[],
            Expr::imp(instantiate(&body, "x", &w), instantiate(&body, "x", &e)),
            Justification::Critical(e.clone()),
        );
        let at_e = d.prop(&[], &[&taut, &crit], instantiate(&body, "x", &e));
        d.exists_intro(&at_e, &Expr::exists("y", instantiate(&body, "x", &b("y")))).unwrap();
        out.push(d.finish());
    }
    out
}
