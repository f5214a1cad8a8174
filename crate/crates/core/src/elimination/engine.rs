//! Elimination of critical formulas, one critical ε-term at a time.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use serde::Serialize;

use super::expansion::Expansion;
use super::hyperexp::{hyperexp_with, HyperExp, DEFAULT_MAX_BITS};
use crate::error::{EliminationError, KernelError};
use crate::kernel::{
    case_combine, check, critical_terms, critical_witness, dedup, deduction, is_critical_for,
    is_tautology, metrics_with, negated_conjunction, taut, Calculus, CriticalTerm, Justification,
    Metrics, Proof,
};
use crate::syntax::{
    alpha_eq, canonical, fresh_name, maximal_eps_subterms, replace_eps, replace_eps_many, Expr,
    Measures, Name,
};

/// Bookkeeping for one elimination round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub term: String,
    pub rank: usize,
    pub degree: usize,
    /// Number of critical formulas belonging to the term.
    pub width: usize,
    pub cc_before: usize,
    pub cc_after: usize,
    pub rank_before: usize,
    pub rank_after: usize,
    pub degree_before: usize,
    pub degree_after: usize,
    pub order_before: usize,
    pub order_after: usize,
    pub width_before: usize,
    pub width_after: usize,
    /// Length of the expansion before and after the round.
    pub expansion_before: usize,
    pub expansion_after: usize,
    pub size_after: usize,
}

impl RoundRecord {
    /// The per-round guarantees; returns a description of the first one that
    /// fails.
    pub fn violated_bound(&self) -> Option<String> {
        let n1 = self.width + 1;
        let checks = [
            (self.order_after + 1 == self.order_before, "order drops by exactly one"),
            (self.rank_after <= self.rank_before, "rank does not increase"),
            (
                self.rank_after < self.rank_before || self.degree_after <= self.degree_before,
                "degree at the active rank does not increase",
            ),
            (self.cc_after <= self.cc_before * n1, "cc grows at most by the factor n+1"),
            (
                self.rank_after < self.rank_before
                    || self.width_after <= self.width_before * n1,
                "width grows at most by the factor n+1",
            ),
            (n1 <= self.width_before, "n+1 is at most the width at the active rank"),
            (
                self.expansion_after <= self.expansion_before * n1,
                "expansion grows at most by the factor n+1",
            ),
        ];
        checks.iter().find(|(ok, _)| !ok).map(|(_, m)| m.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EliminationTrace {
    pub rounds: Vec<RoundRecord>,
    /// Number of rank sweeps performed.
    pub sweeps: usize,
}

/// Result of the full elimination: an ε-free expansion with its proof.
#[derive(Clone, Debug)]
pub struct HerbrandDisjunction {
    pub expansion: Expansion,
    /// Proof of the disjunction in the calculus without ε.
    pub proof: Proof,
    /// Critical count of the input proof.
    pub cc: usize,
    /// `2_{2k}^{3k}` for `k = cc`.
    pub bound: HyperExp,
    pub trace: EliminationTrace,
    /// Outcome of the final tautology check (`None` for proofs with
    /// hypotheses, whose end formula need not be a tautology).
    pub tautology: Option<bool>,
}

impl HerbrandDisjunction {
    pub fn length(&self) -> usize {
        self.expansion.length()
    }

    pub fn within_bound(&self) -> bool {
        self.bound.at_least(&BigUint::from(self.length()))
    }

    pub fn certificate(&self) -> crate::document::HerbrandCertificate {
        crate::document::HerbrandCertificate {
            matrix: self.expansion.matrix.clone(),
            params: self.expansion.params.clone(),
            rows: self.expansion.rows.clone(),
            cc: Some(self.cc),
            bound: Some(self.bound.to_string()),
            tautology: self.tautology,
        }
    }
}

/// The elimination engine. Holds the degree/rank memo table across rounds.
pub struct Engine {
    measures: Measures,
    /// Run the full proof checker after every round.
    pub verify: bool,
    /// Rewrite each intermediate proof to its critical formulas plus one
    /// tautology (same critical formulas, far fewer steps).
    pub compress: bool,
    /// Size ceiling (in bits) for exact evaluation of the length bound.
    pub max_bits: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            measures: Measures::new(),
            verify: true,
            compress: true,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn metrics(&mut self, p: &Proof) -> Metrics {
        metrics_with(p, &mut self.measures)
    }

    /// A critical ε-term of maximal rank and, among those, maximal degree;
    /// ties go to the term whose first critical formula comes first.
    pub fn select_target(&mut self, p: &Proof) -> Result<CriticalTerm, EliminationError> {
        let terms = critical_terms(p, &mut self.measures);
        let mut best: Option<CriticalTerm> = None;
        for t in terms {
            let better = match &best {
                None => true,
                Some(b) => (t.rank, t.degree) > (b.rank, b.degree),
            };
            if better {
                best = Some(t);
            }
        }
        best.ok_or(EliminationError::NothingToEliminate)
    }

    /// One round: removes all critical formulas belonging to `e`. `p` must
    /// prove `exp.disjunction()`; the result proves the refined expansion.
    pub fn eliminate_term(
        &mut self,
        p: &Proof,
        e: &Expr,
        exp: &Expansion,
    ) -> Result<(Proof, Expansion, RoundRecord), EliminationError> {
        if exp.matrix.has_eps() || exp.matrix.has_quantifier() {
            return Err(EliminationError::InMatrix(e.to_string()));
        }
        let end = p.end().ok_or(EliminationError::NothingToEliminate)?;
        if !alpha_eq(end, &exp.disjunction()) {
            return Err(EliminationError::MatrixMismatch {
                matrix: exp.matrix.to_string(),
                end: end.to_string(),
            });
        }
        let target = self.select_target(p)?;
        let terms = critical_terms(p, &mut self.measures);
        let Some(ct) = terms.into_iter().find(|t| alpha_eq(&t.term, e)) else {
            return Err(EliminationError::NotMaximal(e.to_string()));
        };
        if (ct.rank, ct.degree) != (target.rank, target.degree) {
            return Err(EliminationError::NotMaximal(e.to_string()));
        }
        let before = self.metrics(p);

        // witnesses t_i and hypotheses A(t_i); vacuous critical formulas
        // (x not free in A) are tautologies and need no branch
        let mut ts = Vec::new();
        let mut hyps = Vec::new();
        for f in &ct.formulas {
            if let Some(t) = critical_witness(f, &ct.term) {
                ts.push(t);
                hyps.push(f.as_imp().unwrap().0.clone());
            }
        }
        let mut next = exp.refine(&ct.term, &ts);
        let goal = next.disjunction();

        let mut branches = Vec::with_capacity(ts.len());
        for (t, h) in ts.iter().zip(&hyps) {
            let q = branch(p, &ct.term, Some(t), Some(h))?;
            branches.push(discharge(&q, h, &goal)?);
        }
        let rest = if hyps.is_empty() {
            let mut q = branch(p, &ct.term, None, None)?;
            let last = q.size() - 1;
            q.taut_mp(last, goal.clone());
            q
        } else {
            let n = negated_conjunction(&hyps);
            discharge(&branch(p, &ct.term, None, Some(&n))?, &n, &goal)?
        };
        let mut out = dedup(&case_combine(&branches, &rest)?);
        if next.dedup() {
            let last = out.size() - 1;
            out.taut_mp(last, next.disjunction());
        }
        if self.compress {
            out = compress(&out);
        }
        if self.verify {
            check(&out).into_result()?;
        }
        let after = self.metrics(&out);
        let r = ct.rank;
        let rec = RoundRecord {
            term: ct.term.to_string(),
            rank: r,
            degree: ct.degree,
            width: ct.width,
            cc_before: before.cc,
            cc_after: after.cc,
            rank_before: before.rank,
            rank_after: after.rank,
            degree_before: before.degree_at(r),
            degree_after: after.degree_at(r),
            order_before: before.order_at(r),
            order_after: after.order_at(r),
            width_before: before.width_at(r),
            width_after: after.width_at(r),
            expansion_before: exp.length(),
            expansion_after: next.length(),
            size_after: out.size(),
        };
        Ok((out, next, rec))
    }

    /// Eliminates every critical ε-term of the maximal rank, in
    /// degree-non-increasing order.
    pub fn eliminate_rank(
        &mut self,
        p: &Proof,
        exp: &Expansion,
    ) -> Result<(Proof, Expansion, Vec<RoundRecord>), EliminationError> {
        let first = self.select_target(p)?;
        let r = first.rank;
        let (mut p, mut exp) = (p.clone(), exp.clone());
        let mut rounds = Vec::new();
        loop {
            let t = match self.select_target(&p) {
                Ok(t) if t.rank == r => t,
                Ok(_) | Err(EliminationError::NothingToEliminate) => break,
                Err(e) => return Err(e),
            };
            let (q, x, rec) = self.eliminate_term(&p, &t.term, &exp)?;
            p = q;
            exp = x;
            rounds.push(rec);
        }
        Ok((p, exp, rounds))
    }

    /// Eliminates all critical formulas of an ε-calculus proof of
    /// `E(s₁…s_m)` and returns the resulting Herbrand disjunction. With no
    /// explicit matrix, the outermost ε-terms of the end formula are
    /// abstracted.
    pub fn extract_herbrand(
        &mut self,
        p: &Proof,
        matrix: Option<(&Expr, &[Name])>,
    ) -> Result<HerbrandDisjunction, EliminationError> {
        if p.calculus.allows_quantifiers() {
            return Err(KernelError::Calculus(format!(
                "elimination needs an ε-calculus proof, got {}",
                p.calculus
            ))
            .into());
        }
        check(p).into_result()?;
        let end = p.end().ok_or(EliminationError::NothingToEliminate)?.clone();
        let mut exp = match matrix {
            Some((m, params)) => Expansion::decompose(m, params, &end)?,
            None => Expansion::infer(&end),
        };
        let k = self.metrics(p).cc as u64;
        let mut cur = p.clone();
        if !alpha_eq(&end, &exp.disjunction()) || self.compress {
            // normalize the end formula to the expansion's disjunction
            let last = cur.size() - 1;
            cur.taut_mp(last, exp.disjunction());
            if self.compress {
                cur = compress(&cur);
            }
        }
        let mut trace = EliminationTrace::default();
        while self.metrics(&cur).rank > 0 {
            let (q, x, rounds) = self.eliminate_rank(&cur, &exp)?;
            cur = q;
            exp = x;
            trace.rounds.extend(rounds);
            trace.sweeps += 1;
        }
        let (proof, expansion) = free_remaining_eps(&cur, &exp);
        if self.verify {
            check(&proof).into_result()?;
        }
        let disj = expansion.disjunction();
        let tautology = if proof.hypotheses.is_empty() {
            let ok = is_tautology(&disj).map_err(EliminationError::Kernel)?;
            if !ok {
                return Err(EliminationError::NotTautology);
            }
            Some(true)
        } else {
            None
        };
        Ok(HerbrandDisjunction {
            expansion,
            proof,
            cc: k as usize,
            bound: hyperexp_with(2 * k, BigUint::from(3 * k), self.max_bits),
            trace,
            tautology,
        })
    }
}

/// Copy of `p` with `e` replaced by `t` (or, for `t = None`, left in place),
/// where the critical formulas belonging to `e` are derived from the
/// hypothesis `h` by a tautology and modus ponens. `h` may only be `None`
/// if every critical formula of `e` is vacuous.
fn branch(
    p: &Proof,
    e: &Expr,
    t: Option<&Expr>,
    h: Option<&Expr>,
) -> Result<Proof, EliminationError> {
    let sub = |f: &Expr| match t {
        Some(t) => replace_eps(f, e, t),
        None => f.clone(),
    };
    let mut q = Proof::new(p.calculus);
    q.hypotheses = p.hypotheses.clone();
    let mut hyp_step: Option<usize> = None;
    let mut map = Vec::with_capacity(p.size());
    for s in &p.steps {
        let f = sub(&s.formula);
        let k = match &s.just {
            Justification::Critical(c) if alpha_eq(c, e) => {
                if critical_witness(&s.formula, e).is_none() {
                    // A -> A with x vacuous
                    q.push(f, Justification::Tautology)
                } else {
                    let hs = match hyp_step {
                        Some(i) => i,
                        None => {
                            let h = h.expect("hypothesis for a non-vacuous critical formula");
                            let label = q.add_hypothesis(h);
                            let i = q.push(h.clone(), Justification::Hypothesis(label));
                            hyp_step = Some(i);
                            i
                        }
                    };
                    q.taut_mp(hs, f)
                }
            }
            Justification::Critical(c) => {
                let c2 = sub(c);
                if t.is_some() && !is_critical_for(&f, &c2) {
                    return Err(KernelError::Invalid(format!(
                        "replacing {e} turned the critical formula {} into {f}, which is not critical",
                        s.formula
                    ))
                    .into());
                }
                q.push(f, Justification::Critical(c2))
            }
            j => q.push(f, j.remap(|i| map[i])),
        };
        map.push(k);
    }
    // keep the end formula last
    let last = *map.last().unwrap();
    if last + 1 != q.size() {
        let f = q.steps[last].formula.clone();
        q.taut_mp(last, f);
    }
    Ok(q)
}

/// Deduction on `h`, then weakening to `h -> goal`.
fn discharge(q: &Proof, h: &Expr, goal: &Expr) -> Result<Proof, EliminationError> {
    let mut d = deduction(q, h)?;
    let target = Expr::imp(h.clone(), goal.clone());
    if !alpha_eq(d.end().unwrap(), &target) {
        let last = d.size() - 1;
        d.taut_mp(last, target);
    }
    Ok(d)
}

/// Rewrites an ε-calculus proof to: its distinct critical formulas and
/// hypotheses, one tautology, and modus ponens. Falls back to `p` if the
/// proof has generalizations or quantifier axioms.
pub fn compress(p: &Proof) -> Proof {
    if p.steps.iter().any(|s| {
        matches!(
            s.just,
            Justification::GenForall(..)
                | Justification::GenExists(..)
                | Justification::ExistsAxiom
                | Justification::ForallAxiom
        )
    }) {
        return p.clone();
    }
    let Some(end) = p.end() else { return p.clone() };
    let mut out = Proof::new(p.calculus);
    out.hypotheses = p.hypotheses.clone();
    let mut seen: HashMap<Expr, ()> = HashMap::new();
    let mut prem = Vec::new();
    for s in &p.steps {
        if matches!(s.just, Justification::Critical(_) | Justification::Hypothesis(_))
            && seen.insert(canonical(&s.formula), ()).is_none()
        {
            prem.push(out.push(s.formula.clone(), s.just.clone()));
        }
    }
    let fs: Vec<Expr> = prem.iter().map(|&i| out.steps[i].formula.clone()).collect();
    let t = Expr::imp_chain(&fs, end.clone());
    if !taut::is_valid(&t) {
        return p.clone();
    }
    let mut cur = out.push(t, Justification::Tautology);
    for i in prem {
        cur = out.mp(i, cur);
    }
    if out.size() < p.size() {
        out
    } else {
        p.clone()
    }
}

/// Replaces the remaining (non-critical) outermost ε-terms by fresh free
/// variables, α-equivalent terms by the same variable.
fn free_remaining_eps(p: &Proof, exp: &Expansion) -> (Proof, Expansion) {
    let mut used: BTreeSet<Name> = BTreeSet::new();
    let mut terms: Vec<Expr> = Vec::new();
    let mut seen: HashMap<Expr, ()> = HashMap::new();
    for s in &p.steps {
        used.extend(s.formula.free_vars());
        for e in maximal_eps_subterms(&s.formula) {
            if seen.insert(canonical(&e), ()).is_none() {
                terms.push(e);
            }
        }
    }
    for t in exp.rows.iter().flatten() {
        used.extend(t.free_vars());
    }
    used.extend(exp.params.iter().cloned());
    let mut pairs = Vec::with_capacity(terms.len());
    for e in terms {
        let b = fresh_name("b", &used);
        used.insert(b.clone());
        pairs.push((e, Expr::Free(b)));
    }
    let mut proof = p.map_formulas(|f| replace_eps_many(f, &pairs));
    if !proof.steps.iter().any(|s| s.formula.has_eps()) {
        proof.calculus = Calculus::Ec;
    }
    let expansion = exp.map_terms(|t| replace_eps_many(t, &pairs));
    (proof, expansion)
}
