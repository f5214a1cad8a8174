//! Proof transformations: the deduction theorem, case distinction, and the
//! witness compiler that turns a set of critical formulas into a proof.

use std::collections::HashMap;

use super::proof::{critical_term, Calculus, Justification, Proof, Step};
use super::taut::{falsify, Assignment};
use crate::error::KernelError;
use crate::syntax::{alpha_eq, canonical, Expr};

/// Discharges the hypothesis `h`: from a proof of `E` using `h`, builds a
/// proof of `h -> E` that does not use `h`. Steps not depending on `h` are
/// kept unchanged; dependent steps are rebuilt with tautologies and modus
/// ponens (generalizations are routed through `h & B`).
pub fn deduction(p: &Proof, h: &Expr) -> Result<Proof, KernelError> {
    let is_h = |l: &str| p.hypothesis(l).is_some_and(|f| alpha_eq(f, h));
    for s in &p.steps {
        if let Justification::GenForall(_, a) | Justification::GenExists(_, a) = &s.just {
            if h.contains_free(a) {
                return Err(KernelError::EigenvariableInHypothesis(a.to_string()));
            }
        }
    }
    let mut out = Proof::new(p.calculus);
    out.hypotheses = p
        .hypotheses
        .iter()
        .filter(|(_, f)| !alpha_eq(f, h))
        .cloned()
        .collect();
    // for each original step: (index in `out`, whether it proves `h -> A`)
    let mut map: Vec<(usize, bool)> = Vec::with_capacity(p.steps.len());
    let wrap = |a: &Expr| Expr::imp(h.clone(), a.clone());

    for s in &p.steps {
        let a = &s.formula;
        let entry = match &s.just {
            Justification::Hypothesis(l) if is_h(l) => {
                (out.push(wrap(h), Justification::Tautology), true)
            }
            Justification::ModusPonens(i, j) if map[*i].1 || map[*j].1 => {
                let (ii, di) = map[*i];
                let (jj, dj) = map[*j];
                let fi = p.steps[*i].formula.clone();
                let fj = p.steps[*j].formula.clone();
                let target = wrap(a);
                let t = match (di, dj) {
                    (true, true) => Expr::imp(wrap(&fi), Expr::imp(wrap(&fj), target.clone())),
                    (false, true) => Expr::imp(fi, Expr::imp(wrap(&fj), target.clone())),
                    (true, false) => Expr::imp(fj, Expr::imp(wrap(&fi), target.clone())),
                    (false, false) => unreachable!(),
                };
                let t = out.push(t, Justification::Tautology);
                let (first, second) = if di && !dj { (jj, ii) } else { (ii, jj) };
                let m1 = out.mp(first, t);
                (out.mp(second, m1), true)
            }
            Justification::GenForall(i, a_var) if map[*i].1 => {
                // h -> (B -> C(a))  ⊢  (h & B) -> C(a)  ⊢  (h & B) -> ∀x C(x)
                let (Some((b, _)), Some((_, q))) =
                    (p.steps[*i].formula.as_imp(), a.as_imp())
                else {
                    return Err(KernelError::Invalid("malformed generalization".into()));
                };
                let (prem, _) = map[*i];
                let c_a = p.steps[*i].formula.as_imp().unwrap().1.clone();
                let hb = Expr::and(h.clone(), b.clone());
                let s1 = out.taut_mp(prem, Expr::imp(hb.clone(), c_a));
                let s2 = out.push(
                    Expr::imp(hb, q.clone()),
                    Justification::GenForall(s1, a_var.clone()),
                );
                (out.taut_mp(s2, wrap(a)), true)
            }
            Justification::GenExists(i, a_var) if map[*i].1 => {
                // h -> (B(a) -> C)  ⊢  B(a) -> (h -> C)  ⊢  ∃x B(x) -> (h -> C)
                let (Some((b_a, c)), Some((ex, _))) =
                    (p.steps[*i].formula.as_imp(), a.as_imp())
                else {
                    return Err(KernelError::Invalid("malformed generalization".into()));
                };
                let (prem, _) = map[*i];
                let s1 = out.taut_mp(prem, Expr::imp(b_a.clone(), wrap(c)));
                let s2 = out.push(
                    Expr::imp(ex.clone(), wrap(c)),
                    Justification::GenExists(s1, a_var.clone()),
                );
                (out.taut_mp(s2, wrap(a)), true)
            }
            j => {
                let just = j.remap(|i| map[i].0);
                (out.push(a.clone(), just), false)
            }
        };
        map.push(entry);
    }
    let goal = p
        .end()
        .ok_or_else(|| KernelError::Other("empty proof".into()))?;
    let (last, dep) = *map.last().unwrap();
    if !dep {
        out.taut_mp(last, wrap(goal));
    }
    Ok(out)
}

/// Appends `end -> target` (which must be a tautology) and modus ponens.
pub fn weaken(p: &mut Proof, target: Expr) -> usize {
    let last = p.steps.len() - 1;
    p.taut_mp(last, target)
}

/// Case distinction. `branches[i]` proves `A_i -> E`, `rest` proves
/// `(~A_1 & ... & ~A_n) -> E`; the result proves `E`. With no branches,
/// `rest` is returned unchanged.
pub fn case_combine(branches: &[Proof], rest: &Proof) -> Result<Proof, KernelError> {
    if branches.is_empty() {
        return Ok(rest.clone());
    }
    let cal = branches.iter().fold(rest.calculus, |c, b| c.join(b.calculus));
    let Some((_, e)) = rest.end().and_then(|f| f.as_imp()) else {
        return Err(KernelError::Other("case proof must end in an implication".into()));
    };
    let e = e.clone();
    let mut out = Proof::new(cal);
    let mut ends = Vec::new();
    let mut eigen: Vec<crate::syntax::Name> = Vec::new();
    for b in branches.iter().chain(std::iter::once(rest)) {
        for s in &b.steps {
            if let Justification::GenForall(_, a) | Justification::GenExists(_, a) = &s.just {
                if eigen.contains(a) {
                    return Err(KernelError::Other(format!(
                        "eigenvariable {a} used in two case branches"
                    )));
                }
                eigen.push(a.clone());
            }
        }
        let end = b
            .end()
            .ok_or_else(|| KernelError::Other("empty case proof".into()))?;
        match end.as_imp() {
            Some((_, c)) if alpha_eq(c, &e) => {}
            _ => {
                return Err(KernelError::Other(format!(
                    "case proof ends in {end}, expected an implication with consequent {e}"
                )))
            }
        }
        let off = out.append(b);
        ends.push(off + b.steps.len() - 1);
    }
    let premises: Vec<Expr> = ends.iter().map(|&i| out.steps[i].formula.clone()).collect();
    let t = out.push(Expr::imp_chain(&premises, e), Justification::Tautology);
    let mut cur = t;
    for &i in &ends {
        cur = out.mp(i, cur);
    }
    Ok(out)
}

/// `~A_1 & ... & ~A_n`.
pub fn negated_conjunction(items: &[Expr]) -> Expr {
    let negs: Vec<Expr> = items.iter().map(|a| Expr::not(a.clone())).collect();
    Expr::conj(&negs)
}

/// Builds an ε-calculus proof of `goal` from the given critical formulas and
/// a single tautology, or returns a falsifying assignment if
/// `C_1 -> ... -> C_n -> goal` is not a tautology.
pub fn compile_witness(critical: &[Expr], goal: &Expr) -> Result<Proof, Assignment> {
    let mut crits: Vec<Expr> = Vec::new();
    let mut seen: HashMap<Expr, ()> = HashMap::new();
    for c in critical {
        if seen.insert(canonical(c), ()).is_none() {
            crits.push(c.clone());
        }
    }
    let taut = Expr::imp_chain(&crits, goal.clone());
    if let Some(a) = falsify(&taut) {
        return Err(a);
    }
    let mut p = Proof::new(if crits.is_empty() && !goal.has_eps() {
        Calculus::Ec
    } else {
        Calculus::EcEps
    });
    let mut idx = Vec::new();
    for c in &crits {
        let e = critical_term(c).unwrap_or_else(|| panic!("not a critical formula: {c}"));
        idx.push(p.push(c.clone(), Justification::Critical(e)));
    }
    let mut cur = p.push(taut, Justification::Tautology);
    for i in idx {
        cur = p.mp(i, cur);
    }
    Ok(p)
}

/// Removes repeated steps (α-equal formulas), keeping the first occurrence
/// and redirecting premise references.
pub fn dedup(p: &Proof) -> Proof {
    let mut out = Proof::new(p.calculus);
    out.hypotheses = p.hypotheses.clone();
    let mut first: HashMap<Expr, usize> = HashMap::new();
    let mut map = Vec::with_capacity(p.steps.len());
    let n = p.steps.len();
    for (k, s) in p.steps.iter().enumerate() {
        let key = canonical(&s.formula);
        // the end formula must stay last
        if k + 1 < n {
            if let Some(&i) = first.get(&key) {
                map.push(i);
                continue;
            }
        }
        let idx = out.steps.len();
        out.steps.push(Step {
            formula: s.formula.clone(),
            just: s.just.remap(|i| map[i]),
        });
        first.entry(key).or_insert(idx);
        map.push(idx);
    }
    out
}
