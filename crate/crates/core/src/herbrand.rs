//! Herbrand normal forms, the second ε-theorem pipeline, and the
//! reconstruction of predicate-calculus proofs from Herbrand disjunctions.

use std::collections::{BTreeSet, HashMap};

use crate::elimination::{match_row, Engine, Expansion};
use crate::embedding::embed_proof;
use crate::error::HerbrandError;
use crate::kernel::{check, is_tautology, Calculus, Deriver, Justification, Proof, Sequent};
use crate::syntax::{alpha_eq, fresh_name, instantiate, Expr, Name, Signature};

/// A prenex formula `Q₁x₁…Qₙxₙ B` split into its prefix and matrix.
#[derive(Clone, Debug)]
pub struct Prenex {
    /// `(universal?, variable)` per prefix position, outermost first.
    pub prefix: Vec<(bool, Name)>,
    /// Quantifier-free; the prefix variables occur as bound variables.
    pub matrix: Expr,
}

impl Prenex {
    pub fn split(a: &Expr) -> Result<Self, HerbrandError> {
        let mut prefix = Vec::new();
        let mut cur = a;
        loop {
            match cur {
                Expr::Forall(x, b) => {
                    prefix.push((true, x.clone()));
                    cur = b;
                }
                Expr::Exists(x, b) => {
                    prefix.push((false, x.clone()));
                    cur = b;
                }
                _ => break,
            }
        }
        let distinct: BTreeSet<&Name> = prefix.iter().map(|(_, x)| x).collect();
        if cur.has_quantifier() || distinct.len() != prefix.len() {
            return Err(HerbrandError::NotPrenex(a.to_string()));
        }
        Ok(Prenex {
            prefix,
            matrix: cur.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// `Q_{k+1}x_{k+1}…Qₙxₙ B` with `x₁…x_k` instantiated by `vals`.
    pub fn suffix(&self, vals: &[Expr]) -> Expr {
        let k = vals.len();
        let mut f = self.matrix.clone();
        for (univ, x) in self.prefix[k..].iter().rev() {
            f = if *univ {
                Expr::Forall(x.clone(), f.into())
            } else {
                Expr::Exists(x.clone(), f.into())
            };
        }
        for ((_, x), t) in self.prefix.iter().zip(vals) {
            f = instantiate(&f, x, t);
        }
        f
    }
}

/// The Herbrand normal form of a prenex formula: each universal variable is
/// replaced by a fresh function symbol applied to the existential variables
/// that precede it.
#[derive(Clone, Debug)]
pub struct HerbrandForm {
    pub source: Prenex,
    /// Per prefix position: for universals the new symbol and the positions
    /// of the preceding existentials.
    pub skolem: Vec<Option<(Name, Vec<usize>)>>,
    /// Matrix with universals replaced (existentials still bound).
    pub matrix: Expr,
}

impl HerbrandForm {
    pub fn new(a: &Expr) -> Result<Self, HerbrandError> {
        let source = Prenex::split(a)?;
        let mut sig = Signature::from_exprs([a]).map_err(|e| HerbrandError::Shape(e.to_string()))?;
        let mut skolem = Vec::with_capacity(source.len());
        let mut matrix = source.matrix.clone();
        let mut exist: Vec<usize> = Vec::new();
        for (k, (univ, x)) in source.prefix.iter().enumerate() {
            if *univ {
                let f = sig.fresh_func("f", exist.len());
                let args: Vec<Expr> = exist.iter().map(|&j| Expr::Bound(source.prefix[j].1.clone())).collect();
                matrix = instantiate(&matrix, x, &Expr::Func(f.clone(), args.into()));
                skolem.push(Some((f, exist.clone())));
            } else {
                exist.push(k);
                skolem.push(None);
            }
        }
        Ok(HerbrandForm {
            source,
            skolem,
            matrix,
        })
    }

    pub fn symbols(&self) -> Vec<Name> {
        self.skolem.iter().flatten().map(|(f, _)| f.clone()).collect()
    }

    pub fn existentials(&self) -> Vec<usize> {
        (0..self.source.len()).filter(|&k| self.skolem[k].is_none()).collect()
    }

    /// The term replacing the universal at position `k`, given values for
    /// the preceding positions.
    pub fn skolem_term(&self, k: usize, vals: &[Expr]) -> Option<Expr> {
        let (f, deps) = self.skolem[k].as_ref()?;
        Some(Expr::Func(f.clone(), deps.iter().map(|&j| vals[j].clone()).collect()))
    }

    /// The existential suffix of `A^H` from position `vals.len()` on, with
    /// the earlier positions instantiated.
    pub fn suffix(&self, vals: &[Expr]) -> Expr {
        let k = vals.len();
        let mut f = self.matrix.clone();
        for j in (k..self.source.len()).rev() {
            if self.skolem[j].is_none() {
                f = Expr::Exists(self.source.prefix[j].1.clone(), f.into());
            }
        }
        for (j, t) in vals.iter().enumerate() {
            if self.skolem[j].is_none() {
                f = instantiate(&f, &self.source.prefix[j].1, t);
            }
        }
        f
    }

    pub fn formula(&self) -> Expr {
        self.suffix(&[])
    }

    /// The matrix with the existentials opened to free parameters, named
    /// away from `avoid`.
    pub fn open_matrix(&self, avoid: &BTreeSet<Name>) -> (Expr, Vec<Name>) {
        let mut used = avoid.clone();
        let mut m = self.matrix.clone();
        let mut params = Vec::new();
        for k in self.existentials() {
            let p = fresh_name("d", &used);
            used.insert(p.clone());
            m = instantiate(&m, &self.source.prefix[k].1, &Expr::Free(p.clone()));
            params.push(p);
        }
        (m, params)
    }

    /// Full instantiation of the original prefix for one row of values of
    /// the existentials.
    pub fn full_row(&self, row: &[Expr]) -> Vec<Expr> {
        let mut vals = Vec::with_capacity(self.source.len());
        let mut it = row.iter();
        for k in 0..self.source.len() {
            let v = match self.skolem_term(k, &vals) {
                Some(t) => t,
                None => it.next().expect("row length").clone(),
            };
            vals.push(v);
        }
        vals
    }
}

/// `A^H` and the function symbols it introduces (one per universal, in
/// prefix order).
pub fn herbrand_normal_form(a: &Expr) -> Result<(Expr, Vec<Name>), HerbrandError> {
    let h = HerbrandForm::new(a)?;
    Ok((h.formula(), h.symbols()))
}

/// Extends a proof of a prenex `A` to a proof of `A^H`: universals are
/// instantiated by their Herbrand terms, existentials are carried through by
/// witness elimination.
pub fn hnf_proof(p: &Proof) -> Result<Proof, HerbrandError> {
    check(p).into_result()?;
    let a = p.end().ok_or_else(|| HerbrandError::Shape("empty proof".into()))?.clone();
    let h = HerbrandForm::new(&a)?;
    if h.symbols().is_empty() {
        return Ok(p.clone());
    }
    let mut d = Deriver::extend(p.clone());
    let start = d.lift(p.size() - 1);
    let out = hnf_step(&h, &mut d, Vec::new(), start)?;
    let mut q = d.finish();
    if out.step + 1 != q.size() {
        let f = q.steps[out.step].formula.clone();
        q.taut_mp(out.step, f);
    }
    q.calculus = p.calculus;
    check(&q).into_result()?;
    Ok(q)
}

fn hnf_step(h: &HerbrandForm, d: &mut Deriver, vals: Vec<Expr>, s: Sequent) -> Result<Sequent, HerbrandError> {
    let k = vals.len();
    if k == h.source.len() {
        return Ok(d.prop(&s.ctx.clone(), &[&s], h.suffix(&vals)));
    }
    if let Some(t) = h.skolem_term(k, &vals) {
        let s2 = d.forall_elim(&s, &t)?;
        let mut v2 = vals;
        v2.push(t);
        return hnf_step(h, d, v2, s2);
    }
    let a = d.fresh("a");
    let mut v2 = vals.clone();
    v2.push(Expr::Free(a.clone()));
    let mut ctx = s.ctx.clone();
    ctx.push(h.source.suffix(&v2));
    let w = d.assume(&ctx, ctx.len() - 1);
    let inner = hnf_step(h, d, v2, w)?;
    let ex = d.exists_intro(&inner, &h.suffix(&vals))?;
    Ok(d.exists_elim(&s, &ex, &a)?)
}

/// A reconstructed proof with the Herbrand terms that were replaced by
/// fresh variables, in the order the variables were numbered.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub proof: Proof,
    pub replaced: Vec<(Expr, Name)>,
}

/// Builds a predicate-calculus proof of the prenex `a` from a tautological
/// disjunction of instances of the matrix of `a^H`.
pub fn herbrand_to_pc(exp: &Expansion, a: &Expr) -> Result<Proof, HerbrandError> {
    herbrand_to_pc_traced(exp, a).map(|r| r.proof)
}

pub fn herbrand_to_pc_traced(exp: &Expansion, a: &Expr) -> Result<Reconstruction, HerbrandError> {
    let h = HerbrandForm::new(a)?;
    let disjuncts = exp.disjuncts();
    if disjuncts.is_empty() {
        return Err(HerbrandError::Shape("empty disjunction".into()));
    }
    let mut used: BTreeSet<Name> = a.free_vars();
    for d in &disjuncts {
        used.extend(d.free_vars());
    }
    let (open, params) = h.open_matrix(&used);
    used.extend(params.iter().cloned());
    let mut rows = Vec::with_capacity(disjuncts.len());
    for d in &disjuncts {
        let r = match_row(&open, &params, d)
            .ok_or_else(|| HerbrandError::Shape(format!("{d} is not an instance of {open}")))?;
        rows.push(h.full_row(&r));
    }
    if !is_tautology(&Expr::disj(&disjuncts))? {
        return Err(HerbrandError::NotTautology);
    }

    // Herbrand terms, maximal occurrences only, ordered by symbol count
    let syms: BTreeSet<Name> = h.symbols().into_iter().collect();
    let mut terms: Vec<Expr> = Vec::new();
    for v in rows.iter().flatten() {
        collect_maximal(v, &syms, &mut terms);
    }
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by_key(|&i| (count_syms(&terms[i], &syms), i));
    let mut map: HashMap<Expr, Expr> = HashMap::new();
    let mut replaced = Vec::new();
    for &i in &order {
        let v = fresh_name("a", &used);
        used.insert(v.clone());
        map.insert(terms[i].clone(), Expr::Free(v.clone()));
        replaced.push((terms[i].clone(), v));
    }
    // a_j may only occur inside the arguments of terms numbered after j
    for (i, (t, _)) in replaced.iter().enumerate() {
        let args = t.map_children(|c| replace_terms(c, &syms, &map));
        for (j, (_, v)) in replaced.iter().enumerate().skip(i) {
            if args.contains_free(v) {
                return Err(HerbrandError::Eigenvariable(format!(
                    "{v} (term #{}) occurs in the arguments of term #{}",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    let rows: Vec<Vec<Expr>> = rows
        .iter()
        .map(|r| r.iter().map(|t| replace_terms(t, &syms, &map)).collect())
        .collect();
    let replaced_disj: Vec<Expr> = rows.iter().map(|r| h.source.suffix(r)).collect();
    if !is_tautology(&Expr::disj(&replaced_disj))? {
        return Err(HerbrandError::ReplacedNotTautology);
    }

    let mut d = Deriver::new(Calculus::Pc);
    d.reserve(used);
    let proof = reintroduce(&h.source, &rows, &mut d)?;
    let mut q = d.finish();
    if proof.step + 1 != q.size() {
        let f = q.steps[proof.step].formula.clone();
        q.taut_mp(proof.step, f);
    }
    if !alpha_eq(q.end().unwrap(), a) {
        return Err(HerbrandError::Shape(format!("reconstruction ended in {}", q.end().unwrap())));
    }
    check(&q).into_result()?;
    Ok(Reconstruction { proof: q, replaced })
}

fn collect_maximal(t: &Expr, syms: &BTreeSet<Name>, out: &mut Vec<Expr>) {
    match t {
        Expr::Func(f, _) if syms.contains(f) => {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        Expr::Func(_, args) => args.iter().for_each(|a| collect_maximal(a, syms, out)),
        _ => {}
    }
}

fn count_syms(t: &Expr, syms: &BTreeSet<Name>) -> usize {
    let mut n = 0;
    t.walk(&mut |e| {
        if let Expr::Func(f, _) = e {
            n += syms.contains(f) as usize;
        }
    });
    n
}

fn replace_terms(t: &Expr, syms: &BTreeSet<Name>, map: &HashMap<Expr, Expr>) -> Expr {
    match t {
        Expr::Func(f, _) if syms.contains(f) => map[t].clone(),
        Expr::Func(..) => t.map_children(|c| replace_terms(c, syms, map)),
        _ => t.clone(),
    }
}

/// Re-introduces the prefix bottom-up. The proved formula is always the
/// disjunction of the current frontier of the instance tree: children of an
/// ∃-node are weakened into it, and a ∀-node replaces its single child once
/// the child's eigenvariable has left the rest of the frontier.
fn reintroduce(pre: &Prenex, rows: &[Vec<Expr>], d: &mut Deriver) -> Result<Sequent, HerbrandError> {
    let children = |u: &[Expr]| -> Vec<Vec<Expr>> {
        let mut out: Vec<Vec<Expr>> = Vec::new();
        for r in rows.iter().filter(|r| r.starts_with(u)) {
            let c = r[..u.len() + 1].to_vec();
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    };
    let disj = |fr: &[Vec<Expr>]| Expr::disj(&fr.iter().map(|u| pre.suffix(u)).collect::<Vec<_>>());

    let mut frontier: Vec<Vec<Expr>> = Vec::new();
    for r in rows {
        if !frontier.contains(r) {
            frontier.push(r.clone());
        }
    }
    let mut cur = d.axiom(&[], disj(&frontier), Justification::Tautology);
    while !(frontier.len() == 1 && frontier[0].is_empty()) {
        let mut progressed = false;
        for vi in 0..frontier.len() {
            let v = frontier[vi].clone();
            let Some((_, u)) = v.split_last() else { continue };
            let k = u.len();
            let parent = pre.suffix(u);
            if pre.prefix[k].0 {
                let kids = children(u);
                if kids.len() != 1 {
                    return Err(HerbrandError::Shape(format!("universal node {parent} has {} children", kids.len())));
                }
                let Expr::Free(a) = &v[k] else {
                    return Err(HerbrandError::Shape(format!("universal instance {} is not a variable", v[k])));
                };
                let others: Vec<Vec<Expr>> = frontier.iter().filter(|w| **w != v).cloned().collect();
                if u.iter().any(|t| t.contains_free(a)) || others.iter().any(|w| pre.suffix(w).contains_free(a)) {
                    continue;
                }
                let child = pre.suffix(&v);
                let mut next = frontier.clone();
                next[vi] = u.to_vec();
                if others.is_empty() {
                    cur = d.forall_intro(&cur, a, &parent)?;
                } else {
                    let rest = Expr::not(disj(&others));
                    let s = d.prop(&[], &[&cur], Expr::imp(rest.clone(), child.clone()));
                    let s = Sequent {
                        ctx: vec![rest],
                        concl: child,
                        step: s.step,
                    };
                    let g = d.forall_intro(&s, a, &parent)?;
                    cur = d.prop(&[], &[&g], disj(&next));
                }
                frontier = next;
            } else {
                // weaken every child of u on the frontier into u
                let kids: Vec<Vec<Expr>> =
                    frontier.iter().filter(|w| w.len() == k + 1 && w.starts_with(u)).cloned().collect();
                let mut prem = vec![cur.clone()];
                for c in &kids {
                    prem.push(d.axiom(&[], Expr::imp(pre.suffix(c), parent.clone()), Justification::ExistsAxiom));
                }
                let mut next: Vec<Vec<Expr>> = Vec::new();
                for w in &frontier {
                    let w2 = if kids.contains(w) { u.to_vec() } else { w.clone() };
                    if !next.contains(&w2) {
                        next.push(w2);
                    }
                }
                let refs: Vec<&Sequent> = prem.iter().collect();
                cur = d.prop(&[], &refs, disj(&next));
                frontier = next;
            }
            progressed = true;
            break;
        }
        if !progressed {
            return Err(HerbrandError::Eigenvariable(
                "no quantifier can be re-introduced without violating an eigenvariable condition".into(),
            ));
        }
    }
    Ok(cur)
}

/// The second ε-theorem: a PC_ε proof of a prenex ε-free formula becomes a
/// PC proof of the same formula. Proofs that are already ε-free and use no
/// critical formulas are returned as they are.
pub fn second_epsilon(p: &Proof) -> Result<Proof, HerbrandError> {
    check(p).into_result()?;
    if !p.hypotheses.is_empty() {
        return Err(HerbrandError::Shape("proofs with hypotheses are not supported".into()));
    }
    let a = p.end().ok_or_else(|| HerbrandError::Shape("empty proof".into()))?.clone();
    if a.has_eps() {
        return Err(HerbrandError::Shape(format!("end formula contains ε-terms: {a}")));
    }
    Prenex::split(&a)?;
    let eps_free = p.steps.iter().all(|s| !s.formula.has_eps() && !matches!(s.just, Justification::Critical(_)));
    if eps_free {
        let mut q = p.clone();
        q.calculus = Calculus::Pc;
        return Ok(q);
    }
    second_epsilon_pipeline(p)
}

/// [`second_epsilon`] without the ε-free shortcut: always goes through the
/// Herbrand normal form, the embedding and the elimination.
pub fn second_epsilon_pipeline(p: &Proof) -> Result<Proof, HerbrandError> {
    check(p).into_result()?;
    if !p.hypotheses.is_empty() {
        return Err(HerbrandError::Shape("proofs with hypotheses are not supported".into()));
    }
    let a = p.end().ok_or_else(|| HerbrandError::Shape("empty proof".into()))?.clone();
    if a.has_eps() {
        return Err(HerbrandError::Shape(format!("end formula contains ε-terms: {a}")));
    }
    let hp = hnf_proof(p)?;
    let emb = embed_proof(&hp)?;
    let h = HerbrandForm::new(&a)?;
    let mut avoid = BTreeSet::new();
    for s in &emb.steps {
        avoid.extend(s.formula.free_vars());
    }
    let (open, params) = h.open_matrix(&avoid);
    let hd = Engine::new().extract_herbrand(&emb, Some((&open, &params)))?;
    herbrand_to_pc(&hd.expansion, &a)
}
