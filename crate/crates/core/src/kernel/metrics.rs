//! Size, critical count, rank, degree, order and width of a proof.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::proof::{critical_term, Justification, Proof};
use crate::syntax::{canonical, Expr, Measures};

/// A critical ε-term of a proof with its statistics.
#[derive(Clone, Debug)]
pub struct CriticalTerm {
    pub term: Expr,
    pub rank: usize,
    pub degree: usize,
    /// Number of distinct critical formulas belonging to the term.
    pub width: usize,
    /// Index of the first critical step belonging to it.
    pub first_step: usize,
    /// The distinct critical formulas, in order of first appearance.
    pub formulas: Vec<Expr>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub size: usize,
    /// Distinct critical formulas + distinct quantifier axioms + 1.
    pub cc: usize,
    pub critical_formulas: usize,
    pub quantifier_axioms: usize,
    /// Maximal rank of a critical formula (0 if there are none).
    pub rank: usize,
    /// `deg(π, r)`: maximal degree of critical ε-terms of rank `r`.
    pub degree: BTreeMap<usize, usize>,
    /// `o(π, r)`: number of distinct critical ε-terms of rank `r`.
    pub order: BTreeMap<usize, usize>,
    /// `w(π, r)`: maximal width of a rank-`r` critical ε-term, plus one.
    pub width: BTreeMap<usize, usize>,
}

impl Metrics {
    pub fn degree_at(&self, r: usize) -> usize {
        self.degree.get(&r).copied().unwrap_or(0)
    }

    pub fn order_at(&self, r: usize) -> usize {
        self.order.get(&r).copied().unwrap_or(0)
    }

    pub fn width_at(&self, r: usize) -> usize {
        self.width.get(&r).copied().unwrap_or(1)
    }
}

/// The critical ε-terms of `p` in order of first appearance. Critical
/// formulas and terms are identified up to α-equivalence.
pub fn critical_terms(p: &Proof, m: &mut Measures) -> Vec<CriticalTerm> {
    let mut out: Vec<CriticalTerm> = Vec::new();
    let mut index: HashMap<Expr, usize> = HashMap::new();
    let mut seen: HashMap<Expr, ()> = HashMap::new();
    for (k, s) in p.steps.iter().enumerate() {
        let Justification::Critical(e) = &s.just else { continue };
        let e = match critical_term(&s.formula) {
            Some(t) if crate::syntax::alpha_eq(&t, e) => t,
            _ => e.clone(),
        };
        let fkey = canonical(&s.formula);
        let ekey = canonical(&e);
        let i = match index.get(&ekey) {
            Some(&i) => i,
            None => {
                let rank = m.rank(&e).unwrap_or(1);
                let degree = m.degree(&e).unwrap_or(1);
                out.push(CriticalTerm {
                    term: e.clone(),
                    rank,
                    degree,
                    width: 0,
                    first_step: k,
                    formulas: Vec::new(),
                });
                index.insert(ekey, out.len() - 1);
                out.len() - 1
            }
        };
        if seen.insert(fkey, ()).is_none() {
            out[i].width += 1;
            out[i].formulas.push(s.formula.clone());
        }
    }
    out
}

pub fn metrics(p: &Proof) -> Metrics {
    metrics_with(p, &mut Measures::new())
}

pub fn metrics_with(p: &Proof, m: &mut Measures) -> Metrics {
    let terms = critical_terms(p, m);
    let mut quant: HashMap<Expr, ()> = HashMap::new();
    for s in &p.steps {
        if s.just.is_quantifier_axiom() {
            quant.insert(canonical(&s.formula), ());
        }
    }
    let critical_formulas: usize = terms.iter().map(|t| t.width).sum();
    let rank = terms.iter().map(|t| t.rank).max().unwrap_or(0);
    let mut degree = BTreeMap::new();
    let mut order = BTreeMap::new();
    let mut width = BTreeMap::new();
    for r in 1..=rank {
        degree.insert(r, 0);
        order.insert(r, 0);
        width.insert(r, 1);
    }
    for t in &terms {
        let d = degree.entry(t.rank).or_insert(0);
        *d = (*d).max(t.degree);
        *order.entry(t.rank).or_insert(0) += 1;
        let w = width.entry(t.rank).or_insert(1);
        *w = (*w).max(t.width + 1);
    }
    Metrics {
        size: p.size(),
        cc: critical_formulas + quant.len() + 1,
        critical_formulas,
        quantifier_axioms: quant.len(),
        rank,
        degree,
        order,
        width,
    }
}
