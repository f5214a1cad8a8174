//! ∨-expansions `E(s¹…) ∨ … ∨ E(sˡ…)` of a matrix `E(a₁…a_m)`.

use std::collections::{BTreeSet, HashMap};

use crate::error::EliminationError;
use crate::syntax::{
    alpha_eq, canonical, fresh_name, maximal_eps_subterms, replace_eps, replace_eps_many,
    substitute_many, Expr, Name,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// Quantifier- and ε-free matrix.
    pub matrix: Expr,
    /// The free variables of the matrix that are instantiated per row.
    pub params: Vec<Name>,
    /// One substitution row per disjunct, in disjunct order.
    pub rows: Vec<Vec<Expr>>,
}

impl Expansion {
    /// The length-one expansion of `end` along `matrix`, or an error if `end`
    /// is not an instance of the matrix.
    pub fn decompose(matrix: &Expr, params: &[Name], end: &Expr) -> Result<Self, EliminationError> {
        if matrix.has_eps() || matrix.has_quantifier() || !matrix.is_closed() {
            return Err(EliminationError::InMatrix(matrix.to_string()));
        }
        let mismatch = || EliminationError::MatrixMismatch {
            matrix: matrix.to_string(),
            end: end.to_string(),
        };
        let row = match_row(matrix, params, end).ok_or_else(mismatch)?;
        Ok(Expansion {
            matrix: matrix.clone(),
            params: params.to_vec(),
            rows: vec![row],
        })
    }

    /// Infers the matrix by abstracting the outermost ε-terms of `end`
    /// (α-equivalent ones into the same parameter).
    pub fn infer(end: &Expr) -> Self {
        let mut used: BTreeSet<Name> = end.free_vars();
        let mut params = Vec::new();
        let mut row = Vec::new();
        let mut pairs = Vec::new();
        let mut seen: HashMap<Expr, ()> = HashMap::new();
        for e in maximal_eps_subterms(end) {
            if seen.insert(canonical(&e), ()).is_some() {
                continue;
            }
            let a = fresh_name("a", &used);
            used.insert(a.clone());
            pairs.push((e.clone(), Expr::Free(a.clone())));
            params.push(a);
            row.push(e);
        }
        Expansion {
            matrix: replace_eps_many(end, &pairs),
            params,
            rows: vec![row],
        }
    }

    pub fn length(&self) -> usize {
        self.rows.len()
    }

    pub fn instance(&self, row: &[Expr]) -> Expr {
        let pairs: Vec<(Name, Expr)> = self.params.iter().cloned().zip(row.iter().cloned()).collect();
        substitute_many(&self.matrix, &pairs)
    }

    pub fn disjuncts(&self) -> Vec<Expr> {
        self.rows.iter().map(|r| self.instance(r)).collect()
    }

    pub fn disjunction(&self) -> Expr {
        Expr::disj(&self.disjuncts())
    }

    /// The expansion after replacing `e` by each of `ts` in turn, followed by
    /// the unchanged rows (the branch order of one elimination round).
    pub fn refine(&self, e: &Expr, ts: &[Expr]) -> Expansion {
        let mut rows = Vec::with_capacity(self.rows.len() * (ts.len() + 1));
        for t in ts {
            for r in &self.rows {
                rows.push(r.iter().map(|s| replace_eps(s, e, t)).collect());
            }
        }
        rows.extend(self.rows.iter().cloned());
        Expansion {
            matrix: self.matrix.clone(),
            params: self.params.clone(),
            rows,
        }
    }

    /// Drops rows that repeat an earlier row up to α-equivalence. Returns
    /// true if anything was removed.
    pub fn dedup(&mut self) -> bool {
        let mut seen: HashMap<Vec<Expr>, ()> = HashMap::new();
        let before = self.rows.len();
        self.rows
            .retain(|r| seen.insert(r.iter().map(canonical).collect(), ()).is_none());
        self.rows.len() != before
    }

    /// Applies `f` to every term of every row.
    pub fn map_terms(&self, f: impl Fn(&Expr) -> Expr) -> Expansion {
        Expansion {
            matrix: self.matrix.clone(),
            params: self.params.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    /// True iff every term of every row is ε-free.
    pub fn is_eps_free(&self) -> bool {
        self.rows.iter().flatten().all(|t| !t.has_eps())
    }
}

/// Matches `target` against the quantifier-free `pattern`, binding the
/// parameters. Unconstrained parameters are bound to themselves.
pub fn match_row(pattern: &Expr, params: &[Name], target: &Expr) -> Option<Vec<Expr>> {
    fn go(p: &Expr, t: &Expr, params: &[Name], out: &mut [Option<Expr>]) -> bool {
        if let Expr::Free(a) = p {
            if let Some(i) = params.iter().position(|q| q == a) {
                if !t.is_term_sort() {
                    return false;
                }
                return match &out[i] {
                    Some(s) => alpha_eq(s, t),
                    None => {
                        out[i] = Some(t.clone());
                        true
                    }
                };
            }
        }
        match (p, t) {
            (Expr::Free(a), Expr::Free(b)) => a == b,
            (Expr::Func(f, xs), Expr::Func(g, ys)) | (Expr::Pred(f, xs), Expr::Pred(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(x, y)| go(x, y, params, out))
            }
            (Expr::Not(x), Expr::Not(y)) => go(x, y, params, out),
            (Expr::And(a1, a2), Expr::And(b1, b2))
            | (Expr::Or(a1, a2), Expr::Or(b1, b2))
            | (Expr::Imp(a1, a2), Expr::Imp(b1, b2)) => {
                go(a1, b1, params, out) && go(a2, b2, params, out)
            }
            _ => false,
        }
    }
    let mut out = vec![None; params.len()];
    if !go(pattern, target, params, &mut out) {
        return None;
    }
    Some(
        out.into_iter()
            .zip(params)
            .map(|(t, a)| t.unwrap_or_else(|| Expr::Free(a.clone())))
            .collect(),
    )
}
