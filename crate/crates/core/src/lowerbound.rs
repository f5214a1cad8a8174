//! The family `E_k` whose Herbrand complexity is a tower of exponentials while
//! short ε-calculus proofs exist.
//!
//! `R(n, m, k)` reads `n + 2^m = k`. From `Hyp₁ ≡ ∀v R(v,0,S(v))` and the
//! doubling rule `Hyp₂`, the chain `C_k` forces a witness `2_k^1`. Herbrand
//! sequents over numerals are Horn problems, decided by least models.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{KernelError, LowerBoundError};
use crate::elimination::Expansion;
use crate::herbrand::{HerbrandForm, Prenex};
use crate::kernel::{check, Calculus, Deriver, Proof, Sequent};
use crate::syntax::{Expr, Name};

pub fn zero() -> Expr {
    Expr::constant("0")
}

pub fn succ(t: Expr) -> Expr {
    Expr::func("S", vec![t])
}

/// `Sⁿ(0)`.
pub fn numeral(n: u64) -> Expr {
    (0..n).fold(zero(), |t, _| succ(t))
}

/// Inverse of [`numeral`].
pub fn numeral_value(t: &Expr) -> Option<u64> {
    match t {
        Expr::Func(f, args) if &**f == "0" && args.is_empty() => Some(0),
        Expr::Func(f, args) if &**f == "S" && args.len() == 1 => numeral_value(&args[0]).map(|n| n + 1),
        _ => None,
    }
}

pub fn r(a: Expr, b: Expr, c: Expr) -> Expr {
    Expr::pred("R", vec![a, b, c])
}

fn bv(x: &str) -> Expr {
    Expr::bound(x)
}

/// `∀v R(v, 0, S(v))`.
pub fn hyp1() -> Expr {
    Expr::forall("v", r(bv("v"), zero(), succ(bv("v"))))
}

/// `∀w∀x∀y∀z (R(w,x,y) ∧ R(y,x,z) -> R(w,S(x),z))`.
pub fn hyp2() -> Expr {
    let body = Expr::imp(
        Expr::and(r(bv("w"), bv("x"), bv("y")), r(bv("y"), bv("x"), bv("z"))),
        r(bv("w"), succ(bv("x")), bv("z")),
    );
    ["z", "y", "x", "w"].iter().fold(body, |f, x| Expr::forall(x, f))
}

fn chain_var(j: usize) -> String {
    format!("u{j}")
}

/// Matrix of `C_k` over the given terms for `u_k … u_0`.
fn chain_matrix(us: &[Expr]) -> Expr {
    let mut atoms = vec![r(zero(), zero(), us[0].clone())];
    for w in us.windows(2) {
        atoms.push(r(zero(), w[0].clone(), w[1].clone()));
    }
    let last = atoms.pop().unwrap();
    atoms.into_iter().rev().fold(last, |acc, a| Expr::and(a, acc))
}

/// `∃u_k … ∃u_0 (R(0,0,u_k) ∧ R(0,u_k,u_{k-1}) ∧ … ∧ R(0,u_1,u_0))`.
pub fn c_k(k: usize) -> Expr {
    let names: Vec<String> = (0..=k).rev().map(chain_var).collect();
    let us: Vec<Expr> = names.iter().map(|n| bv(n)).collect();
    names.iter().rev().fold(chain_matrix(&us), |f, x| Expr::exists(x, f))
}

/// The purely existential prenex form of `Hyp₁ ∧ Hyp₂ -> C_k`.
pub fn make_ek(k: usize) -> Expr {
    let h1 = r(bv("v"), zero(), succ(bv("v")));
    let h2 = Expr::imp(
        Expr::and(r(bv("w"), bv("x"), bv("y")), r(bv("y"), bv("x"), bv("z"))),
        r(bv("w"), succ(bv("x")), bv("z")),
    );
    let names: Vec<String> = (0..=k).rev().map(chain_var).collect();
    let us: Vec<Expr> = names.iter().map(|n| bv(n)).collect();
    let m = Expr::imp(Expr::and(h1, h2), chain_matrix(&us));
    let mut vars: Vec<String> = ["v", "w", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
    vars.extend(names);
    vars.iter().rev().fold(m, |f, x| Expr::exists(x, f))
}

/// `2_k^1`, if it fits in 64 bits.
pub fn tower(k: usize) -> Option<u64> {
    let mut v: u64 = 1;
    for _ in 0..k {
        v = 1u64.checked_shl(u32::try_from(v).ok()?).filter(|_| v < 64)?;
    }
    Some(v)
}

/// The forced values `u_k = 1, u_{j-1} = 2^{u_j}` of the chain.
pub fn chain_values(k: usize) -> Option<Vec<u64>> {
    let mut out = vec![1u64];
    for _ in 0..k {
        let v = *out.last().unwrap();
        if v >= 64 {
            return None;
        }
        out.push(1u64 << v);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Herbrand sequents over numerals

/// Ground atom `R(n, m, k)` over numerals.
pub type Atom = [u64; 3];

/// `Γ₁, Γ₂ ⇒ Δ` over numerals: `Γ₁` lists the `v` of `R(v,0,S v)`, `Γ₂`
/// the `(w,x,y,z)` of doubling instances, `Δ` rows of `u_k … u_0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HerbrandSequent {
    pub gamma1: BTreeSet<u64>,
    pub gamma2: BTreeSet<[u64; 4]>,
    pub delta: Vec<Vec<u64>>,
}

impl HerbrandSequent {
    /// The ground formula `⋀Γ₁ ∧ ⋀Γ₂ -> ⋁Δ`.
    pub fn formula(&self) -> Expr {
        let n = numeral;
        let mut hyps: Vec<Expr> = self.gamma1.iter().map(|&v| r(n(v), zero(), n(v + 1))).collect();
        for &[w, x, y, z] in &self.gamma2 {
            hyps.push(Expr::imp(
                Expr::and(r(n(w), n(x), n(y)), r(n(y), n(x), n(z))),
                r(n(w), n(x + 1), n(z)),
            ));
        }
        let rows: Vec<Expr> = self
            .delta
            .iter()
            .map(|row| chain_matrix(&row.iter().map(|&u| n(u)).collect::<Vec<_>>()))
            .collect();
        let concl = if rows.is_empty() {
            // empty succedent: falsity
            Expr::and(r(zero(), zero(), zero()), Expr::not(r(zero(), zero(), zero())))
        } else {
            Expr::disj(&rows)
        };
        if hyps.is_empty() {
            concl
        } else {
            Expr::imp(Expr::conj(&hyps), concl)
        }
    }

    /// Validity via the least model of the Horn part.
    pub fn is_valid(&self, depth: u64) -> Result<bool, LowerBoundError> {
        let m = least_model(&self.gamma1, &Rules::Listed(&self.gamma2), depth)?;
        Ok(valid_disjunct(&m, &self.delta).is_some())
    }
}

/// Doubling instances available to forward chaining.
pub enum Rules<'a> {
    Listed(&'a BTreeSet<[u64; 4]>),
    /// Every instance whose numerals stay within the depth bound.
    All,
}

/// Forward-chaining closure of `Γ₁ ∪ Γ₂`. Numerals above `depth` are an
/// error for listed instances and are never generated for [`Rules::All`].
pub fn least_model(gamma1: &BTreeSet<u64>, rules: &Rules, depth: u64) -> Result<BTreeSet<Atom>, LowerBoundError> {
    let mut model: BTreeSet<Atom> = BTreeSet::new();
    for &v in gamma1 {
        if v + 1 > depth {
            return Err(LowerBoundError::DepthExceeded(v + 1, depth));
        }
        model.insert([v, 0, v + 1]);
    }
    match rules {
        Rules::Listed(gs) => {
            if let Some(&n) = gs.iter().flatten().max() {
                if n + 1 > depth && gs.iter().any(|g| g[1] + 1 > depth || g.iter().any(|&x| x > depth)) {
                    return Err(LowerBoundError::DepthExceeded(n, depth));
                }
            }
            loop {
                let mut changed = false;
                for &[w, x, y, z] in gs.iter() {
                    if model.contains(&[w, x, y]) && model.contains(&[y, x, z]) {
                        changed |= model.insert([w, x + 1, z]);
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        Rules::All => {
            let mut frontier: Vec<Atom> = model.iter().copied().collect();
            // (first, middle) -> thirds
            let mut by_start: HashMap<(u64, u64), Vec<u64>> = HashMap::new();
            let mut by_end: HashMap<(u64, u64), Vec<u64>> = HashMap::new();
            for &[a, b, c] in &model {
                by_start.entry((a, b)).or_default().push(c);
                by_end.entry((c, b)).or_default().push(a);
            }
            while let Some([a, b, c]) = frontier.pop() {
                if b + 1 > depth {
                    continue;
                }
                let mut new = Vec::new();
                // as the left premise R(a,b,c), R(c,b,z)
                for &z in by_start.get(&(c, b)).into_iter().flatten() {
                    new.push([a, b + 1, z]);
                }
                // as the right premise R(w,b,a), R(a,b,c)
                for &w in by_end.get(&(a, b)).into_iter().flatten() {
                    new.push([w, b + 1, c]);
                }
                for t in new {
                    if model.insert(t) {
                        by_start.entry((t[0], t[1])).or_default().push(t[2]);
                        by_end.entry((t[2], t[1])).or_default().push(t[0]);
                        frontier.push(t);
                    }
                }
            }
        }
    }
    Ok(model)
}

/// Index of the first row of `delta` whose chain holds in `model`.
pub fn valid_disjunct(model: &BTreeSet<Atom>, delta: &[Vec<u64>]) -> Option<usize> {
    delta.iter().position(|row| chain_holds(model, row))
}

fn chain_holds(model: &BTreeSet<Atom>, row: &[u64]) -> bool {
    !row.is_empty()
        && model.contains(&[0, 0, row[0]])
        && row.windows(2).all(|w| model.contains(&[0, w[0], w[1]]))
}

/// Some chain `R(0,0,u_k), …, R(0,u_1,u_0)` of length `k+1` in `model`.
pub fn find_chain(model: &BTreeSet<Atom>, k: usize) -> Option<Vec<u64>> {
    fn go(model: &BTreeSet<Atom>, prev: u64, left: usize, acc: &mut Vec<u64>) -> bool {
        if left == 0 {
            return true;
        }
        for &[_, _, c] in model.range([0, prev, 0]..=[0, prev, u64::MAX]) {
            acc.push(c);
            if go(model, c, left - 1, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::new();
    go(model, 0, k + 1, &mut acc).then_some(acc)
}

/// The Herbrand sequent read off a proof: `Γ₁` needs `R(n,0,n+1)` for every
/// unit step under `R(n, m, n+2^m)`.
pub fn canonical_sequent(k: usize) -> Option<HerbrandSequent> {
    let vals = chain_values(k)?;
    let mut s = HerbrandSequent {
        delta: vec![vals.clone()],
        ..Default::default()
    };
    fn need(n: u64, m: u64, s: &mut HerbrandSequent) -> Option<()> {
        if m == 0 {
            s.gamma1.insert(n);
            return Some(());
        }
        let half = 1u64.checked_shl(u32::try_from(m - 1).ok()?)?;
        need(n, m - 1, s)?;
        need(n + half, m - 1, s)?;
        s.gamma2.insert([n, m - 1, n + half, n + 2 * half]);
        Some(())
    }
    need(0, 0, &mut s)?;
    for w in vals.windows(2) {
        need(0, w[0], &mut s)?;
    }
    Some(s)
}

impl HerbrandSequent {
    /// The sequent as a ∨-expansion of the matrix of `E_k`: one row per
    /// member of `Γ₁`, `Γ₂` and `Δ`, with unused positions set to `0`.
    pub fn expansion(&self, k: usize) -> Expansion {
        let h = HerbrandForm::new(&make_ek(k)).expect("E_k is prenex");
        let (matrix, params) = h.open_matrix(&BTreeSet::new());
        let n = params.len();
        let row = |vals: &[(usize, u64)]| {
            let mut r = vec![zero(); n];
            for &(i, v) in vals {
                r[i] = numeral(v);
            }
            r
        };
        let mut rows: Vec<Vec<Expr>> = self.gamma1.iter().map(|&v| row(&[(0, v)])).collect();
        for &[w, x, y, z] in &self.gamma2 {
            rows.push(row(&[(1, w), (2, x), (3, y), (4, z)]));
        }
        for d in &self.delta {
            let vals: Vec<(usize, u64)> = d.iter().enumerate().map(|(i, &u)| (5 + i, u)).collect();
            rows.push(row(&vals));
        }
        Expansion { matrix, params, rows }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RequiredInstance {
    /// The `n` of `R(n, 0, S(n))`.
    pub instance: u64,
    /// Atoms in the least model once this instance is dropped.
    pub countermodel_atoms: usize,
    pub necessary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundCertificate {
    pub k: usize,
    pub depth: u64,
    /// `2_k^1`.
    pub target: u64,
    pub witness: HerbrandSequent,
    pub witness_valid: bool,
    pub required: Vec<RequiredInstance>,
    /// The certified lower bound on the Herbrand length (number of required
    /// `Hyp₁` instances), for instance sets within the depth bound.
    pub bound: u64,
    pub certified: bool,
}

/// Certifies `HC(E_k) ≥ 2_k^1` for Herbrand sequents over numerals `≤ depth`:
/// the canonical witness is valid, and dropping any one of its `Hyp₁`
/// instances leaves even the sequent with *all* other depth-bounded
/// instances of `Hyp₁`, `Hyp₂` and `C_k` invalid.
pub fn check_lower_bound(k: usize, depth: u64) -> Result<LowerBoundCertificate, LowerBoundError> {
    let target = tower(k).ok_or(LowerBoundError::TooLarge(k))?;
    let witness = canonical_sequent(k).ok_or(LowerBoundError::TooLarge(k))?;
    if depth < target {
        return Err(LowerBoundError::DepthTooSmall { needed: target, depth });
    }
    let witness_valid = witness.is_valid(depth)?;
    if !witness_valid {
        return Err(LowerBoundError::WitnessInvalid);
    }
    let all: BTreeSet<u64> = (0..depth).collect();
    let mut required = Vec::with_capacity(witness.gamma1.len());
    for &i in &witness.gamma1 {
        let mut g1 = all.clone();
        g1.remove(&i);
        let m = least_model(&g1, &Rules::All, depth)?;
        required.push(RequiredInstance {
            instance: i,
            countermodel_atoms: m.len(),
            necessary: find_chain(&m, k).is_none(),
        });
    }
    let bound = required.iter().filter(|r| r.necessary).count() as u64;
    Ok(LowerBoundCertificate {
        k,
        depth,
        target,
        witness,
        witness_valid,
        certified: bound >= target,
        required,
        bound,
    })
}

// ---------------------------------------------------------------------------
// Short proofs

/// The level-`i` cut formula applied to `t`:
/// `φ₀(t) = ∀y₀∃z₀ R(y₀,t,z₀)`,
/// `φᵢ₊₁(t) = ∀yᵢ₊₁(φᵢ(yᵢ₊₁) -> ∃zᵢ₊₁(φᵢ(zᵢ₊₁) ∧ R(yᵢ₊₁,t,zᵢ₊₁)))`.
pub fn level(i: usize, t: &Expr) -> Expr {
    let y = format!("y{i}");
    let z = format!("z{i}");
    let body = if i == 0 {
        Expr::exists(&z, r(bv(&y), t.clone(), bv(&z)))
    } else {
        Expr::imp(
            level(i - 1, &bv(&y)),
            Expr::exists(&z, Expr::and(level(i - 1, &bv(&z)), r(bv(&y), t.clone(), bv(&z)))),
        )
    };
    Expr::forall(&y, body)
}

/// `∀vᵢ (φᵢ(vᵢ) -> φᵢ(S vᵢ))`.
pub fn closure(i: usize) -> Expr {
    let v = format!("v{i}");
    Expr::forall(&v, Expr::imp(level(i, &bv(&v)), level(i, &succ(bv(&v)))))
}

struct Builder {
    d: Deriver,
    gamma: Vec<Expr>,
}

type R<T> = Result<T, KernelError>;

impl Builder {
    fn fresh(&mut self) -> (Name, Expr) {
        let a = self.d.fresh("a");
        (a.clone(), Expr::Free(a))
    }

    fn hyp(&mut self, ctx: &[Expr], i: usize) -> Sequent {
        self.d.assume(ctx, i)
    }

    fn weaken(&mut self, ctx: &[Expr], s: &Sequent) -> Sequent {
        let c = s.concl.clone();
        self.d.prop(ctx, &[s], c)
    }

    fn elim_all(&mut self, s: &Sequent, ts: &[Expr]) -> R<Sequent> {
        let mut cur = s.clone();
        for t in ts {
            cur = self.d.forall_elim(&cur, t)?;
        }
        Ok(cur)
    }

    fn ctx_with(&self, ctx: &[Expr], f: Expr) -> Vec<Expr> {
        let mut c = ctx.to_vec();
        c.push(f);
        c
    }

    /// `Γ ⊢ φ₀(0)`.
    fn base_zero(&mut self) -> R<Sequent> {
        let g = self.gamma.clone();
        let (b, bt) = self.fresh();
        let h1 = self.hyp(&g, 0);
        let inst = self.d.forall_elim(&h1, &bt)?;
        let ex = self.d.exists_intro(&inst, &Expr::exists("z0", r(bt.clone(), zero(), bv("z0"))))?;
        self.d.forall_intro(&ex, &b, &level(0, &zero()))
    }

    /// `Γ ⊢ ∀v₀ (φ₀(v₀) -> φ₀(S v₀))`.
    fn base_closure(&mut self) -> R<Sequent> {
        let g = self.gamma.clone();
        let (a, at) = self.fresh();
        let c1 = self.ctx_with(&g, level(0, &at));
        let (b, bt) = self.fresh();
        let phi = self.hyp(&c1, 2);
        let ex1 = self.d.forall_elim(&phi, &bt)?;
        let (c, ct) = self.fresh();
        let c2 = self.ctx_with(&c1, r(bt.clone(), at.clone(), ct.clone()));
        let phi2 = self.hyp(&c2, 2);
        let ex2 = self.d.forall_elim(&phi2, &ct)?;
        let (dn, dt) = self.fresh();
        let c3 = self.ctx_with(&c2, r(ct.clone(), at.clone(), dt.clone()));
        let h2 = self.hyp(&c3, 1);
        let rule = self.elim_all(&h2, &[bt.clone(), at.clone(), ct.clone(), dt.clone()])?;
        let p1 = self.hyp(&c3, 3);
        let p2 = self.hyp(&c3, 4);
        let head = r(bt.clone(), succ(at.clone()), dt.clone());
        let got = self.d.prop(&c3, &[&rule, &p1, &p2], head);
        let goal = Expr::exists("z0", r(bt.clone(), succ(at.clone()), bv("z0")));
        let e = self.d.exists_intro(&got, &goal)?;
        let e = self.d.exists_elim(&ex2, &e, &dn)?;
        let e = self.d.exists_elim(&ex1, &e, &c)?;
        let all = self.d.forall_intro(&e, &b, &level(0, &succ(at.clone())))?;
        let imp = self.d.imp_intro(&all);
        self.d.forall_intro(&imp, &a, &closure(0))
    }

    /// `Γ ⊢ φᵢ₊₁(0)` from `Γ ⊢ ∀v (φᵢ(v) -> φᵢ(S v))`.
    fn step_zero(&mut self, i: usize, clo: &Sequent) -> R<Sequent> {
        let g = self.gamma.clone();
        let (b, bt) = self.fresh();
        let c1 = self.ctx_with(&g, level(i, &bt));
        let clo1 = self.weaken(&c1, clo);
        let imp = self.d.forall_elim(&clo1, &bt)?;
        let phi = self.hyp(&c1, 2);
        let next = self.d.prop(&c1, &[&imp, &phi], level(i, &succ(bt.clone())));
        let h1 = self.hyp(&c1, 0);
        let unit = self.d.forall_elim(&h1, &bt)?;
        let conj = Expr::and(level(i, &succ(bt.clone())), r(bt.clone(), zero(), succ(bt.clone())));
        let both = self.d.prop(&c1, &[&next, &unit], conj);
        let zn = format!("z{}", i + 1);
        let goal = Expr::exists(&zn, Expr::and(level(i, &bv(&zn)), r(bt.clone(), zero(), bv(&zn))));
        let e = self.d.exists_intro(&both, &goal)?;
        let imp = self.d.imp_intro(&e);
        self.d.forall_intro(&imp, &b, &level(i + 1, &zero()))
    }

    /// `Γ ⊢ ∀v (φᵢ₊₁(v) -> φᵢ₊₁(S v))`.
    fn step_closure(&mut self, i: usize) -> R<Sequent> {
        let g = self.gamma.clone();
        let zn = format!("z{}", i + 1);
        let step = |x: &Expr, y: &Expr| {
            Expr::exists(&zn, Expr::and(level(i, &bv(&zn)), r(y.clone(), x.clone(), bv(&zn))))
        };
        let (a, at) = self.fresh();
        let c1 = self.ctx_with(&g, level(i + 1, &at));
        let (b, bt) = self.fresh();
        let c2 = self.ctx_with(&c1, level(i, &bt));
        let outer = self.hyp(&c2, 2);
        let inst = self.d.forall_elim(&outer, &bt)?;
        let phib = self.hyp(&c2, 3);
        let ex1 = self.d.prop(&c2, &[&inst, &phib], step(&at, &bt));
        let (c, ct) = self.fresh();
        let c3 = self.ctx_with(&c2, Expr::and(level(i, &ct), r(bt.clone(), at.clone(), ct.clone())));
        let outer3 = self.hyp(&c3, 2);
        let inst2 = self.d.forall_elim(&outer3, &ct)?;
        let w1 = self.hyp(&c3, 4);
        let ex2 = self.d.prop(&c3, &[&inst2, &w1], step(&at, &ct));
        let (dn, dt) = self.fresh();
        let c4 = self.ctx_with(&c3, Expr::and(level(i, &dt), r(ct.clone(), at.clone(), dt.clone())));
        let h2 = self.hyp(&c4, 1);
        let rule = self.elim_all(&h2, &[bt.clone(), at.clone(), ct.clone(), dt.clone()])?;
        let w1 = self.hyp(&c4, 4);
        let w2 = self.hyp(&c4, 5);
        let conj = Expr::and(level(i, &dt), r(bt.clone(), succ(at.clone()), dt.clone()));
        let got = self.d.prop(&c4, &[&rule, &w1, &w2], conj);
        let e = self.d.exists_intro(&got, &step(&succ(at.clone()), &bt))?;
        let e = self.d.exists_elim(&ex2, &e, &dn)?;
        let e = self.d.exists_elim(&ex1, &e, &c)?;
        let imp = self.d.imp_intro(&e);
        let all = self.d.forall_intro(&imp, &b, &level(i + 1, &succ(at.clone())))?;
        let imp = self.d.imp_intro(&all);
        self.d.forall_intro(&imp, &a, &closure(i + 1))
    }

    /// `Γ ⊢ C_k` from `Γ ⊢ φⱼ(0)` for all `j ≤ k`.
    fn chain(&mut self, k: usize, zeros: &[Sequent]) -> R<Sequent> {
        let goal = Prenex::split(&c_k(k)).map_err(|e| KernelError::Other(e.to_string()))?;
        let g = self.gamma.clone();
        let top = zeros[k].clone();
        self.chain_level(&goal, k, &g, top, &zero(), zeros, Vec::new())
    }

    /// `s : ctx ⊢ φⱼ(t)`; `vals` are the witnesses for `u_k … u_{j+1}`.
    #[allow(clippy::too_many_arguments)]
    fn chain_level(
        &mut self,
        goal: &Prenex,
        j: usize,
        ctx: &[Expr],
        s: Sequent,
        t: &Expr,
        zeros: &[Sequent],
        vals: Vec<Expr>,
    ) -> R<Sequent> {
        let inst = self.d.forall_elim(&s, &zero())?;
        let ex = if j == 0 {
            inst
        } else {
            let z = self.weaken(ctx, &zeros[j - 1]);
            let concl = match &inst.concl {
                Expr::Imp(_, c) => (**c).clone(),
                _ => unreachable!("level formulas are implications"),
            };
            self.d.prop(ctx, &[&inst, &z], concl)
        };
        let (c, ct) = self.fresh();
        let fact = if j == 0 {
            r(zero(), t.clone(), ct.clone())
        } else {
            Expr::and(level(j - 1, &ct), r(zero(), t.clone(), ct.clone()))
        };
        let inner = self.ctx_with(ctx, fact);
        let mut vals2 = vals;
        vals2.push(ct.clone());
        let body = if j == 0 {
            // every chain atom is (part of) a context formula
            let refs: Vec<Sequent> = (self.gamma.len()..inner.len()).map(|i| self.hyp(&inner, i)).collect();
            let rr: Vec<&Sequent> = refs.iter().collect();
            let m = self.d.prop(&inner, &rr, goal.suffix(&vals2));
            let mut cur = m;
            for n in (0..vals2.len()).rev() {
                cur = self.d.exists_intro(&cur, &goal.suffix(&vals2[..n]))?;
            }
            cur
        } else {
            let w = self.hyp(&inner, inner.len() - 1);
            let next = self.d.prop(&inner, &[&w], level(j - 1, &ct));
            self.chain_level(goal, j - 1, &inner, next, &ct, zeros, vals2)?
        };
        self.d.exists_elim(&ex, &body, &c)
    }
}

/// A checking PC_ε proof (in fact a PC proof) of `E_k` whose critical count
/// grows linearly in `k`: one pair of cut lemmas per level.
pub fn build_ek_proof(k: usize) -> Result<Proof, KernelError> {
    let gamma = vec![hyp1(), hyp2()];
    let mut b = Builder {
        d: Deriver::new(Calculus::PcEps),
        gamma: gamma.clone(),
    };
    let mut zeros = vec![b.base_zero()?];
    let mut clos = vec![b.base_closure()?];
    for i in 0..k {
        zeros.push(b.step_zero(i, &clos[i])?);
        clos.push(b.step_closure(i)?);
    }
    let ck = b.chain(k, &zeros)?;

    // ⊢ E_k by contradiction from ¬E_k
    let ek = make_ek(k);
    let pre = Prenex::split(&ek).map_err(|e| KernelError::Other(e.to_string()))?;
    let neg = vec![Expr::not(ek.clone())];
    let n = pre.len();
    let zero_row = |b: &mut Builder, fill: &[Expr]| -> Vec<Expr> {
        let _ = b;
        let mut row = fill.to_vec();
        row.resize(n, zero());
        row
    };
    // ¬E ⊢ instance(row) -> ... : from an instance derive E
    let reach = |b: &mut Builder, row: &[Expr]| -> R<Sequent> {
        let ctx = vec![neg[0].clone(), pre.suffix(row)];
        let mut cur = b.d.assume(&ctx, 1);
        for m in (0..n).rev() {
            cur = b.d.exists_intro(&cur, &pre.suffix(&row[..m]))?;
        }
        Ok(b.d.imp_intro(&cur))
    };
    let not_e = b.d.assume(&neg, 0);

    // ¬E ⊢ Hyp₁
    let (a, at) = b.fresh();
    let row = zero_row(&mut b, std::slice::from_ref(&at));
    let to_e = reach(&mut b, &row)?;
    let unit = b.d.prop(&neg, &[&to_e, &not_e], r(at.clone(), zero(), succ(at.clone())));
    let h1 = b.d.forall_intro(&unit, &a, &hyp1())?;

    // ¬E ⊢ Hyp₂
    let hp = Prenex::split(&hyp2()).map_err(|e| KernelError::Other(e.to_string()))?;
    let names: Vec<(Name, Expr)> = (0..4).map(|_| b.fresh()).collect();
    let ts: Vec<Expr> = names.iter().map(|(_, t)| t.clone()).collect();
    let mut fill = vec![zero()];
    fill.extend(ts.iter().cloned());
    let row = zero_row(&mut b, &fill);
    let to_e = reach(&mut b, &row)?;
    let mut cur = b.d.prop(&neg, &[&to_e, &not_e], hp.suffix(&ts));
    for m in (0..4).rev() {
        cur = b.d.forall_intro(&cur, &names[m].0, &hp.suffix(&ts[..m]))?;
    }
    let h2 = cur;

    // ¬E ⊢ C_k
    let ck = b.d.lift(ck.step);
    let ck_neg = b.d.prop(&neg, &[&ck, &h1, &h2], c_k(k));

    // ¬E, C(c̄) ⊢ E, then discharge the witnesses
    let cp = Prenex::split(&c_k(k)).map_err(|e| KernelError::Other(e.to_string()))?;
    let ws: Vec<(Name, Expr)> = (0..=k).map(|_| b.fresh()).collect();
    let wt: Vec<Expr> = ws.iter().map(|(_, t)| t.clone()).collect();
    let mut fill = vec![zero(); 5];
    fill.extend(wt.iter().cloned());
    let to_e = reach(&mut b, &fill)?;
    let mut ctx = neg.clone();
    ctx.push(cp.suffix(&wt));
    let c_in = b.d.assume(&ctx, 1);
    let to_e_in = b.weaken(&ctx, &to_e);
    let inst = match &to_e.concl {
        Expr::Imp(l, _) => (**l).clone(),
        _ => unreachable!(),
    };
    let m = b.d.prop(&ctx, &[&c_in], inst);
    let mut body = b.d.prop(&ctx, &[&to_e_in, &m], ek.clone());
    // body: ¬E, C(w_k..w_0) ⊢ E; peel the witnesses innermost first
    for j in (0..=k).rev() {
        let mut outer = neg.clone();
        outer.push(cp.suffix(&wt[..j]));
        let ex = b.d.assume(&outer, 1);
        let mut bctx = neg.clone();
        bctx.push(cp.suffix(&wt[..j]));
        bctx.push(cp.suffix(&wt[..=j]));
        let bb = b.d.prop(&bctx, &[&body], ek.clone());
        let e = b.d.exists_elim(&ex, &bb, &ws[j].0)?;
        body = b.d.imp_intro(&e);
        body = b.d.prop(&neg[..0], &[&body], Expr::imp(neg[0].clone(), Expr::imp(cp.suffix(&wt[..j]), ek.clone())));
        body = Sequent {
            ctx: {
                let mut c = neg.clone();
                c.push(cp.suffix(&wt[..j]));
                c
            },
            concl: ek.clone(),
            step: body.step,
        };
    }
    // body: ¬E, C_k ⊢ E
    let fin = b.d.prop(&neg, &[&body, &ck_neg], ek.clone());
    let fin = b.d.prop(&[], &[&fin], Expr::imp(Expr::not(ek.clone()), ek.clone()));
    b.d.prop(&[], &[&fin], ek.clone());
    let p = b.d.finish();
    check(&p).into_result()?;
    Ok(p)
}
