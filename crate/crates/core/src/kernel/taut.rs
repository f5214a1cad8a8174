//! Propositional validity.
//!
//! A formula is compiled to a hash-consed circuit over its atoms. Atoms are
//! atomic formulas and (in kernel mode) quantified subformulas, identified up
//! to α-equivalence. Small circuits are decided by a bit-parallel truth table;
//! large ones by a CDCL SAT solver on the Tseitin encoding of the negation.

use std::collections::HashMap;

use varisat::{ExtendFormula, Lit, Solver};

use crate::error::KernelError;
use crate::syntax::{canonical, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
}

/// Hash-consed propositional circuit; node indices are topologically sorted.
struct Circuit {
    nodes: Vec<Node>,
    table: HashMap<Node, usize>,
    atoms: Vec<Expr>,
    atom_ids: HashMap<Expr, usize>,
    by_ptr: HashMap<*const Expr, usize>,
}

impl Circuit {
    fn new() -> Self {
        Circuit {
            nodes: Vec::new(),
            table: HashMap::new(),
            atoms: Vec::new(),
            atom_ids: HashMap::new(),
            by_ptr: HashMap::new(),
        }
    }

    fn intern(&mut self, n: Node) -> usize {
        if let Some(&i) = self.table.get(&n) {
            return i;
        }
        self.nodes.push(n);
        self.table.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn atom(&mut self, e: &Expr) -> usize {
        let key = if e.bound_names().is_empty() { e.clone() } else { canonical(e) };
        let id = match self.atom_ids.get(&key) {
            Some(&id) => id,
            None => {
                self.atoms.push(e.clone());
                self.atom_ids.insert(key, self.atoms.len() - 1);
                self.atoms.len() - 1
            }
        };
        self.intern(Node::Atom(id))
    }

    /// Compiles `e`; sub-formulas shared by pointer are compiled once.
    fn compile(&mut self, e: &Expr) -> usize {
        let ptr = e as *const Expr;
        if let Some(&i) = self.by_ptr.get(&ptr) {
            return i;
        }
        let i = match e {
            Expr::Not(a) => {
                let a = self.compile(a);
                self.intern(Node::Not(a))
            }
            Expr::And(a, b) => {
                let (a, b) = (self.compile(a), self.compile(b));
                self.intern(Node::And(a, b))
            }
            Expr::Or(a, b) => {
                let (a, b) = (self.compile(a), self.compile(b));
                self.intern(Node::Or(a, b))
            }
            Expr::Imp(a, b) => {
                let (a, b) = (self.compile(a), self.compile(b));
                self.intern(Node::Imp(a, b))
            }
            _ => self.atom(e),
        };
        self.by_ptr.insert(ptr, i);
        i
    }
}

/// Work bound (circuit nodes × 64-bit words) up to which the truth table is
/// used.
const TABLE_BUDGET: usize = 1 << 22;
const TABLE_MAX_ATOMS: usize = 20;

/// A falsifying assignment to the atoms of a non-tautology.
pub type Assignment = Vec<(Expr, bool)>;

/// `None` if `e` is valid, otherwise a falsifying assignment. Quantified
/// subformulas are treated as atoms.
pub fn falsify(e: &Expr) -> Option<Assignment> {
    let mut c = Circuit::new();
    let root = c.compile(e);
    let n = c.atoms.len();
    let words = if n <= 6 { 1 } else { 1usize << (n.min(TABLE_MAX_ATOMS) - 6) };
    let model = if n <= TABLE_MAX_ATOMS && words.saturating_mul(c.nodes.len()) <= TABLE_BUDGET {
        truth_table(&c, root)
    } else {
        sat(&c, root)
    };
    model.map(|bits| c.atoms.iter().cloned().zip(bits).collect())
}

/// Validity with quantified subformulas as atoms (the kernel's notion of
/// tautology step).
pub fn is_valid(e: &Expr) -> bool {
    falsify(e).is_none()
}

/// Propositional validity of a quantifier-free formula. ε-terms may occur;
/// atoms are identified up to α-equivalence.
pub fn is_tautology(e: &Expr) -> Result<bool, KernelError> {
    Ok(tautology_witness(e)?.is_none())
}

/// Like [`is_tautology`], returning a falsifying assignment on failure.
pub fn tautology_witness(e: &Expr) -> Result<Option<Assignment>, KernelError> {
    if e.has_quantifier() {
        return Err(KernelError::Quantified(e.to_string()));
    }
    Ok(falsify(e))
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn truth_table(c: &Circuit, root: usize) -> Option<Vec<bool>> {
    let n = c.atoms.len();
    let words = if n <= 6 { 1 } else { 1usize << (n - 6) };
    let mask = if n >= 6 { u64::MAX } else { (1u64 << (1u32 << n)) - 1 };
    let mut val = vec![0u64; c.nodes.len()];
    for w in 0..words {
        for (i, node) in c.nodes.iter().enumerate() {
            val[i] = match *node {
                Node::Atom(a) if a < 6 => PATTERNS[a],
                Node::Atom(a) => {
                    if (w >> (a - 6)) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    }
                }
                Node::Not(a) => !val[a],
                Node::And(a, b) => val[a] & val[b],
                Node::Or(a, b) => val[a] | val[b],
                Node::Imp(a, b) => !val[a] | val[b],
            };
        }
        let bad = !val[root] & mask;
        if bad != 0 {
            let bit = bad.trailing_zeros() as usize;
            let row = (w << 6) | bit;
            return Some((0..n).map(|a| (row >> a) & 1 == 1).collect());
        }
    }
    None
}

fn sat(c: &Circuit, root: usize) -> Option<Vec<bool>> {
    let mut solver = Solver::new();
    // one solver variable per circuit node; atoms come first
    let n = c.atoms.len();
    let atom_lit = |a: usize| Lit::from_index(a, true);
    let mut lits: Vec<Lit> = Vec::with_capacity(c.nodes.len());
    let mut next = n;
    for node in &c.nodes {
        let l = match *node {
            Node::Atom(a) => atom_lit(a),
            Node::Not(a) => !lits[a],
            Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) => {
                let g = Lit::from_index(next, true);
                next += 1;
                let (x, y) = match *node {
                    Node::Imp(a, b) => (!lits[a], lits[b]),
                    _ => (lits[a], lits[b]),
                };
                if matches!(node, Node::And(..)) {
                    solver.add_clause(&[!g, x]);
                    solver.add_clause(&[!g, y]);
                    solver.add_clause(&[g, !x, !y]);
                } else {
                    solver.add_clause(&[!g, x, y]);
                    solver.add_clause(&[g, !x]);
                    solver.add_clause(&[g, !y]);
                }
                g
            }
        };
        lits.push(l);
    }
    solver.add_clause(&[!lits[root]]);
    // make sure every atom variable exists in the solver
    for a in 0..n {
        solver.add_clause(&[atom_lit(a), !atom_lit(a)]);
    }
    match solver.solve() {
        Ok(true) => {
            let model = solver.model().unwrap_or_default();
            let mut bits = vec![false; n];
            for l in model {
                if l.index() < n {
                    bits[l.index()] = l.is_positive();
                }
            }
            Some(bits)
        }
        Ok(false) => None,
        Err(e) => panic!("SAT solver failure: {e}"),
    }
}

/// Evaluates a quantifier-free formula under an atom valuation (used to
/// double-check falsifying assignments).
pub fn evaluate(e: &Expr, val: &dyn Fn(&Expr) -> bool) -> bool {
    match e {
        Expr::Not(a) => !evaluate(a, val),
        Expr::And(a, b) => evaluate(a, val) && evaluate(b, val),
        Expr::Or(a, b) => evaluate(a, val) || evaluate(b, val),
        Expr::Imp(a, b) => !evaluate(a, val) || evaluate(b, val),
        _ => val(e),
    }
}
