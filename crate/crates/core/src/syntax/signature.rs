use std::collections::BTreeMap;

use super::expr::{name, Expr, Name};
use crate::error::SyntaxError;

/// Function and predicate symbols with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub funcs: BTreeMap<Name, usize>,
    pub preds: BTreeMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// The language of the lower-bound family: `0`, `S`, `R`.
    pub fn lower_bound() -> Self {
        let mut s = Self::new();
        s.funcs.insert(name("0"), 0);
        s.funcs.insert(name("S"), 1);
        s.preds.insert(name("R"), 3);
        s
    }

    pub fn declare_func(&mut self, f: &str, arity: usize) -> Result<(), SyntaxError> {
        Self::declare(&mut self.funcs, f, arity)
    }

    pub fn declare_pred(&mut self, p: &str, arity: usize) -> Result<(), SyntaxError> {
        Self::declare(&mut self.preds, p, arity)
    }

    fn declare(map: &mut BTreeMap<Name, usize>, s: &str, arity: usize) -> Result<(), SyntaxError> {
        match map.get(s) {
            Some(&a) if a != arity => Err(SyntaxError::Arity {
                symbol: s.to_string(),
                expected: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                map.insert(name(s), arity);
                Ok(())
            }
        }
    }

    /// Adds every symbol used in `e`, failing on an arity clash.
    pub fn absorb(&mut self, e: &Expr) -> Result<(), SyntaxError> {
        for (is_pred, s, n) in e.symbols() {
            if is_pred {
                self.declare_pred(&s, n)?;
            } else {
                self.declare_func(&s, n)?;
            }
        }
        Ok(())
    }

    pub fn from_exprs<'a>(es: impl IntoIterator<Item = &'a Expr>) -> Result<Self, SyntaxError> {
        let mut s = Self::new();
        for e in es {
            s.absorb(e)?;
        }
        Ok(s)
    }

    /// A function symbol `prefix N` not yet declared; declares it.
    pub fn fresh_func(&mut self, prefix: &str, arity: usize) -> Name {
        let n = (1..)
            .map(|i| format!("{prefix}{i}"))
            .find(|c| !self.funcs.contains_key(c.as_str()) && !self.preds.contains_key(c.as_str()))
            .unwrap();
        let n = name(&n);
        self.funcs.insert(n.clone(), arity);
        n
    }
}
