//! Text syntax for terms and formulas.
//!
//! ```text
//! formula := imp
//! imp     := or ( "->" imp )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "~" unary | ("forall"|"exists") VAR "." imp | atom | "(" imp ")"
//! atom    := PRED ( "(" term ("," term)* ")" )?
//! term    := "eps" VAR "." imp | IDENT ( "(" term ("," term)* ")" )?
//! ```
//!
//! Identifier classes in term position: names starting with `u`..`z` are
//! bound variables, names starting with `a`..`e` are free variables, anything
//! else (`f`, `g1`, `S`, `0`, ...) is a function symbol. Any identifier
//! followed by `(` is a function symbol. Predicates start with an uppercase
//! letter. Unicode `¬ ∧ ∨ → ∀ ∃ ε` are accepted as well.

use std::collections::BTreeMap;

use crate::error::ParseError;
use crate::syntax::{name, Expr, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Imp,
    Forall,
    Exists,
    Eps,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '~' | '¬' => Some(Tok::Not),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            '→' => Some(Tok::Imp),
            '∀' => Some(Tok::Forall),
            '∃' => Some(Tok::Exists),
            'ε' => Some(Tok::Eps),
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Some(Tok::Imp)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') && chars[j] != 'ε' {
                    j += 1;
                }
                adv = j - i;
                let word: String = chars[i..j].iter().collect();
                Some(match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "eps" => Tok::Eps,
                    _ => Tok::Ident(word),
                })
            }
            _ => {
                return Err(ParseError {
                    line,
                    col,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        };
        if let Some(tok) = tok {
            out.push(Token {
                tok,
                line: start.0,
                col: start.1,
            });
        }
        i += adv;
        col += adv;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<Name>,
    funcs: BTreeMap<String, usize>,
    preds: BTreeMap<String, usize>,
    line_offset: usize,
}

/// Identifier class in term position.
pub fn is_bound_ident(s: &str) -> bool {
    matches!(s.chars().next(), Some('u'..='z'))
}

pub fn is_free_ident(s: &str) -> bool {
    matches!(s.chars().next(), Some('a'..='e'))
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.toks[self.pos];
        Err(ParseError {
            line: t.line + self.line_offset,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn imp(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Expr::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn binder_var(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(v) if is_bound_ident(&v) => {
                if self.scope.iter().any(|s| **s == *v) {
                    return self.err(format!(
                        "variable {v} is bound inside the scope of another binder for it"
                    ));
                }
                self.bump();
                self.expect(Tok::Dot, "'.'")?;
                Ok(name(&v))
            }
            t => self.err(format!("expected a bound variable (u..z), found {}", describe(&t))),
        }
    }

    fn body(&mut self, x: &Name) -> Result<Expr, ParseError> {
        self.scope.push(x.clone());
        let b = self.imp();
        self.scope.pop();
        b
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Expr::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let q = self.bump();
                let x = self.binder_var()?;
                let b = self.body(&x)?;
                Ok(if q == Tok::Forall {
                    Expr::Forall(x, b.into())
                } else {
                    Expr::Exists(x, b.into())
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.imp()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(p) if p.starts_with(|c: char| c.is_uppercase()) => {
                let at = self.pos;
                self.bump();
                let args = self.args()?;
                self.arity(true, &p, args.len(), at)?;
                Ok(Expr::pred(&p, args))
            }
            t => self.err(format!("expected a formula, found {}", describe(&t))),
        }
    }

    /// Records or checks the arity of the symbol token at index `at`.
    fn arity(&mut self, pred: bool, s: &str, n: usize, at: usize) -> Result<(), ParseError> {
        let map = if pred { &mut self.preds } else { &mut self.funcs };
        match map.get(s) {
            Some(&a) if a != n => {
                let t = &self.toks[at];
                Err(ParseError {
                    line: t.line + self.line_offset,
                    col: t.col,
                    msg: format!("symbol {s} used with arity {n}, expected {a}"),
                })
            }
            _ => {
                map.insert(s.to_string(), n);
                Ok(())
            }
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() != Tok::LParen {
            return Ok(out);
        }
        self.bump();
        loop {
            out.push(self.term()?);
            match self.bump() {
                Tok::Comma => continue,
                Tok::RParen => break,
                t => {
                    self.pos -= 1;
                    return self.err(format!("expected ',' or ')', found {}", describe(&t)));
                }
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Eps => {
                self.bump();
                let x = self.binder_var()?;
                let b = self.body(&x)?;
                Ok(Expr::Eps(x, b.into()))
            }
            Tok::Ident(s) => {
                let at = self.pos;
                self.bump();
                if *self.peek() == Tok::LParen {
                    let args = self.args()?;
                    self.arity(false, &s, args.len(), at)?;
                    return Ok(Expr::func(&s, args));
                }
                if is_bound_ident(&s) {
                    Ok(Expr::bound(&s))
                } else if is_free_ident(&s) {
                    Ok(Expr::free(&s))
                } else {
                    self.arity(false, &s, 0, at)?;
                    Ok(Expr::constant(&s))
                }
            }
            t => self.err(format!("expected a term, found {}", describe(&t))),
        }
    }

}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
        Tok::Not => "'~'".into(),
        Tok::And => "'&'".into(),
        Tok::Or => "'|'".into(),
        Tok::Imp => "'->'".into(),
        Tok::Forall => "'forall'".into(),
        Tok::Exists => "'exists'".into(),
        Tok::Eps => "'eps'".into(),
        Tok::End => "end of input".into(),
    }
}

fn parser(src: &str, line_offset: usize) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(src)?,
        pos: 0,
        scope: Vec::new(),
        funcs: BTreeMap::new(),
        preds: BTreeMap::new(),
        line_offset,
    })
}

fn finish(p: &mut Parser, e: Expr) -> Result<Expr, ParseError> {
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(e)
}

/// Parses a formula (or semiformula).
pub fn parse_formula(src: &str) -> Result<Expr, ParseError> {
    parse_formula_at(src, 0)
}

/// [`parse_formula`] with error line numbers shifted by `line_offset`.
pub fn parse_formula_at(src: &str, line_offset: usize) -> Result<Expr, ParseError> {
    let mut p = parser(src, line_offset)?;
    let e = p.imp()?;
    finish(&mut p, e)
}

/// Parses a term (or semiterm).
pub fn parse_term(src: &str) -> Result<Expr, ParseError> {
    let mut p = parser(src, 0)?;
    let e = p.term()?;
    finish(&mut p, e)
}

/// Parses either a term or a formula, deciding by the first token.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_at(src, 0)
}

pub fn parse_expr_at(src: &str, line_offset: usize) -> Result<Expr, ParseError> {
    let mut p = parser(src, line_offset)?;
    let is_term = match p.peek() {
        Tok::Eps => true,
        // uppercase function symbols such as `S` are read as predicates at
        // the top level
        Tok::Ident(s) => !s.starts_with(|c: char| c.is_uppercase()),
        _ => false,
    };
    let e = if is_term { p.term()? } else { p.imp()? };
    finish(&mut p, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::print::print_expr;
    use crate::syntax::alpha_eq;

    #[test]
    fn parses_connectives_and_binders() {
        let e = parse_formula("exists x. (P(x) | forall y. Q(y))").unwrap();
        let expect = Expr::exists(
            "x",
            Expr::or(
                Expr::pred("P", vec![Expr::bound("x")]),
                Expr::forall("y", Expr::pred("Q", vec![Expr::bound("y")])),
            ),
        );
        assert_eq!(e, expect);
        assert_eq!(
            parse_term("eps x. P(x)").unwrap(),
            Expr::eps("x", Expr::pred("P", vec![Expr::bound("x")]))
        );
        let semi = parse_formula("P(x)").unwrap();
        assert!(!semi.is_closed());
    }

    #[test]
    fn precedence() {
        let e = parse_formula("~A & B | C -> D -> E").unwrap();
        let a = Expr::pred("A", vec![]);
        let b = Expr::pred("B", vec![]);
        let c = Expr::pred("C", vec![]);
        let d = Expr::pred("D", vec![]);
        let ee = Expr::pred("E", vec![]);
        let expect = Expr::imp(
            Expr::or(Expr::and(Expr::not(a), b), c),
            Expr::imp(d, ee),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn unicode_input() {
        let a = parse_formula("∃x(P(x) ∨ ∀y ¬Q(y))");
        // binder variables need a dot in ASCII; unicode form accepts it too
        assert!(a.is_err());
        let b = parse_formula("∃x. (P(x) ∨ ∀y. ¬Q(y))").unwrap();
        assert_eq!(b, parse_formula("exists x. (P(x) | forall y. ~Q(y))").unwrap());
        let c = parse_term("εx. P(x)").unwrap();
        assert!(c.is_eps());
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_formula("P(a) &\n  & Q").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        let e = parse_formula("exists y. P(eps x. exists y. P(x, y), y)").unwrap_err();
        assert!(e.msg.contains("bound inside"));
        let e = parse_formula("P(a) & P(a, b)").unwrap_err();
        assert!(e.msg.contains("arity"));
        let e = parse_formula("P(f(a), f(a, b))").unwrap_err();
        assert!(e.msg.contains("arity"));
        assert!(parse_formula("P(a) $").is_err());
    }

    #[test]
    fn round_trip_simple() {
        let s = "P(a) -> P(a)";
        assert_eq!(print_expr(&parse_formula(s).unwrap()), s);
        for s in [
            "(P(a) -> Q(a)) -> R(b)",
            "P(a) & (Q(a) & R(a))",
            "~(forall x. P(x)) | Q(c)",
            "P(eps x. (P(x) | Q(eps y. ~Q(y)))) | Q(eps y. ~Q(y))",
            "R(0, S(0), S(S(0)))",
            "forall x. exists y. R(x, y, f(x))",
        ] {
            let e = parse_formula(s).unwrap();
            let back = parse_formula(&print_expr(&e)).unwrap();
            assert!(alpha_eq(&e, &back), "{s}");
        }
    }
}
