//! On-disk formats.
//!
//! * `.fml`: one formula (comments start with `#`).
//! * `.prf`: a proof, one record per line:
//!   ```text
//!   calculus PC_eps
//!   hyp H1: P(c)
//!   1: P(c) -> exists x. P(x)   [exists-ax]
//!   2: ...                      [critical eps x. P(x)]
//!   3: ...                      [mp 1 2]
//!   ```
//!   Justifications: `taut`, `critical [TERM]`, `exists-ax`, `forall-ax`,
//!   `mp I J` (step `J` is `A_I -> A`), `gen-forall I VAR`,
//!   `gen-exists I VAR`, `hyp LABEL`. Step numbers are 1-based.
//! * `.hbd`: a Herbrand certificate (matrix, parameters, substitution rows,
//!   length and bound).

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::kernel::{critical_term, Calculus, Justification, Proof, Step};
use crate::parser::{parse_formula_at, parse_term};
use crate::print::print_expr;
use crate::syntax::{name, Expr, Name};

fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Reads a `.fml` document.
pub fn parse_formula_doc(src: &str) -> Result<Expr, ParseError> {
    let text: Vec<&str> = src.lines().map(strip_comment).collect();
    parse_formula_at(&text.join("\n"), 0)
}

pub fn print_formula_doc(e: &Expr) -> String {
    format!("{}\n", print_expr(e))
}

/// Reads a `.prf` document.
pub fn parse_proof(src: &str) -> Result<Proof, ParseError> {
    let mut calculus = None;
    let mut proof = Proof::new(Calculus::PcEps);
    for (ln, raw) in src.lines().enumerate() {
        let line_no = ln + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix("calculus") {
            let tag = rest.trim();
            calculus = Some(
                Calculus::from_tag(tag)
                    .ok_or_else(|| err(line_no, indent + 1, format!("unknown calculus {tag:?}")))?,
            );
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("hyp ") {
            let (label, f) = rest
                .split_once(':')
                .ok_or_else(|| err(line_no, indent + 1, "expected 'hyp LABEL: formula'"))?;
            let f = parse_formula_at(f, ln).map_err(|mut e| {
                if e.line == line_no {
                    e.col += indent + 4 + label.len() + 1;
                }
                e
            })?;
            proof.hypotheses.push((label.trim().to_string(), f));
            continue;
        }
        let (num, rest) = trimmed
            .split_once(':')
            .ok_or_else(|| err(line_no, indent + 1, "expected 'N: formula [justification]'"))?;
        let n: usize = num
            .trim()
            .parse()
            .map_err(|_| err(line_no, indent + 1, format!("bad step number {num:?}")))?;
        if n != proof.steps.len() + 1 {
            return Err(err(
                line_no,
                indent + 1,
                format!("expected step {}, found {n}", proof.steps.len() + 1),
            ));
        }
        let open = rest
            .rfind('[')
            .ok_or_else(|| err(line_no, line.len(), "missing [justification]"))?;
        let close = rest
            .rfind(']')
            .filter(|&c| c > open)
            .ok_or_else(|| err(line_no, line.len(), "unterminated [justification]"))?;
        let fcol = indent + num.len() + 2;
        let formula = parse_formula_at(&rest[..open], ln).map_err(|mut e| {
            if e.line == line_no {
                e.col += fcol;
            }
            e
        })?;
        let jcol = fcol + open + 2;
        let just = parse_justification(&rest[open + 1..close], &formula, n, line_no, jcol)?;
        proof.steps.push(Step { formula, just });
    }
    proof.calculus = calculus.ok_or_else(|| err(1, 1, "missing 'calculus' line"))?;
    Ok(proof)
}

fn parse_justification(
    s: &str,
    formula: &Expr,
    step: usize,
    line: usize,
    col: usize,
) -> Result<Justification, ParseError> {
    let words: Vec<&str> = s.split_whitespace().collect();
    let index = |w: Option<&&str>| -> Result<usize, ParseError> {
        let w = w.ok_or_else(|| err(line, col, "missing premise index"))?;
        let i: usize = w
            .parse()
            .map_err(|_| err(line, col, format!("bad premise index {w:?}")))?;
        if i == 0 || i >= step {
            return Err(err(
                line,
                col,
                format!("step {step}: premise {i} does not refer to an earlier step"),
            ));
        }
        Ok(i - 1)
    };
    let var = |w: Option<&&str>| -> Result<Name, ParseError> {
        w.map(|v| name(v))
            .ok_or_else(|| err(line, col, "missing eigenvariable"))
    };
    Ok(match words.first().copied() {
        Some("taut") if words.len() == 1 => Justification::Tautology,
        Some("exists-ax") if words.len() == 1 => Justification::ExistsAxiom,
        Some("forall-ax") if words.len() == 1 => Justification::ForallAxiom,
        Some("mp") if words.len() == 3 => Justification::ModusPonens(index(words.get(1))?, index(words.get(2))?),
        Some("gen-forall") if words.len() == 3 => {
            Justification::GenForall(index(words.get(1))?, var(words.get(2))?)
        }
        Some("gen-exists") if words.len() == 3 => {
            Justification::GenExists(index(words.get(1))?, var(words.get(2))?)
        }
        Some("hyp") if words.len() == 2 => Justification::Hypothesis(words[1].to_string()),
        Some("critical") => {
            let rest = s.trim_start()["critical".len()..].trim();
            if rest.is_empty() {
                Justification::Critical(critical_term(formula).ok_or_else(|| {
                    err(line, col, "cannot determine the ε-term of this critical formula")
                })?)
            } else {
                Justification::Critical(parse_term(rest).map_err(|e| err(line, col + e.col, e.msg))?)
            }
        }
        _ => return Err(err(line, col, format!("unknown justification {s:?}"))),
    })
}

pub fn print_justification(j: &Justification) -> String {
    match j {
        Justification::Tautology => "taut".into(),
        Justification::Critical(e) => format!("critical {}", print_expr(e)),
        Justification::ExistsAxiom => "exists-ax".into(),
        Justification::ForallAxiom => "forall-ax".into(),
        Justification::ModusPonens(i, j) => format!("mp {} {}", i + 1, j + 1),
        Justification::GenForall(i, a) => format!("gen-forall {} {a}", i + 1),
        Justification::GenExists(i, a) => format!("gen-exists {} {a}", i + 1),
        Justification::Hypothesis(l) => format!("hyp {l}"),
    }
}

/// Writes a `.prf` document.
pub fn print_proof(p: &Proof) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "calculus {}", p.calculus.tag());
    for (l, h) in &p.hypotheses {
        let _ = writeln!(s, "hyp {l}: {}", print_expr(h));
    }
    for (k, st) in p.steps.iter().enumerate() {
        let _ = writeln!(
            s,
            "{}: {} [{}]",
            k + 1,
            print_expr(&st.formula),
            print_justification(&st.just)
        );
    }
    s
}

/// A Herbrand certificate: the disjunction of `matrix` instances given by
/// `rows` (one term per parameter), with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerbrandCertificate {
    pub matrix: Expr,
    pub params: Vec<Name>,
    pub rows: Vec<Vec<Expr>>,
    pub cc: Option<usize>,
    pub bound: Option<String>,
    pub tautology: Option<bool>,
}

impl HerbrandCertificate {
    pub fn length(&self) -> usize {
        self.rows.len()
    }

    /// The disjuncts `matrix{params ← row}`.
    pub fn instances(&self) -> Vec<Expr> {
        self.rows
            .iter()
            .map(|r| {
                let pairs: Vec<(Name, Expr)> =
                    self.params.iter().cloned().zip(r.iter().cloned()).collect();
                crate::syntax::substitute_many(&self.matrix, &pairs)
            })
            .collect()
    }

    pub fn disjunction(&self) -> Expr {
        Expr::disj(&self.instances())
    }
}

pub fn print_certificate(c: &HerbrandCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "matrix: {}", print_expr(&c.matrix));
    let params: Vec<&str> = c.params.iter().map(|p| &**p).collect();
    let _ = writeln!(s, "params: {}", params.join(", "));
    for (i, r) in c.rows.iter().enumerate() {
        let ts: Vec<String> = r.iter().map(print_expr).collect();
        let _ = writeln!(s, "row {}: {}", i + 1, ts.join(", "));
    }
    let _ = writeln!(s, "length: {}", c.rows.len());
    if let Some(cc) = c.cc {
        let _ = writeln!(s, "cc: {cc}");
    }
    if let Some(b) = &c.bound {
        let _ = writeln!(s, "bound: {b}");
    }
    if let Some(t) = c.tautology {
        let _ = writeln!(s, "tautology: {t}");
    }
    s
}

/// Splits a comma-separated term list, respecting parentheses.
fn split_terms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(&s[start..]);
    }
    out
}

pub fn parse_certificate(src: &str) -> Result<HerbrandCertificate, ParseError> {
    let mut matrix = None;
    let mut params = None;
    let mut rows = Vec::new();
    let (mut cc, mut bound, mut tautology, mut length) = (None, None, None, None);
    for (ln, raw) in src.lines().enumerate() {
        let line_no = ln + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once(':')
            .ok_or_else(|| err(line_no, 1, "expected 'key: value'"))?;
        let val = val.trim();
        match key.trim() {
            "matrix" => matrix = Some(parse_formula_at(val, ln)?),
            "params" => {
                params = Some(
                    val.split(',')
                        .map(|p| p.trim())
                        .filter(|p| !p.is_empty())
                        .map(name)
                        .collect::<Vec<_>>(),
                )
            }
            k if k.starts_with("row") => {
                let terms = split_terms(val)
                    .into_iter()
                    .map(|t| parse_term(t.trim()).map_err(|e| err(line_no, e.col, e.msg)))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(terms);
            }
            "length" => length = Some(val.parse::<usize>().map_err(|_| err(line_no, 1, "bad length"))?),
            "cc" => cc = Some(val.parse::<usize>().map_err(|_| err(line_no, 1, "bad cc"))?),
            "bound" => bound = Some(val.to_string()),
            "tautology" => tautology = Some(val == "true"),
            k => return Err(err(line_no, 1, format!("unknown key {k:?}"))),
        }
    }
    let matrix = matrix.ok_or_else(|| err(1, 1, "missing matrix"))?;
    let params = params.unwrap_or_default();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != params.len()) {
        return Err(err(
            1,
            1,
            format!("row {} has {} terms, expected {}", i + 1, r.len(), params.len()),
        ));
    }
    if length.is_some_and(|l| l != rows.len()) {
        return Err(err(1, 1, "length does not match the number of rows"));
    }
    Ok(HerbrandCertificate {
        matrix,
        params,
        rows,
        cc,
        bound,
        tautology,
    })
}
