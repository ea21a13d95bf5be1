//! The textual box format.
//!
//! ```text
//! box box11 {
//!   vertices 1, 2;
//!   solid a1: 1 -> 1;
//!   solid a2: 2 -> 2;
//!   solid b: 2 -> 1;
//!   dotted v: 1 ..> 2;
//!   d(a1) = b*v;
//!   d(a2) = -v*b;
//! }
//! ```
//!
//! Products are written left to right and applied right to left. Unlisted
//! differentials are zero; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;
use thiserror::Error;

use crate::boxcore::{BoxError, FreeBox};
use crate::freecat::{compose_all, ArrowKind, GradedElement};
use crate::scalar::{parse_rational, Coeff};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown arrow {name}")]
    UnknownArrow { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {msg}")]
    Semantic { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Box(#[from] BoxError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: [&str; 13] = ["..>", "->", "{", "}", "(", ")", ",", ";", ":", "=", "+", "-", "*"];

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '~'
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line_no, col) = (ln + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && is_ident_char(chars[i]) {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col,
                        msg: "identifiers must start with a letter or underscore".into(),
                    });
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Number(s), line: line_no, col });
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(s), line: line_no, col });
                continue;
            }
            let rest: String = chars[i..].iter().collect();
            match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    out.push(Token { tok: Tok::Punct(p), line: line_no, col });
                    i += p.len();
                }
                None => {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        col,
                        msg: format!("unexpected character {c:?}"),
                    })
                }
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// One parsed term: coefficient and arrow names with their positions.
type RawTerm = (Coeff, Vec<(String, usize, usize)>);

struct RawDiff {
    arrow: String,
    line: usize,
    col: usize,
    terms: Vec<RawTerm>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.is_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{p}'"))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Ident(s), line, col }) => {
                self.pos += 1;
                Ok((s, line, col))
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn vertex(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Ident(s), .. }) => {
                self.pos += 1;
                Ok(s)
            }
            Some(Token { tok: Tok::Number(s), .. }) if !s.contains('/') => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a vertex id"),
        }
    }

    fn expr(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        if matches!(self.peek(), Some(Token { tok: Tok::Number(s), .. }) if s == "0")
            && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Punct(";"))
        {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut terms = Vec::new();
        let mut sign = Coeff::one();
        if self.is_punct("-") {
            self.pos += 1;
            sign = -sign;
        } else if self.is_punct("+") {
            self.pos += 1;
        }
        loop {
            terms.push(self.term(sign.clone())?);
            if self.is_punct("+") {
                self.pos += 1;
                sign = Coeff::one();
            } else if self.is_punct("-") {
                self.pos += 1;
                sign = -Coeff::one();
            } else {
                return Ok(terms);
            }
        }
    }

    fn term(&mut self, sign: Coeff) -> Result<RawTerm, ParseError> {
        let mut coeff = sign;
        if let Some(Token { tok: Tok::Number(s), .. }) = self.peek().cloned() {
            self.pos += 1;
            let c = match parse_rational(&s) {
                Ok(c) => c,
                Err(e) => return self.err(e.to_string()),
            };
            coeff *= c;
            self.expect_punct("*")?;
        }
        let mut names = vec![self.ident()?];
        while self.is_punct("*") {
            self.pos += 1;
            names.push(self.ident()?);
        }
        Ok((coeff, names))
    }
}

/// Parses a box file.
pub fn parse_box(text: &str) -> Result<FreeBox, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    match p.ident()? {
        (k, _, _) if k == "box" => {}
        _ => {
            p.pos -= 1;
            return p.err("expected 'box'");
        }
    }
    let (name, _, _) = p.ident()?;
    p.expect_punct("{")?;
    let mut b = FreeBox::new(&name);
    let mut arrows: Vec<(String, String, String, ArrowKind, usize, usize)> = Vec::new();
    let mut diffs: Vec<RawDiff> = Vec::new();
    loop {
        if p.is_punct("}") {
            p.pos += 1;
            break;
        }
        let (kw, line, col) = p.ident()?;
        match kw.as_str() {
            "vertices" => {
                b.add_vertex(&p.vertex()?);
                while p.is_punct(",") {
                    p.pos += 1;
                    b.add_vertex(&p.vertex()?);
                }
            }
            "solid" | "dotted" => {
                let (id, _, _) = p.ident()?;
                p.expect_punct(":")?;
                let s = p.vertex()?;
                let kind = if kw == "solid" {
                    p.expect_punct("->")?;
                    ArrowKind::Solid
                } else {
                    p.expect_punct("..>")?;
                    ArrowKind::Dotted
                };
                let t = p.vertex()?;
                arrows.push((id, s, t, kind, line, col));
            }
            "d" => {
                p.expect_punct("(")?;
                let (arrow, aline, acol) = p.ident()?;
                p.expect_punct(")")?;
                p.expect_punct("=")?;
                let terms = p.expr()?;
                diffs.push(RawDiff { arrow, line: aline, col: acol, terms });
            }
            _ => {
                p.pos -= 1;
                return p.err(format!("unknown declaration '{kw}'"));
            }
        }
        p.expect_punct(";")?;
    }
    if p.peek().is_some() {
        return p.err("trailing input after closing brace");
    }
    for (id, s, t, kind, line, col) in arrows {
        let a = crate::freecat::ArrowRef::new(&id, &s, &t, kind);
        b.add_arrow(a).map_err(|e| ParseError::Semantic { line, col, msg: e.to_string() })?;
    }
    let mut seen = BTreeMap::new();
    for d in diffs {
        if seen.insert(d.arrow.clone(), ()).is_some() {
            return Err(ParseError::Semantic {
                line: d.line,
                col: d.col,
                msg: format!("d({}) given twice", d.arrow),
            });
        }
        let target = b.arrow(&d.arrow).map_err(|_| ParseError::UnknownArrow {
            line: d.line,
            col: d.col,
            name: d.arrow.clone(),
        })?;
        let (src, tgt) = (target.source.clone(), target.target.clone());
        let value = build_element(&b, &d.terms, d.line, d.col, (&src, &tgt))?;
        b.set_differential_unchecked(&d.arrow, value);
    }
    Ok(b)
}

fn build_element(
    b: &FreeBox,
    terms: &[RawTerm],
    line: usize,
    col: usize,
    default_ends: (&str, &str),
) -> Result<GradedElement, ParseError> {
    let mut acc: Option<GradedElement> = None;
    for (coeff, names) in terms {
        let factors = names
            .iter()
            .map(|(n, l, c)| {
                b.arrow(n)
                    .map(GradedElement::arrow)
                    .map_err(|_| ParseError::UnknownArrow { line: *l, col: *c, name: n.clone() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let prod = compose_all(&factors)
            .map_err(|e| ParseError::Semantic { line, col, msg: e.to_string() })?
            .scale(coeff);
        acc = Some(match acc {
            None => prod,
            Some(a) => a
                .add(&prod)
                .map_err(|e| ParseError::Semantic { line, col, msg: e.to_string() })?,
        });
    }
    Ok(acc.unwrap_or_else(|| GradedElement::zero(default_ends.0, default_ends.1)))
}

/// Parses a single expression over the arrows of `b`; `ends` fixes the
/// endpoints of the zero element.
pub fn parse_element(b: &FreeBox, text: &str, ends: (&str, &str)) -> Result<GradedElement, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    p.toks.push(Token { tok: Tok::Punct(";"), line: 1, col: text.len() + 1 });
    let terms = p.expr()?;
    p.expect_punct(";")?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    build_element(b, &terms, 1, 1, ends)
}

/// Canonical text: vertices, then solid and dotted arrows by id, then the
/// nonzero differentials by arrow id.
pub fn print_box(b: &FreeBox) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "box {} {{", b.name());
    let vs = b.vertices();
    if !vs.is_empty() {
        let _ = writeln!(out, "  vertices {};", vs.join(", "));
    }
    for a in b.solid_arrows() {
        let _ = writeln!(out, "  solid {}: {} -> {};", a.id, a.source, a.target);
    }
    for a in b.dotted_arrows() {
        let _ = writeln!(out, "  dotted {}: {} ..> {};", a.id, a.source, a.target);
    }
    for (id, e) in b.nonzero_differentials() {
        let _ = writeln!(out, "  d({id}) = {e};");
    }
    out.push_str("}\n");
    out
}
