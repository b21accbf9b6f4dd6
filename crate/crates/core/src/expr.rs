//! Text forms of elements: the expression grammar and the term-line format.
//!
//! Grammar (indices are one-based in text):
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary ("*"? unary)*          juxtaposition multiplies
//! unary   := "-" unary | factor
//! factor  := real | real "i" | "x" index ("^" nat)? | "W[" real ("," real)* "]" | "(" sum ")"
//! ```
//!
//! `*` and juxtaposition denote the ordinary commutative product, which is
//! what writing a term c·x^α·e^{ik·x} needs; star products are computed by
//! the library, not written in expressions.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::element::{MoyalElement, Term, C64};
use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool },
    X(usize),
    W,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn err(column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            'W' => Some(Tok::W),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, col));
            i += 1;
            continue;
        }
        if c == 'x' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j == start {
                return Err(err(col, "expected an index after 'x'"));
            }
            let digits: String = chars[start..j].iter().collect();
            let index: usize = digits.parse().map_err(|_| err(col, "index too large"))?;
            if index == 0 {
                return Err(err(col, "indices start at 1"));
            }
            out.push((Tok::X(index), col));
            i = j;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut m = j + 1;
                if m < chars.len() && (chars[m] == '+' || chars[m] == '-') {
                    m += 1;
                }
                if m < chars.len() && chars[m].is_ascii_digit() {
                    while m < chars.len() && chars[m].is_ascii_digit() {
                        m += 1;
                    }
                    j = m;
                }
            }
            let literal: String = chars[i..j].iter().collect();
            let value: f64 = literal
                .parse()
                .map_err(|_| err(col, format!("malformed number '{literal}'")))?;
            let imag = j < chars.len() && chars[j] == 'i';
            out.push((Tok::Num { value, imag }, col));
            i = if imag { j + 1 } else { j };
            continue;
        }
        return Err(err(col, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    s: &'a Arc<SymplecticStructure>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let col = self.col();
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            _ => Err(err(col, format!("expected {what}"))),
        }
    }

    fn sum(&mut self) -> Result<MoyalElement> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.try_add(&self.product()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.try_sub(&self.product()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<MoyalElement> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.pointwise(&self.unary()?)?;
                }
                Some(Tok::Num { .. } | Tok::X(_) | Tok::W | Tok::LParen) => {
                    acc = acc.pointwise(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MoyalElement> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(self.unary()?.scale_re(-1.0));
        }
        self.factor()
    }

    fn signed_real(&mut self) -> Result<f64> {
        let col = self.col();
        let sign = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                -1.0
            }
            Some(Tok::Plus) => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        match self.bump() {
            Some((Tok::Num { value, imag: false }, _)) => Ok(sign * value),
            _ => Err(err(col, "expected a real number")),
        }
    }

    fn factor(&mut self) -> Result<MoyalElement> {
        let d = self.s.dim();
        let col = self.col();
        match self.bump() {
            Some((Tok::Num { value, imag }, _)) => {
                let c = if imag { C64::new(0.0, value) } else { C64::new(value, 0.0) };
                Ok(MoyalElement::constant(self.s, c))
            }
            Some((Tok::X(index), xcol)) => {
                if index > d {
                    return Err(err(xcol, format!("index x{index} exceeds dimension {d}")));
                }
                let mut power = 1u32;
                if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    let pcol = self.col();
                    match self.bump() {
                        Some((Tok::Num { value, imag: false }, _))
                            if value.fract() == 0.0 && (0.0..=1e6).contains(&value) =>
                        {
                            power = value as u32
                        }
                        _ => return Err(err(pcol, "expected a natural exponent")),
                    }
                }
                let mut alpha = vec![0; d];
                alpha[index - 1] = power;
                MoyalElement::monomial(self.s, &alpha, C64::new(1.0, 0.0))
            }
            Some((Tok::W, _)) => {
                self.expect(Tok::LBracket, "'[' after W")?;
                let mut k = vec![self.signed_real()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    k.push(self.signed_real()?);
                }
                self.expect(Tok::RBracket, "']'")?;
                if k.len() != d {
                    return Err(err(col, format!("wave vector has {} components, expected {d}", k.len())));
                }
                MoyalElement::plane_wave(self.s, &k, C64::new(1.0, 0.0))
            }
            Some((Tok::LParen, _)) => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(err(col, "expected a number, monomial, wave or '('")),
        }
    }
}

/// Parses an expression into an element of the given structure.
pub fn parse_expression(text: &str, s: &Arc<SymplecticStructure>) -> Result<MoyalElement> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(err(1, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        s,
    };
    let out = p.sum()?;
    if p.pos < p.toks.len() {
        return Err(err(p.col(), "unexpected trailing input"));
    }
    Ok(out)
}

fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Canonical text of an element; parses back to the same element.
pub fn format_element(e: &MoyalElement) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (n, t) in e.terms().enumerate() {
        if n > 0 {
            out.push_str(" + ");
        }
        let sign = if t.coeff.im.is_sign_negative() && t.coeff.im != 0.0 { '-' } else { '+' };
        let _ = write!(out, "({}{}{}i)", fmt_real(t.coeff.re), sign, fmt_real(t.coeff.im.abs()));
        for (mu, &a) in t.alpha.iter().enumerate() {
            match a {
                0 => {}
                1 => {
                    let _ = write!(out, " x{}", mu + 1);
                }
                _ => {
                    let _ = write!(out, " x{}^{}", mu + 1, a);
                }
            }
        }
        if t.k.iter().any(|&v| v != 0.0) {
            let comps: Vec<String> = t.k.iter().map(|&v| fmt_real(v)).collect();
            let _ = write!(out, " W[{}]", comps.join(","));
        }
    }
    out
}

impl std::fmt::Display for MoyalElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_element(self))
    }
}

/// One term per line: `re im | α₁ … α_D | k₁ … k_D`.
pub fn to_term_lines(e: &MoyalElement) -> String {
    let mut out = String::new();
    for t in e.terms() {
        let alpha: Vec<String> = t.alpha.iter().map(|a| a.to_string()).collect();
        let k: Vec<String> = t.k.iter().map(|&v| fmt_real(v)).collect();
        let _ = writeln!(
            out,
            "{} {} | {} | {}",
            fmt_real(t.coeff.re),
            fmt_real(t.coeff.im),
            alpha.join(" "),
            k.join(" ")
        );
    }
    out
}

/// Inverse of [`to_term_lines`]; `#` starts a comment.
pub fn from_term_lines(text: &str, s: &Arc<SymplecticStructure>) -> Result<MoyalElement> {
    let d = s.dim();
    let mut terms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::InvalidInput(format!("line {}: {m}", lineno + 1));
        let parts: Vec<&str> = line.split('|').collect();
        if parts.len() != 3 {
            return Err(bad("expected three '|'-separated fields"));
        }
        let coeff: Vec<f64> = parts[0]
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("malformed coefficient"))?;
        let alpha: Vec<u32> = parts[1]
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("malformed exponent"))?;
        let k: Vec<f64> = parts[2]
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("malformed wave vector"))?;
        if coeff.len() != 2 || alpha.len() != d || k.len() != d {
            return Err(bad("wrong number of fields"));
        }
        terms.push(Term::new(alpha, k, C64::new(coeff[0], coeff[1])));
    }
    MoyalElement::from_terms(s, terms)
}
