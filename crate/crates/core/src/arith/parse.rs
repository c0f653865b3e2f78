//! Scalar literals: `term (('+'|'-') term)*`, `term := rational ('*'? constname)? 'i'?`.
//!
//! Also accepted: a bare constant or `i` (`pi`, `i`, `pi i`), a trailing
//! `/posint` after a constant (`pi/2`) and `*i`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbolic::{ConstantBasis, SymbolicComplex, SymbolicReal};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            out.push(Tok::Int(text.parse().unwrap()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Tok::Ident(chars[start..k].iter().collect()));
        } else {
            out.push(match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                _ => return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`"))),
            });
            k += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    basis: &'a ConstantBasis,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} in `{}`", self.src))
    }

    fn posint(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(d)) if !d.is_zero() => {
                let d = d.clone();
                self.pos += 1;
                Ok(d)
            }
            Some(Tok::Int(_)) => Err(self.err("zero denominator")),
            _ => Err(self.err("malformed rational")),
        }
    }

    /// One term, returned as (coefficient, constant index, imaginary).
    fn term(&mut self) -> Result<(BigRational, usize, bool)> {
        let mut coeff = BigRational::one();
        let mut seen_rational = false;
        if let Some(Tok::Int(n)) = self.peek() {
            let n = n.clone();
            self.pos += 1;
            coeff = BigRational::from_integer(n);
            if self.eat(&Tok::Slash) {
                coeff /= BigRational::from_integer(self.posint()?);
            }
            seen_rational = true;
        }
        let starred = seen_rational && self.eat(&Tok::Star);
        let mut index = 0;
        let mut imag = false;
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if name == "i" => {
                self.pos += 1;
                imag = true;
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                index = self
                    .basis
                    .index_of(&name)
                    .filter(|&j| j > 0)
                    .ok_or(Error::UnknownConstant(name))?;
                if self.eat(&Tok::Slash) {
                    coeff /= BigRational::from_integer(self.posint()?);
                }
                let star = self.eat(&Tok::Star);
                match self.peek() {
                    Some(Tok::Ident(n)) if n == "i" => {
                        self.pos += 1;
                        imag = true;
                    }
                    _ if star => return Err(self.err("expected `i` after `*`")),
                    _ => {}
                }
            }
            _ if starred => return Err(self.err("expected a constant after `*`")),
            _ if !seen_rational => return Err(self.err("expected a term")),
            _ => {}
        }
        Ok((coeff, index, imag))
    }

    fn expr(&mut self) -> Result<SymbolicComplex> {
        let len = self.basis.len();
        let mut re = SymbolicReal::zero(len);
        let mut im = SymbolicReal::zero(len);
        let mut sign = if self.eat(&Tok::Minus) {
            -1
        } else {
            self.eat(&Tok::Plus);
            1
        };
        loop {
            let (c, j, imag) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            let target = if imag { &mut im } else { &mut re };
            target.coeffs[j] += c;
            if self.eat(&Tok::Plus) {
                sign = 1;
            } else if self.eat(&Tok::Minus) {
                sign = -1;
            } else {
                break;
            }
        }
        if self.pos != self.toks.len() {
            return Err(self.err("trailing input"));
        }
        Ok(SymbolicComplex::new(re, im))
    }
}

/// Parses a scalar literal over `basis`.
pub fn q_decompose(literal: &str, basis: &ConstantBasis) -> Result<SymbolicComplex> {
    let toks = lex(literal)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty scalar literal".into()));
    }
    Parser { toks, pos: 0, basis, src: literal }.expr()
}

fn ratio_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical literal for `x`; `q_decompose(format_scalar(x)) == x`.
pub fn format_scalar(x: &SymbolicComplex, basis: &ConstantBasis) -> String {
    let mut terms: Vec<(bool, String)> = Vec::new();
    for (part, imag) in [(&x.re, false), (&x.im, true)] {
        for (j, c) in part.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match (j, mag.is_one()) {
                (0, true) if imag => String::new(),
                (0, _) => ratio_text(&mag),
                (_, true) => basis.name(j).to_string(),
                (_, false) => format!("{}*{}", ratio_text(&mag), basis.name(j)),
            };
            let text = match (imag, body.is_empty()) {
                (true, true) => "i".to_string(),
                (true, false) => format!("{body} i"),
                (false, _) => body,
            };
            terms.push((c.is_negative(), text));
        }
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (neg, text)) in terms.iter().enumerate() {
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(text);
    }
    out
}
