//! Surface syntax for polynomials, e.g. `t^2*z1*z2 - z2*z1` or
//! `(1/2)*t1^-1*z1^3 + 3`.
//!
//! Generators are `z1, z2, …`; torus parameters are `t1, t2, …` (`t` alone
//! is `t1`). Multiplication must be explicit. Exponents are integers and
//! may be negative only on invertible constants such as `t^-2`.

use crate::algebra::{Coeff, Field, FreePoly, Laurent, LaurentRing, Scalar, Word};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Z(u32),
    T(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(format!("parse error at {pos}: {}", msg.into())))
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let j = digits(i);
                out.push((start, Tok::Int(s[i..j].to_string())));
                i = j;
                continue;
            }
            b'z' | b't' => {
                let j = digits(i + 1);
                let idx = if j == i + 1 {
                    if c == b'z' {
                        return err(i, "generator needs an index, as in z1");
                    }
                    1
                } else {
                    match s[i + 1..j].parse::<usize>() {
                        Ok(k) if k >= 1 && k <= u32::MAX as usize => k,
                        _ => return err(i, "index must be a positive integer"),
                    }
                };
                out.push((start, if c == b'z' { Tok::Z(idx as u32) } else { Tok::T(idx) }));
                i = j;
                continue;
            }
            _ => return err(i, format!("unexpected character {:?}", c as char)),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Options fixing the ambient algebra; zero means "infer from the text".
#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    pub field: Field,
    pub n: usize,
    pub r: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            field: Field::Rational,
            n: 0,
            r: 0,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    n: usize,
    ring: LaurentRing,
}

type P = FreePoly<Laurent>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<P> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<P> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = &acc * &self.unary()?;
            } else if self.eat(&Tok::Slash) {
                let at = self.at();
                let d = self.unary()?;
                let Some(inv) = self.invert_constant(&d) else {
                    return err(at, "can only divide by a nonzero constant or a t-monomial");
                };
                acc = &acc * &inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<P> {
        if self.eat(&Tok::Minus) {
            return Ok(-&self.unary()?);
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat(&Tok::LParen);
        let neg = self.eat(&Tok::Minus);
        let at = self.at();
        let v = match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.pos += 1;
                match s.parse::<i64>() {
                    Ok(v) => v,
                    Err(_) => return err(at, "exponent too large"),
                }
            }
            _ => return err(at, "expected an integer exponent"),
        };
        if paren && !self.eat(&Tok::RParen) {
            return err(self.at(), "expected ')'");
        }
        Ok(if neg { -v } else { v })
    }

    fn power(&mut self) -> Result<P> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let at = self.at();
        let e = self.exponent()?;
        if e >= 0 {
            if e > 10_000 {
                return err(at, "exponent too large");
            }
            return Ok(base.pow(e as u32));
        }
        match self.invert_constant(&base) {
            Some(inv) => Ok(inv.pow((-e) as u32)),
            None => err(at, "negative exponents need an invertible constant base"),
        }
    }

    fn invert_constant(&self, p: &P) -> Option<P> {
        if p.len() != 1 {
            return None;
        }
        let (w, c) = p.terms().next()?;
        if !w.is_empty() {
            return None;
        }
        let (e, s) = c.as_monomial()?;
        let inv = Laurent::monomial(self.ring, e.iter().map(|x| -x).collect(), s.inv()?);
        Some(P::constant(self.n, &self.ring, inv))
    }

    fn atom(&mut self) -> Result<P> {
        let at = self.at();
        let field = self.ring.field;
        match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.pos += 1;
                let v = Scalar::parse(field, &s)?;
                Ok(P::constant(self.n, &self.ring, Laurent::constant(self.ring, v)))
            }
            Some(Tok::Z(i)) => {
                self.pos += 1;
                Ok(P::monomial(self.n, &self.ring, Word::letter(i), Laurent::one(&self.ring)))
            }
            Some(Tok::T(j)) => {
                self.pos += 1;
                let mut e = vec![0i64; self.ring.r];
                e[j - 1] = 1;
                let c = Laurent::monomial(self.ring, e, Scalar::one(field));
                Ok(P::constant(self.n, &self.ring, c))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return err(self.at(), "expected ')'");
                }
                Ok(inner)
            }
            Some(t) => err(at, format!("unexpected token {t:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parses an expression into a polynomial with Laurent coefficients in
/// `r` parameters (r may be 0).
pub fn parse_laurent(text: &str, opts: ParseOptions) -> Result<FreePoly<Laurent>> {
    let toks = tokenize(text)?;
    let max_z = toks
        .iter()
        .filter_map(|(_, t)| if let Tok::Z(i) = t { Some(*i as usize) } else { None })
        .max()
        .unwrap_or(0);
    let max_t = toks
        .iter()
        .filter_map(|(_, t)| if let Tok::T(j) = t { Some(*j) } else { None })
        .max()
        .unwrap_or(0);
    if opts.n != 0 && max_z > opts.n {
        return err(0, format!("z{max_z} exceeds n = {}", opts.n));
    }
    if opts.r != 0 && max_t > opts.r {
        return err(0, format!("t{max_t} exceeds r = {}", opts.r));
    }
    let n = if opts.n == 0 { max_z.max(1) } else { opts.n };
    let r = if opts.r == 0 { max_t } else { opts.r };
    let mut p = Parser {
        end: text.len(),
        toks,
        pos: 0,
        n,
        ring: LaurentRing::new(opts.field, r),
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return err(p.at(), "trailing input");
    }
    Ok(out)
}

/// Parses a scalar-coefficient polynomial; parameters t are rejected.
pub fn parse_poly(text: &str, field: Field, n: usize) -> Result<FreePoly<Scalar>> {
    let p = parse_laurent(text, ParseOptions { field, n, r: 0 })?;
    if p.ring().r != 0 {
        return Err(Error::InvalidInput(
            "torus parameters are not allowed in a scalar polynomial".into(),
        ));
    }
    let field_only = field;
    Ok(p.map_coeffs(&field_only, |c| c.constant_term()))
}

/// Parses several expressions into one algebra, with n and r taken as the
/// maximum over all of them unless fixed in `opts`.
pub fn parse_many(texts: &[&str], opts: ParseOptions) -> Result<Vec<FreePoly<Laurent>>> {
    let mut n = opts.n;
    let mut r = opts.r;
    if n == 0 || r == 0 {
        for t in texts {
            let p = parse_laurent(t, ParseOptions { n: opts.n, r: opts.r, ..opts })?;
            if opts.n == 0 {
                n = n.max(p.n());
            }
            if opts.r == 0 {
                r = r.max(p.ring().r);
            }
        }
    }
    texts
        .iter()
        .map(|t| parse_laurent(t, ParseOptions { field: opts.field, n, r }))
        .collect()
}
