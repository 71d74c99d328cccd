//! Expressions in `x1, x2, x3` with rational literals: parsing, printing, lowering.
//!
//! Grammar (whitespace insignificant):
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := 'x1' | 'x2' | 'x3' | integer ('/' integer)? | '(' expr ')'
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::geometry::FsFunction;
use crate::scalar::{Cq, Q};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Coordinate `x_i`, `i ∈ {1, 2, 3}`.
    Var(u8),
    Num(Q),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Var(u8),
    Int(usize, usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(start, i)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            match &src[start..i] {
                "x1" => out.push((start, Tok::Var(1))),
                "x2" => out.push((start, Tok::Var(2))),
                "x3" => out.push((start, Tok::Var(3))),
                other => return Err(err(start, format!("unknown identifier '{other}'"))),
            }
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(err(i, format!("unexpected character '{ch}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.0)
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(a, b)) => {
                self.pos += 1;
                Ok(self.src[a..b].parse().expect("digits"))
            }
            _ => Err(err(self.offset(), "expected an integer")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(Tok::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        let n = self.int()?;
        let n: u32 = n.try_into().map_err(|_| err(at, "exponent too large"))?;
        if self.peek() == Some(Tok::Caret) {
            return Err(err(self.offset(), "chained exponents need parentheses"));
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Expr::Var(i))
            }
            Some(Tok::Int(..)) => {
                let num = self.int()?;
                if self.peek() == Some(Tok::Slash) {
                    self.pos += 1;
                    let den_at = self.offset();
                    let den = self.int()?;
                    if den.is_zero() {
                        return Err(err(den_at, "zero denominator"));
                    }
                    return Ok(Expr::Num(Q::new(num, den)));
                }
                Ok(Expr::Num(Q::from_integer(num)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(err(self.offset(), "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(err(at, "expected a variable, number or '('")),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(err(p.offset(), "unexpected token"));
    }
    Ok(e)
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(q) if q.is_negative() || !q.is_integer() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// Exact function on the sphere.
    pub fn lower(&self) -> FsFunction {
        let f = match self {
            Expr::Var(1) => FsFunction::x1(),
            Expr::Var(2) => FsFunction::x2(),
            Expr::Var(_) => FsFunction::x3(),
            Expr::Num(q) => FsFunction::constant(Cq::real(q.clone())),
            Expr::Neg(a) => -a.lower(),
            Expr::Add(a, b) => a.lower() + b.lower(),
            Expr::Sub(a, b) => a.lower() - b.lower(),
            Expr::Mul(a, b) => a.lower() * b.lower(),
            Expr::Pow(a, n) => {
                let base = a.lower();
                (0..*n).fold(FsFunction::one(), |acc, _| (&acc * &base).canonical())
            }
        };
        f.canonical()
    }

    /// Value at a point of the unit sphere in `R³`.
    pub fn eval_sphere(&self, x: [f64; 3]) -> f64 {
        match self {
            Expr::Var(i) => x[*i as usize - 1],
            Expr::Num(q) => crate::scalar::q_to_f64(q),
            Expr::Neg(a) => -a.eval_sphere(x),
            Expr::Add(a, b) => a.eval_sphere(x) + b.eval_sphere(x),
            Expr::Sub(a, b) => a.eval_sphere(x) - b.eval_sphere(x),
            Expr::Mul(a, b) => a.eval_sphere(x) * b.eval_sphere(x),
            Expr::Pow(a, n) => a.eval_sphere(x).powi(*n as i32),
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Num(q) if q.is_negative() => {
                write!(f, "-")?;
                wrap(f, &Expr::Num(-q.clone()), 3)
            }
            Expr::Num(q) => write!(f, "{q}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Expr::Pow(a, n) => {
                wrap(f, a, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}
