//! Analytic expressions in one complex variable `z`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'z' | 'i' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := exp | log | sqrt | sin | cos | atanh
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-z^2`
//! is `-(z^2)`. Conjugation is rejected outright: expressions must be
//! holomorphic.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::jet::{HoloJet, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    I,
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> Complex64 {
        match self {
            NamedConst::I => Complex64::new(0.0, 1.0),
            NamedConst::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            NamedConst::E => Complex64::new(std::f64::consts::E, 0.0),
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedConst::I => "i",
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Atanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "atanh" => Func::Atanh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Atanh => "atanh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Const(NamedConst),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected one of {expected:?}, found {found}")]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("conjugation `{token}` at byte {offset} is not allowed in an analytic expression")]
    Conjugation { offset: usize, token: String },
    #[error("empty expression")]
    Empty,
}

const CONJUGATION_WORDS: &[&str] = &["conj", "conjugate", "zbar", "bar", "zb"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Op(c) => write!(f, "`{c}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = src[i..].chars().next().expect("in bounds");
        match ch {
            c if c.is_whitespace() => i += c.len_utf8(),
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when followed by digits, so `2e` stays `2` then `e`
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("`{text}`"),
                })?;
                out.push((start, Tok::Num(value)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &src[start..i];
                if CONJUGATION_WORDS.contains(&name) {
                    return Err(ParseError::Conjugation {
                        offset: start,
                        token: name.to_string(),
                    });
                }
                out.push((start, Tok::Ident(name.to_string())));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((i, Tok::Op(ch)));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            // combining overline and macron
            '\u{0304}' | '\u{0305}' | '~' => {
                return Err(ParseError::Conjugation {
                    offset: i,
                    token: ch.to_string(),
                });
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: vec!["number", "identifier", "operator", "(", ")"],
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match *self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        const START: &[&str] = &["number", "z", "i", "pi", "e", "function", "(", "-", "+"];
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Number(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "z" => Ok(Expr::Var),
                    "i" => Ok(Expr::Const(NamedConst::I)),
                    "pi" => Ok(Expr::Const(NamedConst::Pi)),
                    "e" => Ok(Expr::Const(NamedConst::E)),
                    other => match Func::from_name(other) {
                        Some(func) => {
                            if *self.peek() != Tok::LParen {
                                return Err(self.unexpected(&["("]));
                            }
                            self.bump();
                            let arg = self.expr()?;
                            self.expect_rparen()?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        }
                        None => Err(ParseError::UnknownIdentifier {
                            offset,
                            name: other.to_string(),
                        }),
                    },
                }
            }
            _ => Err(self.unexpected(START)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[")", "operator"]))
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

// binding strength used by the printer: higher binds tighter
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Binary(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints the minimal-parenthesis normal form; `parse` reads it back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::Const(c) => f.write_str(c.name()),
            Expr::Var => f.write_str("z"),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_wrapped(f, inner, precedence(inner) < 3)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Binary(op, lhs, rhs) => {
                let p = precedence(self);
                let (wrap_l, wrap_r) = match op {
                    BinOp::Pow => (precedence(lhs) <= 4, precedence(rhs) < 3),
                    _ => (precedence(lhs) < p, precedence(rhs) <= p),
                };
                write_wrapped(f, lhs, wrap_l)?;
                write!(f, "{}", op.symbol())?;
                write_wrapped(f, rhs, wrap_r)
            }
        }
    }
}

fn as_integer(x: Complex64) -> Option<i64> {
    if x.im == 0.0 && x.re.fract() == 0.0 && x.re.abs() <= 64.0 {
        Some(x.re as i64)
    } else {
        None
    }
}

impl Expr {
    /// Order-3 jet of the expression at `z0`.
    pub fn eval_jet(&self, z0: Complex64) -> Result<HoloJet> {
        self.jet(z0, MAX_ORDER)
    }

    pub fn jet(&self, z0: Complex64, order: usize) -> Result<HoloJet> {
        let jet = match self {
            Expr::Number(x) => HoloJet::constant(Complex64::new(*x, 0.0), z0, order),
            Expr::Const(c) => HoloJet::constant(c.value(), z0, order),
            Expr::Var => HoloJet::variable(z0, order),
            Expr::Neg(inner) => inner.jet(z0, order)?.neg(),
            Expr::Call(func, arg) => {
                let a = arg.jet(z0, order)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => a.ln()?,
                    Func::Sqrt => a.sqrt()?,
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Atanh => a.atanh()?,
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.jet(z0, order)?;
                let b = rhs.jet(z0, order)?;
                match op {
                    BinOp::Add => a.add(&b)?,
                    BinOp::Sub => a.sub(&b)?,
                    BinOp::Mul => a.mul(&b)?,
                    BinOp::Div => a.div(&b)?,
                    BinOp::Pow => pow_jets(&a, &b)?,
                }
            }
        };
        if !jet.is_finite() {
            return Err(Error::Singular {
                at: z0,
                what: "non-finite value",
            });
        }
        Ok(jet)
    }

    /// Plain complex value, without derivatives.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = match self {
            Expr::Number(x) => Complex64::new(*x, 0.0),
            Expr::Const(c) => c.value(),
            Expr::Var => z,
            Expr::Neg(inner) => -inner.eval(z)?,
            Expr::Call(func, arg) => {
                let a = arg.eval(z)?;
                let nonzero = |what| {
                    if a == Complex64::new(0.0, 0.0) {
                        Err(Error::Singular { at: z, what })
                    } else {
                        Ok(a)
                    }
                };
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => nonzero("logarithm of zero")?.ln(),
                    Func::Sqrt => nonzero("square root of zero")?.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Atanh => {
                        if (a * a - 1.0).norm() == 0.0 {
                            return Err(Error::Singular {
                                at: z,
                                what: "atanh at a branch point",
                            });
                        }
                        a.atanh()
                    }
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(z)?;
                let b = rhs.eval(z)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(Error::Singular {
                                at: z,
                                what: "division by zero",
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => match as_integer(b) {
                        Some(n) if n >= 0 => a.powi(n as i32),
                        Some(n) => {
                            if a == Complex64::new(0.0, 0.0) {
                                return Err(Error::Singular {
                                    at: z,
                                    what: "division by zero",
                                });
                            }
                            a.powi(n as i32)
                        }
                        None => {
                            if a == Complex64::new(0.0, 0.0) {
                                return Err(Error::Singular {
                                    at: z,
                                    what: "non-integer power of zero",
                                });
                            }
                            (b * a.ln()).exp()
                        }
                    },
                }
            }
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Singular {
                at: z,
                what: "non-finite value",
            });
        }
        Ok(v)
    }
}

fn pow_jets(base: &HoloJet, exponent: &HoloJet) -> Result<HoloJet> {
    let constant_exponent = exponent.coeffs()[1..].iter().all(|c| c.norm() == 0.0);
    if constant_exponent {
        match as_integer(exponent.value()) {
            Some(n) => base.powi(n),
            None => base.powc(exponent.value()),
        }
    } else {
        Ok(exponent.mul(&base.ln()?)?.exp())
    }
}
