//! Univariate integrand expressions.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `-x^2` is `-(x^2)`. Implicit multiplication such as `2x` is rejected.

use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::jet::{pow_by_squaring, Elementary, Jet4};

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

/// Parsed expression tree in the single variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Elementary, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedToken(String),
    UnbalancedParenthesis,
    UnknownFunction(String),
    UnknownIdentifier(String),
    InvalidNumber(String),
    TrailingInput(String),
}

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {}", describe(.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::EmptyInput => "empty expression".into(),
        ParseErrorKind::UnexpectedToken(t) => format!("unexpected {t}"),
        ParseErrorKind::UnbalancedParenthesis => "unbalanced parenthesis".into(),
        ParseErrorKind::UnknownFunction(n) => format!("unknown function '{n}'"),
        ParseErrorKind::UnknownIdentifier(n) => format!("unknown identifier '{n}'"),
        ParseErrorKind::InvalidNumber(n) => format!("invalid number '{n}'"),
        ParseErrorKind::TrailingInput(t) => format!("trailing input starting with {t}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only if followed by digits
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
                let invalid = || ParseError {
                    kind: ParseErrorKind::InvalidNumber(text.to_string()),
                    offset: start,
                };
                let mantissa = text.split(['e', 'E']).next().unwrap_or("");
                if mantissa.matches('.').count() > 1 || !mantissa.bytes().any(|b| b.is_ascii_digit()) {
                    return Err(invalid());
                }
                let v: f64 = text.parse().map_err(|_| invalid())?;
                if !v.is_finite() {
                    return Err(invalid());
                }
                out.push((Tok::Num(v), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                out.push((Tok::Op(c as char), start));
            }
            b'(' => {
                i += 1;
                out.push((Tok::LParen, start));
            }
            b')' => {
                i += 1;
                out.push((Tok::RParen, start));
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedToken(format!("character '{ch}'")),
                    offset: start,
                });
            }
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, offset: self.offset() }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn close_paren(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            Tok::End => Err(self.error(ParseErrorKind::UnbalancedParenthesis)),
            t => Err(self.error(ParseErrorKind::UnexpectedToken(format!(
                "{}, expected ')'",
                t.describe()
            )))),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Number(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = Elementary::from_name(&name).ok_or(ParseError {
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                        offset: at,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.close_paren()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Variable),
                    "pi" => Ok(Expr::Number(std::f64::consts::PI)),
                    "e" => Ok(Expr::Number(std::f64::consts::E)),
                    _ => Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), offset: at }),
                }
            }
            Tok::RParen => Err(ParseError { kind: ParseErrorKind::UnbalancedParenthesis, offset: at }),
            t => Err(ParseError { kind: ParseErrorKind::UnexpectedToken(t.describe()), offset: at }),
        }
    }
}

/// Parses an integrand in the variable `x`.
pub fn parse(text: &str) -> std::result::Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(p.error(ParseErrorKind::EmptyInput));
    }
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::RParen => Err(p.error(ParseErrorKind::UnbalancedParenthesis)),
        t => Err(p.error(ParseErrorKind::TrailingInput(t.describe()))),
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}

/// Exponent that is a constant integer, if any. Such powers are expanded by
/// repeated multiplication so polynomial derivatives stay exact.
fn integer_exponent(e: &Expr) -> Option<i64> {
    if e.contains_variable() {
        return None;
    }
    let v = e.eval_value(0.0).ok()?;
    (v.fract() == 0.0 && v.abs() <= 1e15).then_some(v as i64)
}

impl Expr {
    pub fn contains_variable(&self) -> bool {
        match self {
            Expr::Number(_) => false,
            Expr::Variable => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.contains_variable(),
            Expr::Binary(_, l, r) => l.contains_variable() || r.contains_variable(),
        }
    }

    pub fn eval_value(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Expr::Number(v) => *v,
            Expr::Variable => x,
            Expr::Neg(a) => -a.eval_value(x)?,
            Expr::Call(f, a) => f.eval(a.eval_value(x)?)?,
            Expr::Binary(op, l, r) => {
                let u = l.eval_value(x)?;
                match op {
                    BinOp::Add => u + r.eval_value(x)?,
                    BinOp::Sub => u - r.eval_value(x)?,
                    BinOp::Mul => u * r.eval_value(x)?,
                    BinOp::Div => {
                        let v = r.eval_value(x)?;
                        if v == 0.0 {
                            return Err(Error::Pole { at: x });
                        }
                        u / v
                    }
                    BinOp::Pow => match integer_exponent(r) {
                        Some(n) => {
                            let p = pow_by_squaring(u, n.unsigned_abs(), 1.0, |a, b| a * b);
                            if n < 0 {
                                if p == 0.0 {
                                    return Err(Error::Pole { at: x });
                                }
                                1.0 / p
                            } else {
                                p
                            }
                        }
                        None => {
                            let y = r.eval_value(x)?;
                            (y * Elementary::Log.eval(u)?).exp()
                        }
                    },
                }
            }
        })
    }

    pub fn eval_jet4(&self, x: f64) -> Result<Jet4> {
        let seed = Jet4::variable(x)?;
        self.jet_at(seed).map_err(|e| match e {
            Error::Pole { .. } => Error::Pole { at: x },
            e => e,
        })
    }

    fn jet_at(&self, seed: Jet4) -> Result<Jet4> {
        Ok(match self {
            Expr::Number(v) => Jet4::constant(*v),
            Expr::Variable => seed,
            Expr::Neg(a) => -a.jet_at(seed)?,
            Expr::Call(f, a) => a.jet_at(seed)?.apply(*f)?,
            Expr::Binary(op, l, r) => {
                let u = l.jet_at(seed)?;
                match op {
                    BinOp::Add => u + r.jet_at(seed)?,
                    BinOp::Sub => u - r.jet_at(seed)?,
                    BinOp::Mul => u * r.jet_at(seed)?,
                    BinOp::Div => u.checked_div(r.jet_at(seed)?)?,
                    BinOp::Pow => match integer_exponent(r) {
                        Some(n) => u.powi(n)?,
                        None => (r.jet_at(seed)? * u.apply(Elementary::Log)?).apply(Elementary::Exp)?,
                    },
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Number(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    /// Prints with the minimum parentheses needed to re-parse to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{:?}", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Variable => f.write_str("x"),
            Expr::Neg(a) => {
                // operand of a negation is a unary, so anything below power needs parens
                if a.precedence() < 3 {
                    write!(f, "-({a})")
                } else {
                    write!(f, "-{a}")
                }
            }
            Expr::Call(func, a) => write!(f, "{func}({a})"),
            Expr::Binary(op, l, r) => {
                let p = self.precedence();
                // left-assoc ops need parens on an equal-precedence right operand;
                // pow is right-assoc so it needs them on the left.
                let (lp, rp) = match op {
                    BinOp::Pow => (l.precedence() <= p, r.precedence() < 3),
                    _ => (l.precedence() < p, r.precedence() <= p),
                };
                let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
                    if paren {
                        write!(f, "({e})")
                    } else {
                        write!(f, "{e}")
                    }
                };
                wrap(f, l, lp)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, r, rp)
            }
        }
    }
}
