//! Closed-form entire functions: AST, parser, printer and series evaluation.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::series::{self, JetScalar};
use super::FunctionError;
use crate::numeric::exact::{is_integer, parse_decimal};
use crate::numeric::{GaussRational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by a constant subexpression only.
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn constant(c: impl Into<Scalar>) -> Expr {
        Expr::Const(c.into())
    }

    pub fn depends_on_z(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.depends_on_z() || b.depends_on_z(),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) => a.depends_on_z(),
        }
    }

    pub fn as_const(&self) -> Option<&Scalar> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Taylor coefficients of the expression at `z0` up to `order`.
    pub fn series<T: JetScalar>(&self, z0: &T, order: usize, prec: usize) -> Vec<T> {
        let len = order + 1;
        match self {
            Expr::Const(c) => series::constant(T::lift(c), len),
            Expr::Var => series::variable(z0.clone(), len),
            Expr::Add(a, b) => series::add(&a.series(z0, order, prec), &b.series(z0, order, prec)),
            Expr::Sub(a, b) => series::sub(&a.series(z0, order, prec), &b.series(z0, order, prec)),
            Expr::Mul(a, b) => series::mul(&a.series(z0, order, prec), &b.series(z0, order, prec)),
            Expr::Div(a, b) => {
                let d = b.series(z0, 0, prec).remove(0);
                let inv = d.inv().unwrap_or_else(T::zero);
                series::scale(&a.series(z0, order, prec), &inv)
            }
            Expr::Neg(a) => series::neg(&a.series(z0, order, prec)),
            Expr::Pow(a, e) if *e >= 0 => series::powu(&a.series(z0, order, prec), *e as u64),
            Expr::Pow(a, e) => {
                // negative powers only occur on constant bases
                let v = a.series(z0, 0, prec).remove(0);
                let p = series::powu(&[v], e.unsigned_abs()).remove(0);
                series::constant(p.inv().unwrap_or_else(T::zero), len)
            }
            Expr::Exp(a) => series::exp(&a.series(z0, order, prec), prec),
        }
    }

    pub fn eval<T: JetScalar>(&self, z: &T, prec: usize) -> T {
        self.series(z, 0, prec).remove(0)
    }

    fn check_entire(&self) -> Result<(), String> {
        match self {
            Expr::Const(_) | Expr::Var => Ok(()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.check_entire()?;
                b.check_entire()
            }
            Expr::Div(a, b) => {
                if b.depends_on_z() {
                    return Err("division by a non-constant expression".into());
                }
                a.check_entire()?;
                b.check_entire()
            }
            Expr::Pow(a, e) => {
                if *e < 0 && a.depends_on_z() {
                    return Err("negative power of a non-constant expression".into());
                }
                a.check_entire()
            }
            Expr::Neg(a) | Expr::Exp(a) => a.check_entire(),
        }
    }
}

/// An entire function given by a closed-form expression in `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprFunction {
    ast: Expr,
}

impl ExprFunction {
    /// Wraps an AST after checking that it is entire by construction.
    pub fn new(ast: Expr) -> Result<Self, FunctionError> {
        ast.check_entire().map_err(|reason| FunctionError::NonEntire { offset: None, reason })?;
        Ok(ExprFunction { ast })
    }

    pub fn parse(source: &str) -> Result<Self, FunctionError> {
        parse_expr(source)
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// `f(z)` at `prec` bits when `z` is exact.
    pub fn eval(&self, z: &Scalar, prec: usize) -> Scalar {
        self.ast.eval(z, prec)
    }

    pub fn eval_c64(&self, z: num_complex::Complex<f64>) -> num_complex::Complex<f64> {
        self.ast.eval(&z, 53)
    }

    /// `(f(z0), f'(z0), ..., f^(order)(z0))`.
    pub fn derivatives<T: JetScalar>(&self, z0: &T, order: usize, prec: usize) -> Vec<T> {
        series::to_derivatives(self.ast.series(z0, order, prec))
    }
}

impl fmt::Display for ExprFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(&self.ast))
    }
}

impl Serialize for ExprFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExprFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_expr(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// folding

fn fold(e: Expr) -> Result<Expr, String> {
    use Expr::*;
    Ok(match e {
        Add(a, b) => match (*a, *b) {
            (Const(x), Const(y)) => Const(x + y),
            (a, b) => Add(Box::new(a), Box::new(b)),
        },
        Sub(a, b) => match (*a, *b) {
            (Const(x), Const(y)) => Const(x - y),
            (a, b) => Sub(Box::new(a), Box::new(b)),
        },
        Mul(a, b) => match (*a, *b) {
            (Const(x), Const(y)) => Const(x * y),
            (a, b) => Mul(Box::new(a), Box::new(b)),
        },
        Div(a, b) => match (*a, *b) {
            (_, Const(y)) if y.is_zero() => return Err("division by zero".into()),
            (Const(x), Const(y)) => Const(x / y),
            (a, b) => Div(Box::new(a), Box::new(b)),
        },
        Neg(a) => match *a {
            Const(x) => Const(-x),
            a => Neg(Box::new(a)),
        },
        Pow(a, n) => match *a {
            Const(x) if n >= 0 => Const(x.powi(n as u32)),
            Const(x) if x.is_zero() => return Err("division by zero".into()),
            Const(x) => Const(Scalar::one() / x.powi(n.unsigned_abs() as u32)),
            a => Pow(Box::new(a), n),
        },
        other => other,
    })
}

// ---------------------------------------------------------------------------
// parser

/// Syntax error at a byte offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: expected {}, found {}", self.offset, self.expected.join(" or "), self.found)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Imag(BigRational),
    Z,
    I,
    Exp,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".into(),
            Tok::Imag(_) => "imaginary literal".into(),
            Tok::Z => "'z'".into(),
            Tok::I => "'i'".into(),
            Tok::Exp => "'exp'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
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
            out.push((t, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let mut value = parse_decimal(&src[start..i]).ok_or_else(|| ParseError {
                offset: start,
                expected: vec!["number".into()],
                found: format!("'{}'", &src[start..i]),
            })?;
            // optional exponent: e.g. 1.5e-3
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                let digits_start = j;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j > digits_start && !(j < bytes.len() && bytes[j].is_ascii_alphabetic()) {
                    let e: i64 = src[i + 1..j].trim_start_matches('+').parse().map_err(|_| ParseError {
                        offset: i,
                        expected: vec!["exponent".into()],
                        found: format!("'{}'", &src[i..j]),
                    })?;
                    let ten = BigRational::from_integer(BigInt::from(10));
                    let f = num_traits::pow(ten, e.unsigned_abs() as usize);
                    value = if e >= 0 { value * f } else { value / f };
                    i = j;
                }
            }
            if i < bytes.len() && bytes[i] == b'i' && !(i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric()) {
                out.push((Tok::Imag(value), start));
                i += 1;
            } else {
                out.push((Tok::Num(value), start));
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let tok = match &src[start..i] {
                "z" => Tok::Z,
                "i" => Tok::I,
                "exp" => Tok::Exp,
                word => {
                    return Err(ParseError {
                        offset: start,
                        expected: vec!["'z'".into(), "'i'".into(), "'exp'".into()],
                        found: format!("'{word}'"),
                    })
                }
            };
            out.push((tok, start));
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError { offset: start, expected: vec!["expression".into()], found: format!("'{ch}'") });
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult = Result<Expr, FunctionError>;

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

    fn error(&self, expected: &[&str]) -> FunctionError {
        FunctionError::Parse(ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn fold_at(&self, e: Expr, offset: usize) -> PResult {
        fold(e).map_err(|reason| FunctionError::NonEntire { offset: Some(offset), reason })
    }

    fn expr(&mut self) -> PResult {
        let mut lhs = self.term()?;
        loop {
            let off = self.offset();
            let node = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    Expr::Add(Box::new(lhs), Box::new(self.term()?))
                }
                Tok::Minus => {
                    self.bump();
                    Expr::Sub(Box::new(lhs), Box::new(self.term()?))
                }
                _ => return Ok(lhs),
            };
            lhs = self.fold_at(node, off)?;
        }
    }

    fn term(&mut self) -> PResult {
        let mut lhs = self.unary()?;
        loop {
            let off = self.offset();
            let node = match self.peek() {
                Tok::Star => {
                    self.bump();
                    Expr::Mul(Box::new(lhs), Box::new(self.unary()?))
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs.depends_on_z() {
                        return Err(FunctionError::NonEntire {
                            offset: Some(off),
                            reason: "division by a non-constant expression".into(),
                        });
                    }
                    Expr::Div(Box::new(lhs), Box::new(rhs))
                }
                _ => return Ok(lhs),
            };
            lhs = self.fold_at(node, off)?;
        }
    }

    fn unary(&mut self) -> PResult {
        let off = self.offset();
        match self.peek() {
            Tok::Minus => {
                self.bump();
                let inner = self.unary()?;
                self.fold_at(Expr::Neg(Box::new(inner)), off)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> PResult {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let off = self.offset();
        self.bump();
        let exp_off = self.offset();
        let exponent = self.unary()?;
        let n = match exponent.as_const() {
            Some(Scalar::Exact(q)) if is_integer(q) => q.re.to_integer().to_i64().ok_or_else(|| FunctionError::NonEntire {
                offset: Some(exp_off),
                reason: "exponent out of range".into(),
            })?,
            _ => {
                return Err(FunctionError::NonEntire {
                    offset: Some(exp_off),
                    reason: "exponent must be an integer constant".into(),
                })
            }
        };
        if n < 0 && base.depends_on_z() {
            return Err(FunctionError::NonEntire {
                offset: Some(off),
                reason: "negative power of a non-constant expression".into(),
            });
        }
        self.fold_at(Expr::Pow(Box::new(base), n), off)
    }

    fn primary(&mut self) -> PResult {
        match self.bump() {
            Tok::Num(q) => Ok(Expr::Const(Scalar::from_rational(q))),
            Tok::Imag(q) => Ok(Expr::Const(Scalar::gauss(BigRational::zero(), q))),
            Tok::I => Ok(Expr::Const(Scalar::i())),
            Tok::Z => Ok(Expr::Var),
            Tok::Exp => {
                self.expect(Tok::LParen, "'('")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Exp(Box::new(inner)))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error(&["number", "'z'", "'i'", "'exp'", "'('"]))
            }
        }
    }

    fn expect(&mut self, t: Tok, name: &str) -> Result<(), FunctionError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }
}

/// Parses an expression in `z` over `+ - * / ^`, `exp`, decimal and imaginary literals.
pub fn parse_expr(source: &str) -> Result<ExprFunction, FunctionError> {
    let toks = lex(source).map_err(FunctionError::Parse)?;
    let mut p = Parser { toks, pos: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    ExprFunction::new(ast)
}

/// Parses a constant expression such as `-1/8`, `2+3i` or `(1-i)^2` to an exact scalar.
pub fn parse_scalar(source: &str) -> Result<Scalar, FunctionError> {
    let f = parse_expr(source)?;
    match f.ast {
        Expr::Const(c) => Ok(c),
        _ => Err(FunctionError::NotConstant(source.to_string())),
    }
}

// ---------------------------------------------------------------------------
// printer

const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_UNARY: u8 = 3;
const P_ATOM: u8 = 5;

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn print_const(c: &Scalar) -> (String, u8) {
    let q: GaussRational = match c {
        Scalar::Exact(q) => q.clone(),
        Scalar::Float(z) => z.to_gauss().unwrap_or_default(),
    };
    if q.im.is_zero() {
        if !q.re.is_negative() && q.re.denom().is_one() {
            return (q.re.numer().to_string(), P_ATOM);
        }
        return (format!("({})", fmt_rational(&q.re)), P_ATOM);
    }
    if q.re.is_zero() && q.im.is_one() {
        return ("i".into(), P_ATOM);
    }
    let im = if q.im.is_one() {
        "i".to_string()
    } else if (-&q.im).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", fmt_rational(&q.im))
    };
    if q.re.is_zero() {
        return (format!("({im})"), P_ATOM);
    }
    let sep = if im.starts_with('-') { "" } else { "+" };
    (format!("({}{sep}{im})", fmt_rational(&q.re)), P_ATOM)
}

fn print_at(e: &Expr, min: u8) -> String {
    let (s, p) = print_inner(e);
    if p < min {
        format!("({s})")
    } else {
        s
    }
}

fn print_inner(e: &Expr) -> (String, u8) {
    match e {
        Expr::Const(c) => print_const(c),
        Expr::Var => ("z".into(), P_ATOM),
        Expr::Add(a, b) => (format!("{}+{}", print_at(a, P_ADD), print_at(b, P_MUL)), P_ADD),
        Expr::Sub(a, b) => (format!("{}-{}", print_at(a, P_ADD), print_at(b, P_MUL)), P_ADD),
        Expr::Mul(a, b) => (format!("{}*{}", print_at(a, P_MUL), print_at(b, P_UNARY)), P_MUL),
        Expr::Div(a, b) => (format!("{}/{}", print_at(a, P_MUL), print_at(b, P_UNARY)), P_MUL),
        Expr::Neg(a) => (format!("-{}", print_at(a, P_UNARY)), P_UNARY),
        Expr::Pow(a, n) => {
            let exp = if *n < 0 { format!("({n})") } else { n.to_string() };
            (format!("{}^{exp}", print_at(a, P_ATOM)), P_UNARY + 1)
        }
        Expr::Exp(a) => (format!("exp({})", print_at(a, 0)), P_ATOM),
    }
}

pub fn print_expr(e: &Expr) -> String {
    print_at(e, 0)
}
