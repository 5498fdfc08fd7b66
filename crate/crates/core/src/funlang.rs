//! A small expression language for functions of x: parsing, canonical
//! printing, evaluation as order-2 jets, and structural inference of the
//! behaviour at 0 and at infinity.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := base ('^' unary)?
//! base   := number | 'x' | 'pi' | call | '(' expr ')'
//! call   := name '(' expr (',' expr)* ')'
//! ```
//!
//! Functions: `exp`, `log`, `sqrt`, `sin`, `cos`, `tanh` (one argument),
//! `pow1p(p)` = (1+x)^p and `bump(lo, hi)` = exp(−1/((x−lo)(hi−x))) on (lo, hi),
//! zero elsewhere. The arguments of `pow1p` and `bump` must not contain x.

use crate::error::{Error, Result};
use crate::quad::Decay;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    pub fn variable(x: f64) -> Self {
        Self { v: x, d1: 1.0, d2: 0.0 }
    }

    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }

    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        Self { v: r, d1: -self.d1 * r * r, d2: (2.0 * self.d1 * self.d1 - self.v * self.d2) * r * r * r }
    }

    /// g∘self given g, g′, g″ at self.v.
    fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Self { v: g, d1: g1 * self.d1, d2: g2 * self.d1 * self.d1 + g1 * self.d2 }
    }

    fn neg(self) -> Self {
        Self { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Built-in functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Tanh,
    Pow1p,
    Bump,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "pow1p" => Func::Pow1p,
            "bump" => Func::Bump,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Pow1p => "pow1p",
            Func::Bump => "bump",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Bump => 2,
            _ => 1,
        }
    }

    /// Functions whose arguments are parameters rather than functions of x.
    fn takes_constants(self) -> bool {
        matches!(self, Func::Pow1p | Func::Bump)
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |f| format!("'{f}'"));
            Err(syntax(self.pos, format!("expected '{c}', found {found}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let v: f64 = text.parse().map_err(|_| syntax(start, format!("malformed number '{text}'")))?;
        if !v.is_finite() {
            return Err(syntax(start, format!("number '{text}' is out of range")));
        }
        self.pos = end;
        Ok(Expr::Num(v))
    }

    fn base(&mut self) -> Result<Expr> {
        let Some(c) = self.peek() else {
            return Err(syntax(self.pos, "unexpected end of input"));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = self.pos;
            let bytes = self.src.as_bytes();
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            let name = &self.src[start..end];
            self.pos = end;
            match name {
                "x" => return Ok(Expr::Var),
                "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                _ => {}
            }
            let func = Func::from_name(name).ok_or_else(|| syntax(start, format!("unknown identifier '{name}'")))?;
            self.expect('(')?;
            let mut args = vec![self.expr()?];
            while self.eat(',') {
                args.push(self.expr()?);
            }
            self.expect(')')?;
            if args.len() != func.arity() {
                return Err(syntax(start, format!("{} takes {} argument(s), got {}", name, func.arity(), args.len())));
            }
            if func.takes_constants() && args.iter().any(|a| !a.is_constant()) {
                return Err(syntax(start, format!("the arguments of {name} must not depend on x")));
            }
            return Ok(Expr::Call(func, args));
        }
        Err(syntax(self.pos, format!("unexpected character '{c}'")))
    }
}

/// Parses an expression; errors carry the byte offset of the problem.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(syntax(p.pos, format!("unexpected character '{c}'")));
    }
    Ok(e)
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => PREC_NEG,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => PREC_ATOM,
            Expr::Neg(_) => PREC_NEG,
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
            Expr::Bin(BinOp::Pow, ..) => PREC_POW,
        }
    }

    /// True when the expression does not contain x.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
            Expr::Call(f, args) => !f.takes_constants() && args.iter().all(|a| a.is_constant()),
        }
    }

    fn const_value(&self) -> Option<f64> {
        if self.is_constant() {
            eval(self, 0.0).ok()
        } else {
            None
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    /// Canonical form with the minimal parentheses that preserve the tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, a.precedence() < PREC_NEG)
            }
            Expr::Bin(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", PREC_ADD),
                    BinOp::Sub => ("-", PREC_ADD),
                    BinOp::Mul => ("*", PREC_MUL),
                    BinOp::Div => ("/", PREC_MUL),
                    BinOp::Pow => ("^", PREC_POW),
                };
                if *op == BinOp::Pow {
                    write_child(f, a, a.precedence() <= PREC_POW)?;
                    write!(f, "^")?;
                    write_child(f, b, b.precedence() < PREC_NEG)
                } else {
                    write_child(f, a, a.precedence() < prec)?;
                    write!(f, "{sym}")?;
                    let right_parens = b.precedence() <= prec && !(prec == PREC_MUL && b.precedence() == PREC_NEG);
                    write_child(f, b, right_parens && b.precedence() < PREC_NEG)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Canonical text of an expression.
pub fn print(e: &Expr) -> String {
    e.to_string()
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn pow_const(u: Jet2, k: f64) -> Result<Jet2> {
    if u.v < 0.0 && k.fract() != 0.0 {
        return Err(domain(format!("negative base {} with non-integer exponent {k}", u.v)));
    }
    if u.v == 0.0 && k < 0.0 {
        return Err(domain("zero raised to a negative power"));
    }
    let g = u.v.powf(k);
    let g1 = if k == 0.0 { 0.0 } else { k * u.v.powf(k - 1.0) };
    let g2 = if k == 0.0 || k == 1.0 { 0.0 } else { k * (k - 1.0) * u.v.powf(k - 2.0) };
    Ok(u.chain(g, g1, g2))
}

fn bump_jet(lo: f64, hi: f64, x: f64) -> Jet2 {
    if !(x > lo && x < hi) {
        return Jet2::constant(0.0);
    }
    let q = (x - lo) * (hi - x);
    let q1 = lo + hi - 2.0 * x;
    let h = (-1.0 / q).exp();
    let g1 = q1 / (q * q);
    let g2 = -2.0 / (q * q) - 2.0 * q1 * q1 / (q * q * q);
    Jet2 { v: h, d1: h * g1, d2: h * (g2 + g1 * g1) }
}

/// Evaluates value, f′ and f″ by forward-mode propagation.
pub fn eval_jet(e: &Expr, x: f64) -> Result<Jet2> {
    Ok(match e {
        Expr::Num(v) => Jet2::constant(*v),
        Expr::Var => Jet2::variable(x),
        Expr::Neg(a) => eval_jet(a, x)?.neg(),
        Expr::Bin(op, a, b) => {
            let u = eval_jet(a, x)?;
            let w = eval_jet(b, x)?;
            match op {
                BinOp::Add => u.add(w),
                BinOp::Sub => u.sub(w),
                BinOp::Mul => u.mul(w),
                BinOp::Div => {
                    if w.v == 0.0 {
                        return Err(domain(format!("division by zero at x = {x}")));
                    }
                    u.mul(w.recip())
                }
                BinOp::Pow => {
                    if w.d1 == 0.0 && w.d2 == 0.0 && b.is_constant() {
                        pow_const(u, w.v)?
                    } else {
                        if u.v <= 0.0 {
                            return Err(domain(format!("variable exponent needs a positive base at x = {x}")));
                        }
                        let l = u.chain(u.v.ln(), 1.0 / u.v, -1.0 / (u.v * u.v));
                        let p = l.mul(w);
                        let ev = p.v.exp();
                        p.chain(ev, ev, ev)
                    }
                }
            }
        }
        Expr::Call(func, args) => match func {
            Func::Pow1p => {
                let k = eval(&args[0], 0.0)?;
                pow_const(Jet2::variable(1.0 + x), k)?
            }
            Func::Bump => bump_jet(eval(&args[0], 0.0)?, eval(&args[1], 0.0)?, x),
            _ => {
                let u = eval_jet(&args[0], x)?;
                let t = u.v;
                match func {
                    Func::Exp => {
                        let ev = t.exp();
                        u.chain(ev, ev, ev)
                    }
                    Func::Log => {
                        if t <= 0.0 {
                            return Err(domain(format!("log of non-positive value {t}")));
                        }
                        u.chain(t.ln(), 1.0 / t, -1.0 / (t * t))
                    }
                    Func::Sqrt => {
                        if t < 0.0 {
                            return Err(domain(format!("sqrt of negative value {t}")));
                        }
                        let r = t.sqrt();
                        u.chain(r, 0.5 / r, -0.25 / (r * t))
                    }
                    Func::Sin => u.chain(t.sin(), t.cos(), -t.sin()),
                    Func::Cos => u.chain(t.cos(), -t.sin(), -t.cos()),
                    Func::Tanh => {
                        let th = t.tanh();
                        let s2 = 1.0 - th * th;
                        u.chain(th, s2, -2.0 * th * s2)
                    }
                    Func::Pow1p | Func::Bump => unreachable!(),
                }
            }
        },
    })
}

/// Plain evaluation.
pub fn eval(e: &Expr, x: f64) -> Result<f64> {
    Ok(match e {
        Expr::Num(v) => *v,
        Expr::Var => x,
        Expr::Neg(a) => -eval(a, x)?,
        Expr::Bin(op, a, b) => {
            let u = eval(a, x)?;
            let w = eval(b, x)?;
            match op {
                BinOp::Add => u + w,
                BinOp::Sub => u - w,
                BinOp::Mul => u * w,
                BinOp::Div => {
                    if w == 0.0 {
                        return Err(domain(format!("division by zero at x = {x}")));
                    }
                    u / w
                }
                BinOp::Pow => {
                    if u < 0.0 && w.fract() != 0.0 {
                        return Err(domain(format!("negative base {u} with non-integer exponent {w}")));
                    }
                    if u == 0.0 && w < 0.0 {
                        return Err(domain("zero raised to a negative power"));
                    }
                    u.powf(w)
                }
            }
        }
        Expr::Call(func, args) => match func {
            Func::Pow1p => {
                let k = eval(&args[0], 0.0)?;
                let base = 1.0 + x;
                if base < 0.0 && k.fract() != 0.0 || base == 0.0 && k < 0.0 {
                    return Err(domain(format!("pow1p({k}) undefined at x = {x}")));
                }
                base.powf(k)
            }
            Func::Bump => bump_jet(eval(&args[0], 0.0)?, eval(&args[1], 0.0)?, x).v,
            _ => {
                let t = eval(&args[0], x)?;
                match func {
                    Func::Exp => t.exp(),
                    Func::Log => {
                        if t <= 0.0 {
                            return Err(domain(format!("log of non-positive value {t}")));
                        }
                        t.ln()
                    }
                    Func::Sqrt => {
                        if t < 0.0 {
                            return Err(domain(format!("sqrt of negative value {t}")));
                        }
                        t.sqrt()
                    }
                    Func::Sin => t.sin(),
                    Func::Cos => t.cos(),
                    Func::Tanh => t.tanh(),
                    Func::Pow1p | Func::Bump => unreachable!(),
                }
            }
        },
    })
}

/// Asymptotic descriptor of an expression at one end of the half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Asym {
    /// Identically zero near the end point.
    Zero,
    /// Zero beyond the given abscissa (only at infinity).
    Compact(f64),
    /// Vanishes faster than any power.
    Fast,
    /// ≈ coef·x^p with coef ≠ 0.
    Power { p: f64, coef: f64 },
    /// O(x^p), leading coefficient unknown.
    Bound { p: f64 },
    Unknown,
}

/// Tiny exponent allowance for logarithmic factors.
const LOG_SLACK: f64 = 1e-6;

fn order(a: Asym, at_inf: bool) -> Option<f64> {
    match a {
        Asym::Power { p, .. } | Asym::Bound { p } => Some(p),
        Asym::Zero | Asym::Compact(_) | Asym::Fast => Some(if at_inf { f64::NEG_INFINITY } else { f64::INFINITY }),
        Asym::Unknown => None,
    }
}

/// Dominant exponent: the larger at infinity, the smaller at 0.
fn dominant(p: f64, q: f64, at_inf: bool) -> f64 {
    if at_inf {
        p.max(q)
    } else {
        p.min(q)
    }
}

fn add_asym(a: Asym, b: Asym, at_inf: bool) -> Asym {
    use Asym::*;
    match (a, b) {
        (Unknown, _) | (_, Unknown) => Unknown,
        (Zero, o) | (o, Zero) => o,
        (Compact(h1), Compact(h2)) => Compact(h1.max(h2)),
        (Compact(_), o) | (o, Compact(_)) => o,
        (Fast, o) | (o, Fast) => o,
        (Power { p, coef: c1 }, Power { p: q, coef: c2 }) => {
            if p == q {
                if c1 + c2 != 0.0 {
                    Power { p, coef: c1 + c2 }
                } else {
                    Bound { p }
                }
            } else if dominant(p, q, at_inf) == p {
                Power { p, coef: c1 }
            } else {
                Power { p: q, coef: c2 }
            }
        }
        (x, y) => {
            let (p, q) = (order(x, at_inf).unwrap(), order(y, at_inf).unwrap());
            Bound { p: dominant(p, q, at_inf) }
        }
    }
}

fn mul_asym(a: Asym, b: Asym) -> Asym {
    use Asym::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Zero,
        (Unknown, _) | (_, Unknown) => Unknown,
        (Compact(h1), Compact(h2)) => Compact(h1.min(h2)),
        (Compact(h), _) | (_, Compact(h)) => Compact(h),
        (Fast, _) | (_, Fast) => Fast,
        (Power { p, coef: c1 }, Power { p: q, coef: c2 }) => Power { p: p + q, coef: c1 * c2 },
        (x, y) => Bound { p: order(x, true).unwrap() + order(y, true).unwrap() },
    }
}

fn pow_asym(a: Asym, k: f64) -> Asym {
    use Asym::*;
    if k == 0.0 {
        return Power { p: 0.0, coef: 1.0 };
    }
    match a {
        Zero if k > 0.0 => Zero,
        Compact(h) if k > 0.0 => Compact(h),
        Fast if k > 0.0 => Fast,
        Power { p, coef } if coef > 0.0 || k.fract() == 0.0 => Power { p: p * k, coef: coef.powf(k) },
        Bound { p } if k > 0.0 => Bound { p: p * k },
        _ => Unknown,
    }
}

fn asym(e: &Expr, at_inf: bool) -> Asym {
    use Asym::*;
    if let Some(c) = e.const_value() {
        return if c == 0.0 { Zero } else { Power { p: 0.0, coef: c } };
    }
    match e {
        Expr::Num(_) => unreachable!("constants handled above"),
        Expr::Var => Power { p: 1.0, coef: 1.0 },
        Expr::Neg(a) => match asym(a, at_inf) {
            Power { p, coef } => Power { p, coef: -coef },
            o => o,
        },
        Expr::Bin(op, a, b) => {
            let (u, w) = (asym(a, at_inf), asym(b, at_inf));
            match op {
                BinOp::Add => add_asym(u, w, at_inf),
                BinOp::Sub => add_asym(u, asym(&Expr::Neg(b.clone()), at_inf), at_inf),
                BinOp::Mul => mul_asym(u, w),
                BinOp::Div => match b.const_value() {
                    Some(c) if c != 0.0 => mul_asym(u, Power { p: 0.0, coef: 1.0 / c }),
                    _ => Unknown,
                },
                BinOp::Pow => match b.const_value() {
                    Some(k) => pow_asym(u, k),
                    None => Unknown,
                },
            }
        }
        Expr::Call(func, args) => {
            let consts: Vec<f64> = if func.takes_constants() {
                args.iter().map(|a| a.const_value().unwrap_or(f64::NAN)).collect()
            } else {
                Vec::new()
            };
            match func {
                Func::Pow1p => {
                    if at_inf {
                        Power { p: consts[0], coef: 1.0 }
                    } else {
                        Power { p: 0.0, coef: 1.0 }
                    }
                }
                Func::Bump => {
                    let (lo, hi) = (consts[0], consts[1]);
                    if at_inf {
                        Compact(hi.max(0.0))
                    } else if lo > 0.0 || hi <= 0.0 {
                        Zero
                    } else if lo == 0.0 {
                        Fast
                    } else {
                        Power { p: 0.0, coef: bump_jet(lo, hi, 0.0).v }
                    }
                }
                _ => {
                    let u = asym(&args[0], at_inf);
                    // Argument tends to its limit L (0 when it vanishes).
                    let small = matches!(u, Zero | Compact(_) | Fast) || matches!(u, Power { p, .. } | Bound { p } if (at_inf && p < 0.0) || (!at_inf && p > 0.0));
                    let limit = match u {
                        Power { p, coef } if p == 0.0 => Some(coef),
                        _ if small => Some(0.0),
                        _ => None,
                    };
                    match func {
                        Func::Exp => match (u, limit) {
                            (_, Some(l)) => Power { p: 0.0, coef: l.exp() },
                            (Power { coef, .. }, None) if coef < 0.0 => Fast,
                            _ => Unknown,
                        },
                        Func::Log => match (u, limit) {
                            (_, Some(l)) if l > 0.0 && l != 1.0 => Power { p: 0.0, coef: l.ln() },
                            (_, Some(l)) if l == 1.0 => Bound { p: 0.0 },
                            (Power { p, coef }, None) if coef > 0.0 => {
                                let _ = p;
                                Bound { p: if at_inf { LOG_SLACK } else { -LOG_SLACK } }
                            }
                            (Power { p, coef }, Some(_)) if coef > 0.0 && p != 0.0 => Bound { p: if at_inf { LOG_SLACK } else { -LOG_SLACK } },
                            _ => Unknown,
                        },
                        Func::Sqrt => pow_asym(u, 0.5),
                        Func::Sin | Func::Tanh => match (u, limit) {
                            (Zero, _) | (Compact(_), _) | (Fast, _) => u,
                            (Power { .. }, Some(0.0)) => u,
                            (_, Some(l)) => {
                                let v = if *func == Func::Sin { l.sin() } else { l.tanh() };
                                if v != 0.0 { Power { p: 0.0, coef: v } } else { Bound { p: 0.0 } }
                            }
                            (Power { coef, .. }, None) if *func == Func::Tanh => Power { p: 0.0, coef: coef.signum() },
                            (Unknown, _) => Unknown,
                            _ => Bound { p: 0.0 },
                        },
                        Func::Cos => match limit {
                            Some(l) if l.cos() != 0.0 => Power { p: 0.0, coef: l.cos() },
                            Some(_) => Bound { p: 0.0 },
                            None if u == Unknown => Unknown,
                            None => Bound { p: 0.0 },
                        },
                        Func::Pow1p | Func::Bump => unreachable!(),
                    }
                }
            }
        }
    }
}

/// Structural asymptotics of an expression: f ~ x^{zero_exponent} near 0 and
/// f = O(x^{−decay_exponent}) at infinity (infinite for superpolynomial decay
/// or compact support); `None` where inference fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayInfo {
    pub zero_exponent: Option<f64>,
    pub decay_exponent: Option<f64>,
    /// Right end of the support when the expression vanishes beyond it.
    pub support_end: Option<f64>,
}

impl DecayInfo {
    /// Quadrature-side description of the behaviour at infinity.
    pub fn decay(&self) -> Option<Decay> {
        if let Some(h) = self.support_end {
            return Some(Decay::Compact(h));
        }
        match self.decay_exponent {
            Some(d) if d.is_infinite() => Some(Decay::Superpolynomial),
            Some(d) => Some(Decay::Algebraic(d)),
            None => None,
        }
    }
}

/// Infers the behaviour at 0 and at infinity from the expression structure.
pub fn infer_decay(e: &Expr) -> DecayInfo {
    let at0 = asym(e, false);
    let atinf = asym(e, true);
    let zero_exponent = match at0 {
        Asym::Power { p, .. } | Asym::Bound { p } => Some(p),
        Asym::Zero | Asym::Fast | Asym::Compact(_) => Some(0.0),
        Asym::Unknown => None,
    };
    let (decay_exponent, support_end) = match atinf {
        Asym::Zero => (Some(f64::INFINITY), Some(0.0)),
        Asym::Compact(h) => (Some(f64::INFINITY), Some(h)),
        Asym::Fast => (Some(f64::INFINITY), None),
        Asym::Power { p, .. } | Asym::Bound { p } => (Some(-p), None),
        Asym::Unknown => (None, None),
    };
    DecayInfo { zero_exponent, decay_exponent, support_end }
}

/// Wraps an expression as a transform input, inferring its behaviour at 0 and
/// at infinity unless overridden (`decay` is the algebraic rate d in O(x^{−d})).
pub fn weighted_function(e: Expr, zero_exponent: Option<f64>, decay: Option<f64>) -> Result<crate::xform::WeightedFunction<'static>> {
    let info = infer_decay(&e);
    let zero = zero_exponent
        .or(info.zero_exponent)
        .ok_or_else(|| Error::Domain("cannot infer the behaviour of f at 0; give the exponent explicitly".into()))?;
    let decay = match decay {
        Some(d) => Decay::Algebraic(d),
        None => info
            .decay()
            .ok_or_else(|| Error::Domain("cannot infer the decay of f at infinity; give the rate explicitly".into()))?,
    };
    Ok(crate::xform::WeightedFunction::new(move |x| eval(&e, x).unwrap_or(f64::NAN), zero, decay))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse("exp(-x)").unwrap(), Expr::Call(Func::Exp, vec![Expr::Neg(Box::new(Expr::Var))]));
        let e = parse("1+2*x^2").unwrap();
        let want = Expr::Bin(
            BinOp::Add,
            Box::new(Expr::Num(1.0)),
            Box::new(Expr::Bin(
                BinOp::Mul,
                Box::new(Expr::Num(2.0)),
                Box::new(Expr::Bin(BinOp::Pow, Box::new(Expr::Var), Box::new(Expr::Num(2.0)))),
            )),
        );
        assert_eq!(e, want);
        assert_eq!(parse("exp("), Err(Error::Syntax { offset: 4, message: "unexpected end of input".into() }));
        assert!(matches!(parse("foo(x)"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("x + * 2"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("pow1p(x)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("bump(0)"), Err(Error::Syntax { .. })));
        // ^ is right-associative.
        let e = parse("2^3^2").unwrap();
        assert_eq!(eval(&e, 0.0).unwrap(), 512.0);
        assert_eq!(eval(&parse("-2^2").unwrap(), 0.0).unwrap(), -4.0);
    }

    #[test]
    fn jet_examples() {
        let e = parse("exp(-x)").unwrap();
        let j = eval_jet(&e, 1.0).unwrap();
        let r = (-1.0f64).exp();
        assert!((j.v - r).abs() < 1e-16 && (j.d1 + r).abs() < 1e-16 && (j.d2 - r).abs() < 1e-16);
        let j = eval_jet(&parse("pow1p(-2)").unwrap(), 0.0).unwrap();
        assert_eq!((j.v, j.d1, j.d2), (1.0, -2.0, 6.0));
        assert!(eval_jet(&parse("log(x-2)").unwrap(), 1.0).is_err());
        assert!(eval(&parse("1/(x-1)").unwrap(), 1.0).is_err());
    }

    #[test]
    fn decay_examples() {
        let d = infer_decay(&parse("pow1p(-3)").unwrap());
        assert_eq!(d.decay_exponent, Some(3.0));
        assert_eq!(d.zero_exponent, Some(0.0));
        let d = infer_decay(&parse("exp(-x)").unwrap());
        assert_eq!(d.decay_exponent, Some(f64::INFINITY));
        assert_eq!(d.decay(), Some(Decay::Superpolynomial));
        assert_eq!(infer_decay(&parse("x / x").unwrap()).decay_exponent, None);
        let d = infer_decay(&parse("bump(0,2)").unwrap());
        assert_eq!(d.decay(), Some(Decay::Compact(2.0)));
        assert_eq!(d.zero_exponent, Some(0.0));
        let d = infer_decay(&parse("x^0.3*exp(-x)").unwrap());
        assert_eq!((d.zero_exponent, d.decay_exponent), (Some(0.3), Some(f64::INFINITY)));
        let d = infer_decay(&parse("sin(x)*pow1p(-2)").unwrap());
        assert_eq!(d.decay_exponent, Some(2.0));
        let d = infer_decay(&parse("2*x^2 + 3*pow1p(-4)").unwrap());
        assert_eq!((d.zero_exponent, d.decay_exponent), (Some(0.0), Some(-2.0)));
        assert_eq!(infer_decay(&parse("exp(x)").unwrap()).decay_exponent, None);
        assert_eq!(infer_decay(&parse("0").unwrap()).decay(), Some(Decay::Compact(0.0)));
        let d = infer_decay(&parse("x*pow1p(-3.5)-x^2").unwrap());
        assert_eq!((d.zero_exponent, d.decay_exponent), (Some(1.0), Some(-2.0)));
    }

    #[test]
    fn printer_is_minimal() {
        for (src, want) in [
            ("(1+x)*2", "(1+x)*2"),
            ("1+(x*2)", "1+x*2"),
            ("1-(x-2)", "1-(x-2)"),
            ("(x^2)^3", "(x^2)^3"),
            ("x^(2^3)", "x^2^3"),
            ("-(x^2)", "-x^2"),
            ("(-x)^2", "(-x)^2"),
            ("2*-x", "2*-x"),
            ("x^-2", "x^-2"),
            ("x/(2*x)", "x/(2*x)"),
            ("bump(0, 2) * exp( - x)", "bump(0,2)*exp(-x)"),
        ] {
            assert_eq!(print(&parse(src).unwrap()), want, "{src}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..40).prop_map(|k| Expr::Num(k as f64 / 4.0)),
            Just(Expr::Var),
            (-30i32..30).prop_map(|k| Expr::Call(Func::Pow1p, vec![Expr::Num((k as f64 / 10.0).abs())])),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone(), prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)])
                    .prop_map(|(a, b, op)| Expr::Bin(op, Box::new(a), Box::new(b))),
                (inner.clone(), 0u32..4).prop_map(|(a, k)| Expr::Bin(BinOp::Pow, Box::new(a), Box::new(Expr::Num(k as f64)))),
                inner.clone().prop_map(|e| Expr::Call(Func::Sin, vec![e])),
                inner.clone().prop_map(|e| Expr::Call(Func::Tanh, vec![e])),
                inner.prop_map(|e| Expr::Call(Func::Exp, vec![Expr::Call(Func::Tanh, vec![e])])),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let text = print(&e);
            let once = parse(&text).unwrap();
            let twice = parse(&print(&once)).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(print(&once), print(&twice));
        }

        #[test]
        fn jets_match_plain_evaluation_and_differences(e in arb_expr(), x in 0.1f64..3.0) {
            let j = eval_jet(&e, x).unwrap();
            let v = eval(&e, x).unwrap();
            prop_assert!((j.v - v).abs() <= 1e-12 * v.abs().max(1.0));
            let f = |t: f64| eval(&e, t).unwrap();
            let fd = |h: f64| {
                let d1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
                let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h);
                (d1, d2)
            };
            let (a1, a2) = fd(2e-3);
            let (b1, b2) = fd(1e-3);
            let scale = v.abs() + j.d1.abs() + j.d2.abs() + 1.0;
            // Skip functions that oscillate too fast for the difference quotients to resolve.
            prop_assume!((a2 - b2).abs() <= 1e-2 * scale);
            // The spread between the two step sizes bounds the difference-quotient error.
            prop_assert!((j.d1 - b1).abs() <= 2.0 * (a1 - b1).abs() + 1e-6 * scale, "d1 {} vs {}", j.d1, b1);
            prop_assert!((j.d2 - b2).abs() <= 2.0 * (a2 - b2).abs() + 1e-4 * scale, "d2 {} vs {}", j.d2, b2);
        }
    }
}
