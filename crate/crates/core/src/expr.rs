//! Closed-form expressions in the coordinates `x, y, z` (or `x0, x1, ...`):
//! numbers, `pi`, `+ - * /`, integer powers `^`, and `sin cos exp sqrt`.
//!
//! Expressions evaluate in `f64`, in outward-rounded interval arithmetic,
//! and differentiate symbolically.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

// ---- parsing ----

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                i += 1;
                if i < cs.len() && (cs[i] == '+' || cs[i] == '-') {
                    i += 1;
                }
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = cs[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| Error::input(format!("bad number `{s}` in `{src}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::input(format!("unexpected `{c}` in expression `{src}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    dim: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::input(format!("{what} in expression `{}`", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
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
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 64.0 => {
                    self.pos += 1;
                    let k = v as i32;
                    return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
                }
                _ => return Err(self.err("exponent must be a small integer")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("missing `)`"));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "sqrt" => Some(Func::Sqrt),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat('(') {
                        return Err(self.err(&format!("`{name}` needs an argument")));
                    }
                    let arg = self.sum()?;
                    if !self.eat(')') {
                        return Err(self.err("missing `)`"));
                    }
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                let idx = match name.as_str() {
                    "x" => Some(0),
                    "y" => Some(1),
                    "z" => Some(2),
                    s if s.starts_with('x') => s[1..].parse::<usize>().ok(),
                    _ => None,
                };
                match idx {
                    Some(i) if i < self.dim => Ok(Expr::Var(i)),
                    _ => Err(self.err(&format!("unknown name `{name}`"))),
                }
            }
            _ => Err(self.err("unexpected end")),
        }
    }
}

impl Expr {
    /// Parse an expression in `dim` variables.
    pub fn parse(src: &str, dim: usize) -> Result<Expr> {
        let mut p = Parser {
            toks: lex(src)?,
            pos: 0,
            dim,
            src,
        };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Pi => PI,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, k) => a.eval(x).powi(*k),
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        match self {
            Expr::Num(v) => Interval::constant(*v),
            Expr::Pi => Interval::pi(),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => a.eval_interval(x).neg(),
            Expr::Add(a, b) => a.eval_interval(x).add(b.eval_interval(x)),
            Expr::Sub(a, b) => a.eval_interval(x).sub(b.eval_interval(x)),
            Expr::Mul(a, b) => a.eval_interval(x).mul(b.eval_interval(x)),
            Expr::Div(a, b) => a.eval_interval(x).div(b.eval_interval(x)),
            Expr::Pow(a, k) => a.eval_interval(x).powi(*k),
            Expr::Call(f, a) => {
                let v = a.eval_interval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    fn is_num(&self, v: f64) -> bool {
        matches!(self, Expr::Num(w) if *w == v)
    }

    fn add(a: Expr, b: Expr) -> Expr {
        if a.is_num(0.0) {
            b
        } else if b.is_num(0.0) {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_num(0.0) {
            a
        } else if a.is_num(0.0) {
            Expr::Neg(Box::new(b))
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_num(0.0) || b.is_num(0.0) {
            Expr::Num(0.0)
        } else if a.is_num(1.0) {
            b
        } else if b.is_num(1.0) {
            a
        } else {
            Expr::Mul(Box::new(a), Box::new(b))
        }
    }

    fn div(a: Expr, b: Expr) -> Expr {
        if a.is_num(0.0) {
            Expr::Num(0.0)
        } else {
            Expr::Div(Box::new(a), Box::new(b))
        }
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Expr {
        use Expr::*;
        match self {
            Num(_) | Pi => Num(0.0),
            Var(j) => Num(if *j == i { 1.0 } else { 0.0 }),
            Neg(a) => {
                let d = a.derivative(i);
                if d.is_num(0.0) {
                    d
                } else {
                    Neg(Box::new(d))
                }
            }
            Add(a, b) => Expr::add(a.derivative(i), b.derivative(i)),
            Sub(a, b) => Expr::sub(a.derivative(i), b.derivative(i)),
            Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(i), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(i)),
            ),
            Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.derivative(i), (**b).clone()),
                    Expr::mul((**a).clone(), b.derivative(i)),
                ),
                Pow(b.clone(), 2),
            ),
            Pow(a, k) => {
                let inner = if *k - 1 == 1 {
                    (**a).clone()
                } else if *k - 1 == 0 {
                    Num(1.0)
                } else {
                    Pow(a.clone(), k - 1)
                };
                Expr::mul(Expr::mul(Num(f64::from(*k)), inner), a.derivative(i))
            }
            Call(f, a) => {
                let da = a.derivative(i);
                let outer = match f {
                    Func::Sin => Call(Func::Cos, a.clone()),
                    Func::Cos => Neg(Box::new(Call(Func::Sin, a.clone()))),
                    Func::Exp => Call(Func::Exp, a.clone()),
                    Func::Sqrt => Div(Box::new(Num(0.5)), Box::new(Call(Func::Sqrt, a.clone()))),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// Multiply by a constant.
    pub fn scaled(&self, k: f64) -> Expr {
        Expr::mul(Expr::Num(k), self.clone())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "{a}^{k}"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                    Func::Sqrt => "sqrt",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

// ---- intervals ----

/// Closed interval with outward rounding: every operation widens its result
/// by one ulp on each side, which dominates the rounding error of the
/// correctly rounded basic operations and of libm's transcendental
/// functions (documented accuracy within one ulp; we widen by a few).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// A decimal literal is not exactly representable in general.
    fn constant(v: f64) -> Self {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Interval::point(v)
        } else {
            Interval::new(down(v), up(v))
        }
    }

    pub fn pi() -> Self {
        // f64 PI is the nearest double below π
        Interval::new(PI, up(PI))
    }

    fn entire() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self` lies in the interior of `other`.
    pub fn strictly_inside(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn powi(self, k: i32) -> Self {
        if k < 0 {
            return Interval::point(1.0).div(self.powi(-k));
        }
        if k == 0 {
            return Interval::point(1.0);
        }
        let mut acc = self;
        for _ in 1..k {
            acc = acc.mul(self);
        }
        if k % 2 == 0 && acc.lo < 0.0 {
            acc.lo = 0.0;
        }
        acc
    }

    fn widen(lo: f64, hi: f64) -> Self {
        let m = 4.0 * f64::EPSILON;
        Interval::new(down(lo - m * lo.abs().max(1.0)), up(hi + m * hi.abs().max(1.0)))
    }

    pub fn sin(self) -> Self {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.width() >= 2.0 * PI {
            return Interval::new(-1.0, 1.0);
        }
        let (a, b) = (self.lo.sin(), self.hi.sin());
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        // extrema at pi/2 + k pi, tested with a safety margin
        let tol = 1e-9;
        let k0 = ((self.lo - PI / 2.0) / PI - tol).floor() as i64;
        let k1 = ((self.hi - PI / 2.0) / PI + tol).ceil() as i64;
        for k in k0..=k1 {
            let c = PI / 2.0 + k as f64 * PI;
            if c >= self.lo - tol && c <= self.hi + tol {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        let w = Interval::widen(lo, hi);
        Interval::new(w.lo.max(-1.0), w.hi.min(1.0))
    }

    pub fn cos(self) -> Self {
        let half_pi = Interval::pi().mul(Interval::point(0.5));
        self.add(half_pi).sin()
    }

    pub fn exp(self) -> Self {
        Interval::widen(self.lo.exp(), self.hi.exp())
    }

    pub fn sqrt(self) -> Self {
        if self.hi < 0.0 {
            return Interval::entire();
        }
        let w = Interval::widen(self.lo.max(0.0).sqrt(), self.hi.sqrt());
        Interval::new(w.lo.max(0.0), w.hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Self {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Self) -> Self {
        Interval::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Self) -> Self {
        let ps = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if ps.iter().any(|p| p.is_nan()) {
            return Interval::entire();
        }
        let lo = ps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Self) -> Self {
        if o.contains_zero() {
            return Interval::entire();
        }
        self * Interval::new(down(1.0 / o.hi), up(1.0 / o.lo))
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let e = Expr::parse("0.2*sin(2*pi*x) - y^2/4", 2).unwrap();
        let v = e.eval(&[0.125, 2.0]);
        assert!((v - (0.2 * (PI / 4.0).sin() - 1.0)).abs() < 1e-15);
        assert!(Expr::parse("sin(w)", 2).is_err());
        assert!(Expr::parse("x^1.5", 1).is_err());
        assert!(Expr::parse("z", 2).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let e = Expr::parse("exp(x*y) * cos(pi*y) / (2 + sin(x)) + sqrt(1 + x^2)", 2).unwrap();
        let p = [0.3, -0.7];
        for i in 0..2 {
            let mut a = p;
            let mut b = p;
            let h = 1e-6;
            a[i] -= h;
            b[i] += h;
            let fd = (e.eval(&b) - e.eval(&a)) / (2.0 * h);
            assert!((e.derivative(i).eval(&p) - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn intervals_enclose() {
        let e = Expr::parse("0.2*sin(2*pi*x) + cos(3*y)^2 - x/(1+y^2)", 2).unwrap();
        let boxes = [
            [Interval::new(0.1, 0.2), Interval::new(-0.5, 0.5)],
            [Interval::new(0.24, 0.26), Interval::new(1.0, 1.1)],
        ];
        for b in boxes {
            let r = e.eval_interval(&b);
            for i in 0..=10 {
                for j in 0..=10 {
                    let x = b[0].lo + b[0].width() * i as f64 / 10.0;
                    let y = b[1].lo + b[1].width() * j as f64 / 10.0;
                    assert!(r.contains(e.eval(&[x, y])));
                }
            }
        }
        // sin over a peak reaches 1
        assert_eq!(Interval::new(1.5, 1.7).sin().hi, 1.0);
        // pi really is enclosed: sin(pi) changes sign inside
        assert!(Interval::pi().sin().contains_zero());
    }
}
