//! Symbolic expressions in the variables `x`, `y`, `z`.
//!
//! Expressions carry exact rational constants and support symbolic
//! differentiation with light constant folding, which is how every surface
//! gradient and Hessian in this module family is produced — no finite
//! differencing enters the pipeline (finite differences appear only as a test
//! oracle). For the inner loops of flow integration, a set of expressions is
//! compiled into a [`Program`]: a flat evaluation tape with common
//! subexpressions shared, so evaluating a full derivative jet costs little
//! more than evaluating the defining formulas once.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A symbolic expression. Exponents of [`Expr::Pow`] are rational constants,
/// which covers every power a surface description needs while keeping the
/// derivative rule closed: `d(u^r) = r u^(r-1) u'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational64),
    /// Variable index: `0 = x`, `1 = y`, `2 = z`.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational64),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn constant(n: i64) -> Expr {
        Expr::Const(Rational64::from_integer(n))
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    /// Evaluate at a point, mapping rational powers through `powf` (integer
    /// exponents use exact repeated squaring via `powi`).
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        match self {
            Expr::Const(c) => rational_to_f64(*c),
            Expr::Var(i) => p[*i],
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Div(a, b) => a.eval(p) / b.eval(p),
            Expr::Pow(a, r) => {
                let base = a.eval(p);
                if r.is_integer() {
                    base.powi(*r.numer() as i32)
                } else {
                    base.powf(rational_to_f64(*r))
                }
            }
            Expr::Exp(a) => a.eval(p).exp(),
            Expr::Sqrt(a) => a.eval(p).sqrt(),
        }
    }

    /// The partial derivative with respect to variable `var`, constant-folded.
    pub fn derivative(&self, var: usize) -> Expr {
        let d = match self {
            Expr::Const(_) => Expr::constant(0),
            Expr::Var(i) => Expr::constant(if *i == var { 1 } else { 0 }),
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.derivative(var)),
                Box::new(b.derivative(var)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.derivative(var)),
                Box::new(b.derivative(var)),
            ),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.derivative(var)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.derivative(var)))),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(Expr::Sub(
                    Box::new(Expr::Mul(Box::new(a.derivative(var)), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(b.derivative(var)))),
                )),
                Box::new(Expr::Pow(b.clone(), Rational64::from_integer(2))),
            ),
            Expr::Pow(a, r) => Expr::Mul(
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(*r)),
                    Box::new(Expr::Pow(a.clone(), r - Rational64::one())),
                )),
                Box::new(a.derivative(var)),
            ),
            Expr::Exp(a) => Expr::Mul(
                Box::new(Expr::Exp(a.clone())),
                Box::new(a.derivative(var)),
            ),
            Expr::Sqrt(a) => Expr::Div(
                Box::new(a.derivative(var)),
                Box::new(Expr::Mul(
                    Box::new(Expr::constant(2)),
                    Box::new(Expr::Sqrt(a.clone())),
                )),
            ),
        };
        d.folded()
    }

    /// Recursively fold constants and strip arithmetic identities
    /// (`u + 0`, `u * 1`, `u * 0`, `u^1`, ...). Exact on rationals; powers
    /// of constants fold only for integer exponents.
    pub fn folded(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => match (a.folded(), b.folded()) {
                (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
                (Expr::Const(x), e) | (e, Expr::Const(x)) if x.is_zero() => e,
                (a, b) => Expr::Add(Box::new(a), Box::new(b)),
            },
            Expr::Sub(a, b) => match (a.folded(), b.folded()) {
                (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
                (a, Expr::Const(y)) if y.is_zero() => a,
                (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
            },
            Expr::Mul(a, b) => match (a.folded(), b.folded()) {
                (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
                (Expr::Const(x), _) | (_, Expr::Const(x)) if x.is_zero() => Expr::constant(0),
                (Expr::Const(x), e) | (e, Expr::Const(x)) if x.is_one() => e,
                (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
            },
            Expr::Div(a, b) => match (a.folded(), b.folded()) {
                (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
                (a, Expr::Const(y)) if y.is_one() => a,
                (Expr::Const(x), b) if x.is_zero() => {
                    // 0/u folds to 0; the catalog never divides by an
                    // expression that vanishes on its box.
                    let _ = b;
                    Expr::constant(0)
                }
                (a, b) => Expr::Div(Box::new(a), Box::new(b)),
            },
            Expr::Pow(a, r) => {
                let a = a.folded();
                if r.is_zero() {
                    return Expr::constant(1);
                }
                if r.is_one() {
                    return a;
                }
                if let Expr::Const(x) = &a {
                    if r.is_integer() && r.numer().unsigned_abs() <= 16 {
                        let mut acc = Rational64::one();
                        for _ in 0..r.numer().unsigned_abs() {
                            acc *= x;
                        }
                        if r.is_negative() && !acc.is_zero() {
                            acc = acc.recip();
                        }
                        if !(r.is_negative() && acc.is_zero()) {
                            return Expr::Const(acc);
                        }
                    }
                }
                Expr::Pow(Box::new(a), *r)
            }
            Expr::Exp(a) => Expr::Exp(Box::new(a.folded())),
            Expr::Sqrt(a) => Expr::Sqrt(Box::new(a.folded())),
        }
    }
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_integer() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "{}/{}", c.numer(), c.denom())
                }
            }
            Expr::Var(0) => write!(f, "x"),
            Expr::Var(1) => write!(f, "y"),
            Expr::Var(2) => write!(f, "z"),
            Expr::Var(i) => write!(f, "v{i}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, r) => {
                if r.is_integer() {
                    write!(f, "{a}^{}", r.numer())
                } else {
                    write!(f, "{a}^({}/{})", r.numer(), r.denom())
                }
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

/// Parse an expression in the variables `x`, `y`, `z`.
///
/// Grammar: `+ - * /` with usual precedence, parentheses, unary minus,
/// `exp(...)` and `sqrt(...)`, `base^exponent` where the exponent is a
/// (possibly negative or parenthesized) rational literal, and numeric
/// literals that may be integers, fractions folded from `/`, or decimals.
pub fn parse_expr(source: &str) -> Result<Expr> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::ExprParse(format!(
            "unexpected trailing input at token {:?}",
            parser.tokens[parser.pos]
        )));
    }
    Ok(expr.folded())
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Rational64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                let mut seen_dot = false;
                while i < chars.len()
                    && (chars[i].is_ascii_digit() || (chars[i] == '.' && !seen_dot))
                {
                    if chars[i] == '.' {
                        seen_dot = true;
                    }
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                tokens.push(Token::Number(parse_number(&text)?));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::ExprParse(format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(tokens)
}

fn parse_number(text: &str) -> Result<Rational64> {
    if let Some(dot) = text.find('.') {
        let whole = &text[..dot];
        let frac = &text[dot + 1..];
        if frac.is_empty() && whole.is_empty() {
            return Err(Error::ExprParse("lone '.' is not a number".into()));
        }
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole
                .parse()
                .map_err(|_| Error::ExprParse(format!("bad number '{text}'")))?
        };
        let mut denom = 1i64;
        let mut num = 0i64;
        for c in frac.chars() {
            num = num
                .checked_mul(10)
                .and_then(|n| n.checked_add((c as u8 - b'0') as i64))
                .ok_or_else(|| Error::ExprParse(format!("number '{text}' overflows")))?;
            denom = denom
                .checked_mul(10)
                .ok_or_else(|| Error::ExprParse(format!("number '{text}' overflows")))?;
        }
        Ok(Rational64::from_integer(whole) + Rational64::new(num, denom))
    } else {
        let whole: i64 = text
            .parse()
            .map_err(|_| Error::ExprParse(format!("bad number '{text}'")))?;
        Ok(Rational64::from_integer(whole))
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, token: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == token => Ok(()),
            other => Err(Error::ExprParse(format!(
                "expected {token:?}, found {other:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Mul(Box::new(Expr::constant(-1)), Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exponent = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    /// Exponents are rational literals: `2`, `-3`, `1/2`, or a parenthesized
    /// form of the same.
    fn exponent(&mut self) -> Result<Rational64> {
        match self.next() {
            Some(Token::Number(n)) => self.exponent_tail(n),
            Some(Token::Minus) => Ok(-self.exponent()?),
            Some(Token::LParen) => {
                let r = self.exponent()?;
                self.expect(Token::RParen)?;
                Ok(r)
            }
            other => Err(Error::ExprParse(format!(
                "exponent must be a rational literal, found {other:?}"
            ))),
        }
    }

    fn exponent_tail(&mut self, numer: Rational64) -> Result<Rational64> {
        if matches!(self.peek(), Some(Token::Slash)) {
            self.pos += 1;
            match self.next() {
                Some(Token::Number(d)) if !d.is_zero() => Ok(numer / d),
                other => Err(Error::ExprParse(format!(
                    "exponent denominator must be a nonzero literal, found {other:?}"
                ))),
            }
        } else {
            Ok(numer)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Number(n)) => Ok(Expr::Const(n)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "x" => Ok(Expr::Var(0)),
                "y" => Ok(Expr::Var(1)),
                "z" => Ok(Expr::Var(2)),
                "exp" | "sqrt" => {
                    self.expect(Token::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(match name.as_str() {
                        "exp" => Expr::Exp(Box::new(arg)),
                        _ => Expr::Sqrt(Box::new(arg)),
                    })
                }
                other => Err(Error::ExprParse(format!("unknown identifier '{other}'"))),
            },
            other => Err(Error::ExprParse(format!(
                "expected a value, found {other:?}"
            ))),
        }
    }
}

/// One instruction of a compiled evaluation tape. Operands are slot indices
/// into the shared scratch buffer.
#[derive(Clone, Copy, Debug)]
enum TapeOp {
    Const(f64),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    PowI(usize, i32),
    PowF(usize, f64),
    Exp(usize),
    Sqrt(usize),
}

/// Several expressions compiled into one straight-line program with shared
/// subexpressions. Evaluating the program fills one output per source
/// expression; repeated structure (for instance a polynomial appearing in a
/// formula and throughout its derivative jet) is computed once.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<TapeOp>,
    outputs: Vec<usize>,
}

impl Program {
    pub fn compile(exprs: &[Expr]) -> Program {
        let mut builder = TapeBuilder {
            ops: Vec::new(),
            interned: HashMap::new(),
        };
        let outputs = exprs.iter().map(|e| builder.intern(e)).collect();
        Program {
            ops: builder.ops,
            outputs,
        }
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluate at `point`. `scratch` is reused across calls to avoid
    /// allocation in inner loops; `out` receives one value per compiled
    /// expression.
    pub fn eval(&self, point: [f64; 3], scratch: &mut Vec<f64>, out: &mut [f64]) {
        scratch.clear();
        scratch.resize(self.ops.len(), 0.0);
        for (i, op) in self.ops.iter().enumerate() {
            scratch[i] = match *op {
                TapeOp::Const(c) => c,
                TapeOp::Var(v) => point[v],
                TapeOp::Add(a, b) => scratch[a] + scratch[b],
                TapeOp::Sub(a, b) => scratch[a] - scratch[b],
                TapeOp::Mul(a, b) => scratch[a] * scratch[b],
                TapeOp::Div(a, b) => scratch[a] / scratch[b],
                TapeOp::PowI(a, n) => scratch[a].powi(n),
                TapeOp::PowF(a, r) => scratch[a].powf(r),
                TapeOp::Exp(a) => scratch[a].exp(),
                TapeOp::Sqrt(a) => scratch[a].sqrt(),
            };
        }
        for (slot, o) in self.outputs.iter().zip(out.iter_mut()) {
            *o = scratch[*slot];
        }
    }
}

struct TapeBuilder {
    ops: Vec<TapeOp>,
    interned: HashMap<Expr, usize>,
}

impl TapeBuilder {
    fn intern(&mut self, e: &Expr) -> usize {
        if let Some(&slot) = self.interned.get(e) {
            return slot;
        }
        let op = match e {
            Expr::Const(c) => TapeOp::Const(rational_to_f64(*c)),
            Expr::Var(i) => TapeOp::Var(*i),
            Expr::Add(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                TapeOp::Add(a, b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                TapeOp::Sub(a, b)
            }
            Expr::Mul(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                TapeOp::Mul(a, b)
            }
            Expr::Div(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                TapeOp::Div(a, b)
            }
            Expr::Pow(a, r) => {
                let a = self.intern(a);
                if r.is_integer() && r.numer().unsigned_abs() <= i32::MAX as u64 {
                    TapeOp::PowI(a, *r.numer() as i32)
                } else {
                    TapeOp::PowF(a, rational_to_f64(*r))
                }
            }
            Expr::Exp(a) => {
                let a = self.intern(a);
                TapeOp::Exp(a)
            }
            Expr::Sqrt(a) => {
                let a = self.intern(a);
                TapeOp::Sqrt(a)
            }
        };
        let slot = self.ops.len();
        self.ops.push(op);
        self.interned.insert(e.clone(), slot);
        slot
    }
}
