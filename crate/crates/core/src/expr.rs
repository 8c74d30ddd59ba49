//! Polynomial expressions in text form.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" INT)?
//! atom   := INT | IDENT | "(" expr ")"
//! ```
//!
//! Expressions are evaluated through an [`EvalContext`], which lets the same
//! tree be read as a plain polynomial, as an element of a quotient ring with
//! reduction after every step, or as a number at a point.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{AlgebraError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, BigUint),
}

pub trait EvalContext {
    type Value: Clone;

    fn var(&self, name: &str) -> Result<Self::Value>;
    fn constant(&self, c: &BigRational) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Result<Self::Value>;
    /// Division is only defined by constants; returns `None` when the
    /// divisor is not a constant of the context.
    fn as_constant(&self, a: &Self::Value) -> Option<BigRational>;
    fn scale(&self, a: &Self::Value, c: &BigRational) -> Result<Self::Value>;

    fn pow(&self, a: &Self::Value, e: &BigUint) -> Result<Self::Value> {
        let mut result = self.constant(&BigRational::one())?;
        let bits = e.bits();
        for i in (0..bits).rev() {
            result = self.mul(&result, &result)?;
            if e.bit(i) {
                result = self.mul(&result, a)?;
            }
        }
        Ok(result)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            len: text.chars().count(),
        };
        let e = p.expr()?;
        if let Some((col, tok)) = p.tokens.get(p.pos) {
            return Err(parse_err(*col, format!("unexpected `{tok}`")));
        }
        Ok(e)
    }

    pub fn eval<C: EvalContext>(&self, ctx: &C) -> Result<C::Value> {
        Ok(match self {
            Expr::Int(n) => ctx.constant(&BigRational::from_integer(n.clone()))?,
            Expr::Var(v) => ctx.var(v)?,
            Expr::Neg(a) => ctx.neg(&a.eval(ctx)?)?,
            Expr::Add(a, b) => ctx.add(&a.eval(ctx)?, &b.eval(ctx)?)?,
            Expr::Sub(a, b) => ctx.sub(&a.eval(ctx)?, &b.eval(ctx)?)?,
            Expr::Mul(a, b) => ctx.mul(&a.eval(ctx)?, &b.eval(ctx)?)?,
            Expr::Div(a, b) => {
                let num = a.eval(ctx)?;
                let den = b.eval(ctx)?;
                let c = ctx
                    .as_constant(&den)
                    .ok_or_else(|| AlgebraError::Invalid("division by a non-constant".into()))?;
                if c.is_zero() {
                    return Err(AlgebraError::Invalid("division by zero".into()));
                }
                ctx.scale(&num, &c.recip())?
            }
            Expr::Pow(a, e) => ctx.pow(&a.eval(ctx)?, e)?,
        })
    }

    /// Names of all variables occurring in the expression.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a})*({b})"),
            Expr::Div(a, b) => write!(f, "({a})/({b})"),
            Expr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

fn parse_err(column: usize, message: String) -> AlgebraError {
    AlgebraError::Parse { column, message }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                return Err(parse_err(
                    i + 1,
                    "missing `*` between number and name".into(),
                ));
            }
            let s: String = chars[start..i].iter().collect();
            out.push((col, Tok::Int(s.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((col, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(parse_err(col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek_sym(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((_, Tok::Sym(c))) => Some(*c),
            _ => None,
        }
    }

    fn col(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.0)
            .unwrap_or(self.len + 1)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_sym() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let col = self.col();
            match self.tokens.get(self.pos) {
                Some((_, Tok::Int(n))) => {
                    let e = n.to_biguint().unwrap();
                    self.pos += 1;
                    if self.peek_sym() == Some('^') {
                        return Err(parse_err(
                            self.col(),
                            "chained `^` needs parentheses".into(),
                        ));
                    }
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => {
                    return Err(parse_err(
                        col,
                        "exponent must be a non-negative integer".into(),
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.tokens.get(self.pos).cloned() {
            Some((_, Tok::Int(n))) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some((_, Tok::Ident(s))) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some((_, Tok::Sym('('))) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek_sym() != Some(')') {
                    return Err(parse_err(self.col(), "expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some((_, t)) => Err(parse_err(col, format!("unexpected `{t}`"))),
            None => Err(parse_err(col, "unexpected end of input".into())),
        }
    }
}

/// Evaluates expressions to rational numbers given variable values.
pub struct NumericContext<'a> {
    pub names: &'a [String],
    pub values: &'a [BigRational],
}

impl EvalContext for NumericContext<'_> {
    type Value = BigRational;

    fn var(&self, name: &str) -> Result<BigRational> {
        let i = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| AlgebraError::Invalid(format!("unknown variable `{name}`")))?;
        Ok(self.values[i].clone())
    }
    fn constant(&self, c: &BigRational) -> Result<BigRational> {
        Ok(c.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Ok(a + b)
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Ok(a - b)
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Ok(a * b)
    }
    fn neg(&self, a: &BigRational) -> Result<BigRational> {
        Ok(-a)
    }
    fn as_constant(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
    fn scale(&self, a: &BigRational, c: &BigRational) -> Result<BigRational> {
        Ok(a * c)
    }
}
