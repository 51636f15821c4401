//! Multivariate polynomials over `Q` and their text grammar.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants, so `3/4*x` and `x/2` are
//! fine while `1/x` is rejected. Juxtaposition (`2x`, `x y`) is a syntax
//! error.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{is_p_integral, PadicInt};
use crate::series::PadicSeries;

/// Parses `"a"`, `"-a"` or `"a/b"` into a rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `"a/b"`, or `"a"` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A polynomial in a fixed, ordered list of variables with rational
/// coefficients. Terms are keyed by exponent vectors; zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    variables: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Polynomial {
    pub fn zero(variables: &[String]) -> Self {
        Polynomial { variables: variables.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(variables: &[String], c: BigRational) -> Self {
        let mut p = Self::zero(variables);
        if !c.is_zero() {
            p.terms.insert(vec![0; variables.len()], c);
        }
        p
    }

    pub fn variable(variables: &[String], index: usize) -> Self {
        let mut exps = vec![0; variables.len()];
        exps[index] = 1;
        let mut p = Self::zero(variables);
        p.terms.insert(exps, BigRational::one());
        p
    }

    /// Builds from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms(variables: &[String], terms: impl IntoIterator<Item = (BigRational, Vec<u32>)>) -> Result<Self> {
        let mut p = Self::zero(variables);
        for (c, e) in terms {
            if e.len() != variables.len() {
                return Err(Error::DimensionMismatch(format!(
                    "exponent vector of length {} for {} variables",
                    e.len(),
                    variables.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn parse(text: &str, variables: &[String]) -> Result<Self> {
        Parser::new(text, variables)?.parse()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value when no variable occurs.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().expect("one term");
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Self {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = -c.clone();
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(&self.variables);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = Self::zero(&self.variables);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.variables, BigRational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to the variable at `index`.
    pub fn derivative(&self, index: usize) -> Self {
        let mut p = Self::zero(&self.variables);
        for (e, c) in &self.terms {
            if e[index] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[index] -= 1;
            p.add_term(d, c * BigRational::from_integer(BigInt::from(e[index])));
        }
        p
    }

    /// All coefficients lie in `Z_(p)`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.terms.values().all(|c| is_p_integral(c, p))
    }

    /// Evaluates in any commutative ring reachable from `Q` via `ev`.
    pub fn evaluate_with<E: Evaluator>(&self, ev: &E, point: &[E::Value]) -> Result<E::Value> {
        if point.len() != self.variables.len() {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} for {} variables",
                point.len(),
                self.variables.len()
            )));
        }
        let mut powers: Vec<Vec<E::Value>> = point.iter().map(|x| vec![x.clone()]).collect();
        let mut acc = ev.constant(&BigRational::zero())?;
        for (e, c) in &self.terms {
            let mut term = ev.constant(c)?;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() < k as usize {
                    let next = ev.mul(powers[i].last().expect("nonempty"), &point[i])?;
                    powers[i].push(next);
                }
                term = ev.mul(&term, &powers[i][k as usize - 1])?;
            }
            acc = ev.add(&acc, &term)?;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        // Ratio arithmetic reduces by a gcd after every operation, which
        // dominates on long integer orbits.
        if point.iter().all(|c| c.is_integer()) && self.terms.values().all(|c| c.is_integer()) {
            let ints: Vec<BigInt> = point.iter().map(|c| c.numer().clone()).collect();
            return self.evaluate_with(&IntegerEval, &ints).map(BigRational::from_integer);
        }
        self.evaluate_with(&RationalEval, point)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest total degree first, then reverse lexicographic on exponents.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let monomial = e.iter().any(|&k| k > 0);
            if !mag.is_one() || !monomial {
                factors.push(format_rational(&mag));
            }
            for (v, &k) in self.variables.iter().zip(e.iter()) {
                match k {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{k}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// A target ring for [`Polynomial::evaluate_with`].
pub trait Evaluator {
    type Value: Clone;
    fn constant(&self, c: &BigRational) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
}

/// Exact evaluation over `Q`.
pub struct RationalEval;

impl Evaluator for RationalEval {
    type Value = BigRational;

    fn constant(&self, c: &BigRational) -> Result<BigRational> {
        Ok(c.clone())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Ok(a + b)
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Ok(a * b)
    }
}

/// Exact evaluation over `Z`; only valid for integer coefficients.
struct IntegerEval;

impl Evaluator for IntegerEval {
    type Value = BigInt;

    fn constant(&self, c: &BigRational) -> Result<BigInt> {
        debug_assert!(c.is_integer());
        Ok(c.to_integer())
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> Result<BigInt> {
        Ok(a + b)
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> Result<BigInt> {
        Ok(a * b)
    }
}

/// Evaluation in `Z/p^N` for `p`-integral polynomials.
pub struct ResidueEval {
    pub prime: u64,
    pub precision: u32,
}

impl Evaluator for ResidueEval {
    type Value = PadicInt;

    fn constant(&self, c: &BigRational) -> Result<PadicInt> {
        PadicInt::from_big_rational(c, self.prime, self.precision)
    }

    fn add(&self, a: &PadicInt, b: &PadicInt) -> Result<PadicInt> {
        a.checked_add(b)
    }

    fn mul(&self, a: &PadicInt, b: &PadicInt) -> Result<PadicInt> {
        a.checked_mul(b)
    }
}

/// Evaluation in the series ring `Z_p<z>`: composing a polynomial with
/// interpolating series.
pub struct SeriesEval {
    pub prime: u64,
    pub precision: u32,
}

impl Evaluator for SeriesEval {
    type Value = PadicSeries;

    fn constant(&self, c: &BigRational) -> Result<PadicSeries> {
        Ok(PadicSeries::constant(PadicInt::from_big_rational(c, self.prime, self.precision)?))
    }

    fn add(&self, a: &PadicSeries, b: &PadicSeries) -> Result<PadicSeries> {
        a.add(b)
    }

    fn mul(&self, a: &PadicSeries, b: &PadicSeries) -> Result<PadicSeries> {
        a.mul(b)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    variables: &'a [String],
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position, message: message.into() }
}

impl<'a> Parser<'a> {
    fn new(text: &str, variables: &'a [String]) -> Result<Self> {
        let mut tokens = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let tok = match c {
                '+' => Token::Plus,
                '-' => Token::Minus,
                '*' => Token::Star,
                '/' => Token::Slash,
                '^' => Token::Caret,
                '(' => Token::LParen,
                ')' => Token::RParen,
                '0'..='9' => {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    tokens.push((start, Token::Number(text[start..i].parse().expect("digits"))));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    tokens.push((start, Token::Ident(text[start..i].to_string())));
                    continue;
                }
                other => return Err(syntax(start, format!("unexpected character `{other}`"))),
            };
            tokens.push((start, tok));
            i += 1;
        }
        Ok(Parser { tokens, pos: 0, end: text.len(), variables })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn parse(mut self) -> Result<Polynomial> {
        if self.tokens.is_empty() {
            return Err(syntax(0, "empty expression"));
        }
        let p = self.expr()?;
        if self.pos < self.tokens.len() {
            return Err(self.unexpected());
        }
        Ok(p)
    }

    fn unexpected(&self) -> Error {
        match self.peek() {
            None => syntax(self.end, "unexpected end of input"),
            Some(Token::Number(_) | Token::Ident(_) | Token::LParen) => {
                syntax(self.position(), "implicit multiplication is not allowed; use `*`")
            }
            Some(t) => syntax(self.position(), format!("unexpected token {t:?}")),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let at = self.position();
                    let divisor = self.unary()?;
                    match divisor.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                        Some(_) => return Err(syntax(at, "division by zero")),
                        None => return Err(syntax(at, "division is only allowed by nonzero constants")),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let at = self.position();
            match self.peek().cloned() {
                Some(Token::Number(n)) => {
                    self.pos += 1;
                    let k: u32 = n.try_into().map_err(|_| syntax(at, "exponent too large"))?;
                    return Ok(base.pow(k));
                }
                _ => return Err(syntax(at, "expected a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let at = self.position();
        match self.peek().cloned() {
            Some(Token::Number(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.variables, BigRational::from_integer(n)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let idx = self
                    .variables
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(Error::UnknownVariable(name))?;
                Ok(Polynomial::variable(self.variables, idx))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(syntax(self.position(), "expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            None => Err(syntax(at, "unexpected end of input")),
            Some(t) => Err(syntax(at, format!("unexpected token {t:?}"))),
        }
    }
}
