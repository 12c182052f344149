//! Exact coefficients: multivariate polynomials over ℚ in named constants.
//!
//! Renormalisation constants (`c`, `C1`, character values, …) stay symbolic
//! throughout a computation; equality is decided on the normal form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for all coefficients.
pub type Rational = BigRational;

/// Builds the rational `n / d`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `a` or `a/b`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A product of named constants with positive exponents, sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Arc<str>, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Arc<str>, u32)] {
        &self.0
    }

    /// Total degree of the monomial.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn render(&self, latex: bool) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(n, e)| match (*e, latex) {
                (1, _) => n.to_string(),
                (e, false) => format!("{n}^{e}"),
                (e, true) => format!("{n}^{{{e}}}"),
            })
            .collect();
        parts.join(if latex { " " } else { "*" })
    }
}

/// A polynomial with rational coefficients in named constants, kept in
/// normal form (no zero terms, monomials sorted).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, Rational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Coefficient::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::one(), q);
        }
        Coefficient { terms }
    }

    /// The named formal constant `name`.
    pub fn constant(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(name), Rational::one());
        Coefficient { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The value if this coefficient is a plain rational number.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, q) = self.terms.iter().next().unwrap();
                m.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Names of all constants occurring in the polynomial.
    pub fn constants(&self) -> Vec<Arc<str>> {
        let mut names: Vec<Arc<str>> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(n, _)| n.clone()))
            .collect();
        names.sort();
        names.dedup();
        names
    }

    fn add_term(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Coefficient {
        if q.is_zero() {
            return Coefficient::zero();
        }
        Coefficient {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        let mut acc = Coefficient::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `value` for every occurrence of the constant `name`.
    pub fn substitute(&self, name: &str, value: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (m, q) in &self.terms {
            let mut rest = Vec::new();
            let mut exp = 0;
            for (n, e) in &m.0 {
                if &**n == name {
                    exp = *e;
                } else {
                    rest.push((n.clone(), *e));
                }
            }
            let base = Coefficient {
                terms: BTreeMap::from([(Monomial(rest), q.clone())]),
            };
            out += &(&base * &value.pow(exp));
        }
        out
    }

    /// Whether rendering needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }

    fn render(&self, latex: bool) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = q.abs();
            let num = if latex && !a.denom().is_one() {
                format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
            } else {
                fmt_rational(&a)
            };
            if m.is_one() {
                out.push_str(&num);
            } else if a.is_one() {
                out.push_str(&m.render(latex));
            } else if latex {
                out.push_str(&format!("{num} {}", m.render(true)));
            } else {
                out.push_str(&format!("{num}*{}", m.render(false)));
            }
        }
        out
    }

    pub fn to_latex(&self) -> String {
        self.render(true)
    }

    /// Parses a coefficient expression: sums/differences of products of
    /// rationals (`3`, `-2/5`), named constants with optional `^exp`, and
    /// parenthesised sub-expressions.
    pub fn parse(s: &str) -> Result<Coefficient> {
        let mut p = CoeffParser { src: s, pos: 0 };
        let c = p.sum()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(Error::Parse {
                pos: p.pos,
                msg: format!("unexpected input in coefficient: {:?}", &s[p.pos..]),
            });
        }
        Ok(c)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl From<Rational> for Coefficient {
    fn from(q: Rational) -> Self {
        Coefficient::from_rational(q)
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::from_int(n)
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        for (m, q) in &rhs.terms {
            self.add_term(m.clone(), q.clone());
        }
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.add_term(m.clone(), -q.clone());
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect(),
        }
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        let mut out = Coefficient::zero();
        for (m1, q1) in &self.terms {
            for (m2, q2) in &rhs.terms {
                out.add_term(m1.mul(m2), q1 * q2);
            }
        }
        out
    }
}

struct CoeffParser<'a> {
    src: &'a str,
    pos: usize,
}

impl CoeffParser<'_> {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn sum(&mut self) -> Result<Coefficient> {
        self.skip_ws();
        let mut neg = false;
        if self.peek() == Some('-') {
            neg = true;
            self.pos += 1;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        let mut acc = self.product()?;
        if neg {
            acc = -&acc;
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.product()?;
                    acc += &t;
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.product()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Coefficient> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                let f = self.factor()?;
                acc = &acc * &f;
            } else {
                return Ok(acc);
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        Ok(self.src[start..self.pos].parse().unwrap())
    }

    fn factor(&mut self) -> Result<Coefficient> {
        self.skip_ws();
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let c = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                c
            }
            Some('-') => {
                self.pos += 1;
                let f = self.factor()?;
                return Ok(-&f);
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                self.skip_ws();
                let d = if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    self.integer()?
                } else {
                    BigInt::one()
                };
                if d.is_zero() {
                    return self.err("zero denominator");
                }
                Coefficient::from_rational(BigRational::new(n, d))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                Coefficient::constant(&self.src[start..self.pos])
            }
            _ => return self.err("expected number, constant or '('"),
        };
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = e.to_u32().ok_or(Error::Parse { pos: self.pos, msg: "exponent too large".into() })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(rng: &mut ChaCha8Rng) -> Coefficient {
        let names = ["a", "b", "c"];
        let mut out = Coefficient::zero();
        for _ in 0..rng.gen_range(0..4) {
            let mut t = Coefficient::from_rational(rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
            for n in names {
                t = &t * &Coefficient::constant(n).pow(rng.gen_range(0..3));
            }
            out += &t;
        }
        out
    }

    #[test]
    fn ring_laws_on_seeded_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (a, b, c) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&a * &b, &b * &a);
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert!((&a - &a).is_zero());
        }
    }

    #[test]
    fn render_and_parse_round_trip() {
        let c = Coefficient::constant("c");
        let x = &(&c.pow(2) * &Coefficient::from_rational(rat(-3, 2))) + &Coefficient::from_int(5);
        assert_eq!(x.to_string(), "5 - 3/2*c^2");
        assert_eq!(Coefficient::parse(&x.to_string()).unwrap(), x);
        assert_eq!(Coefficient::parse("-c^2").unwrap(), -&c.pow(2));
        assert_eq!(Coefficient::parse("2*(a + b)").unwrap().to_string(), "2*a + 2*b");
        assert!(Coefficient::parse("1/0").is_err());
    }

    #[test]
    fn substitution() {
        let p = Coefficient::parse("x^2 - c^2").unwrap();
        let v = Coefficient::parse("c + 1").unwrap();
        assert_eq!(p.substitute("x", &v), Coefficient::parse("2*c + 1").unwrap());
    }
}
