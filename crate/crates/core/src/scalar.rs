//! Exact coefficient domains.
//!
//! Box differentials carry rational coefficients ([`Coeff`]). Representations
//! live over a [`Field`] chosen at runtime (the rationals or a prime field),
//! and parametric families over the univariate polynomial ring [`PolyRing`].
//! Ring objects carry the context (e.g. the modulus); elements are plain data.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficient type of graded elements.
pub type Coeff = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient {0} is not defined in characteristic {1}")]
    NotInField(String, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Image of a rational number; fails when the denominator vanishes.
    fn from_rational(&self, q: &Coeff) -> Result<Self::Elem, ScalarError>;
    fn format(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_rational(&Coeff::from_integer(BigInt::from(n)))
            .expect("integers embed in every ring")
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, ScalarError>;

    /// `Some(p)` for a finite prime field.
    fn order(&self) -> Option<u64>;

    /// All elements in a fixed order, for finite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;

    fn parse(&self, s: &str) -> Result<Self::Elem, ScalarError>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ScalarError> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

/// The field of rational numbers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &Coeff) -> Result<BigRational, ScalarError> {
        Ok(q.clone())
    }
    fn format(&self, a: &BigRational) -> String {
        format_rational(a)
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Result<BigRational, ScalarError> {
        if a.is_zero() {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> BigRational {
        BigRational::from_integer(BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000)))
    }
    fn parse(&self, s: &str) -> Result<BigRational, ScalarError> {
        parse_rational(s)
    }
}

/// The prime field with `p` elements; elements are canonical residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let m = n.mod_floor(&BigInt::from(self.p));
        m.to_u64().expect("residue fits")
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_rational(&self, q: &Coeff) -> Result<u64, ScalarError> {
        let den = self.reduce_int(q.denom());
        if den == 0 {
            return Err(ScalarError::NotInField(format_rational(q), self.p));
        }
        let num = self.reduce_int(q.numer());
        Ok(num * self.pow(den, self.p - 2) % self.p)
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Result<u64, ScalarError> {
        if *a == 0 {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self.pow(*a, self.p - 2))
        }
    }
    fn order(&self) -> Option<u64> {
        Some(self.p)
    }
    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.p).collect())
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn parse(&self, s: &str) -> Result<u64, ScalarError> {
        self.from_rational(&parse_rational(s)?)
    }
}

/// Univariate polynomials over a field, coefficients stored lowest degree
/// first with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing<F: Field> {
    pub base: F,
}

impl<F: Field> PolyRing<F> {
    pub fn new(base: F) -> Self {
        PolyRing { base }
    }

    fn trim(&self, mut v: Vec<F::Elem>) -> Vec<F::Elem> {
        while v.last().is_some_and(|c| self.base.is_zero(c)) {
            v.pop();
        }
        v
    }

    /// The indeterminate (the family parameter).
    pub fn variable(&self) -> Vec<F::Elem> {
        vec![self.base.zero(), self.base.one()]
    }

    pub fn constant(&self, c: F::Elem) -> Vec<F::Elem> {
        self.trim(vec![c])
    }

    pub fn evaluate(&self, poly: &[F::Elem], at: &F::Elem) -> F::Elem {
        poly.iter()
            .rev()
            .fold(self.base.zero(), |acc, c| self.base.add(&self.base.mul(&acc, at), c))
    }

    pub fn degree(&self, poly: &[F::Elem]) -> Option<usize> {
        if poly.is_empty() {
            None
        } else {
            Some(poly.len() - 1)
        }
    }
}

impl<F: Field> Ring for PolyRing<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        Vec::new()
    }
    fn one(&self) -> Self::Elem {
        vec![self.base.one()]
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        let zero = self.base.zero();
        let out = (0..n)
            .map(|i| self.base.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
            .collect();
        self.trim(out)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|c| self.base.neg(c)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        self.trim(out)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_empty()
    }
    fn from_rational(&self, q: &Coeff) -> Result<Self::Elem, ScalarError> {
        Ok(self.constant(self.base.from_rational(q)?))
    }
    fn format(&self, a: &Self::Elem) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in a.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            let c = self.base.format(c);
            let monomial = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            parts.push(match (k, c.as_str()) {
                (0, _) => c,
                (_, "1") => monomial,
                (_, "-1") => format!("-{monomial}"),
                _ => format!("{c}*{monomial}"),
            });
        }
        parts.join(" + ")
    }
}

/// Runtime choice of ground field, as used by the CLI and JSON files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "p")]
pub enum FieldSpec {
    Rational,
    Prime(u64),
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

/// Convenience constructor for small rational constants.
pub fn q(n: i64) -> Coeff {
    Coeff::from_integer(BigInt::from(n))
}

pub fn is_unit_magnitude(c: &Coeff) -> bool {
    c.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.inv(&3).unwrap(), 5);
        assert_eq!(f.from_rational(&BigRational::new(1.into(), 2.into())).unwrap(), 4);
        assert_eq!(f.neg(&0), 0);
        assert!(f.inv(&0).is_err());
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn half_is_undefined_mod_two() {
        let f = PrimeField::new(2).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert!(matches!(f.from_rational(&half), Err(ScalarError::NotInField(_, 2))));
    }

    #[test]
    fn rational_division_by_zero() {
        assert_eq!(Rationals.inv(&q(0)), Err(ScalarError::DivisionByZero));
        assert_eq!(parse_rational("3/0"), Err(ScalarError::DivisionByZero));
        assert_eq!(parse_rational("-6/4").unwrap(), BigRational::new((-3).into(), 2.into()));
    }

    #[test]
    fn polynomial_evaluation() {
        let r = PolyRing::new(PrimeField::new(5).unwrap());
        let t = r.variable();
        let p = r.add(&r.mul(&t, &t), &r.one()); // t^2 + 1
        assert_eq!(r.evaluate(&p, &2), 0);
        assert_eq!(r.evaluate(&p, &1), 2);
        assert!(r.is_zero(&r.sub(&p, &p)));
    }
}
