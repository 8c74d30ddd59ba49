//! Coefficient rings: ℤ, ℤ localized at a prime, ℚ, ℤ/pᵐ and 𝔽ₚ.
//!
//! Every coefficient is stored as a [`BigRational`]. The ring decides which
//! rationals are legal and what the canonical representative is: integers for
//! ℤ, fractions with denominator prime to `p` for ℤ₍ₚ₎, and residues in
//! `[0, pᵐ)` for the finite rings.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};

pub type Coeff = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoeffRing {
    Integer,
    IntegerLocalizedAt(u64),
    Rational,
    IntegerModPrimePower { p: u64, m: u32 },
    PrimeField(u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `k` with `pᵏ | c`, or `None` for `c = 0` (infinite valuation).
pub fn p_valuation(c: &BigInt, p: u64) -> Result<Option<u32>> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    Ok(valuation_unchecked(c, p))
}

pub(crate) fn valuation_unchecked(c: &BigInt, p: u64) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut c = c.clone();
    let mut k = 0;
    loop {
        let (q, r) = c.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        c = q;
        k += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn rational_valuation(c: &BigRational, p: u64) -> Option<i64> {
    let num = valuation_unchecked(c.numer(), p)?;
    let den = valuation_unchecked(c.denom(), p).unwrap_or(0);
    Some(num as i64 - den as i64)
}

pub(crate) fn int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn pow_u64(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Residue of a p-integral rational modulo `modulus` (a power of that prime).
pub(crate) fn residue(c: &BigRational, modulus: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(c.denom(), modulus)?;
    Some((c.numer() * inv).mod_floor(modulus))
}

impl CoeffRing {
    pub fn prime(&self) -> Option<u64> {
        match *self {
            CoeffRing::IntegerLocalizedAt(p) | CoeffRing::PrimeField(p) => Some(p),
            CoeffRing::IntegerModPrimePower { p, .. } => Some(p),
            _ => None,
        }
    }

    /// `pᵐ` for ℤ/pᵐ and `p` for 𝔽ₚ.
    pub fn modulus(&self) -> Option<BigInt> {
        match *self {
            CoeffRing::IntegerModPrimePower { p, m } => Some(pow_u64(p, m)),
            CoeffRing::PrimeField(p) => Some(BigInt::from(p)),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, CoeffRing::Rational | CoeffRing::PrimeField(_))
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    /// Builds ℤ/pᵐ, collapsing to 𝔽ₚ when `m = 1`.
    pub fn mod_prime_power(p: u64, m: u32) -> Result<CoeffRing> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if m == 0 {
            return Err(AlgebraError::Invalid(
                "exponent m must be at least 1".into(),
            ));
        }
        Ok(if m == 1 {
            CoeffRing::PrimeField(p)
        } else {
            CoeffRing::IntegerModPrimePower { p, m }
        })
    }

    pub fn contains(&self, c: &Coeff) -> bool {
        match *self {
            CoeffRing::Integer => c.is_integer(),
            CoeffRing::Rational => true,
            CoeffRing::IntegerLocalizedAt(p)
            | CoeffRing::PrimeField(p)
            | CoeffRing::IntegerModPrimePower { p, .. } => {
                !(c.denom() % BigInt::from(p)).is_zero() || c.is_zero()
            }
        }
    }

    /// Canonical representative of `c`, or an error if `c` is not in the ring.
    pub fn normalize(&self, c: Coeff) -> Result<Coeff> {
        if !self.contains(&c) {
            return Err(AlgebraError::CoefficientNotInRing {
                value: c.to_string(),
                ring: *self,
            });
        }
        Ok(self.reduce(c))
    }

    /// Canonicalizes a coefficient already known to lie in the ring.
    pub(crate) fn reduce(&self, c: Coeff) -> Coeff {
        match self.modulus() {
            Some(m) => BigRational::from_integer(
                residue(&c, &m).expect("coefficient not invertible modulo p"),
            ),
            None => c,
        }
    }

    pub fn from_int(&self, n: i64) -> Coeff {
        self.reduce(int(n))
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        self.reduce(-a)
    }

    pub fn is_unit(&self, a: &Coeff) -> bool {
        self.inverse(a).is_some()
    }

    pub fn inverse(&self, a: &Coeff) -> Option<Coeff> {
        if a.is_zero() {
            return None;
        }
        match *self {
            CoeffRing::Integer => (a.abs().is_one()).then(|| a.clone()),
            CoeffRing::Rational => Some(a.recip()),
            CoeffRing::IntegerLocalizedAt(p) => {
                (rational_valuation(a, p) == Some(0)).then(|| a.recip())
            }
            CoeffRing::PrimeField(_) | CoeffRing::IntegerModPrimePower { .. } => {
                let m = self.modulus().unwrap();
                mod_inverse(&a.to_integer(), &m).map(BigRational::from_integer)
            }
        }
    }

    /// Whether coefficients of `from` can be mapped into `self` by the
    /// canonical ring map.
    pub fn can_coerce_from(&self, from: &CoeffRing) -> bool {
        use CoeffRing::*;
        if self == from {
            return true;
        }
        match (*from, *self) {
            (Integer, _) => true,
            (IntegerLocalizedAt(_), Rational) => true,
            (IntegerLocalizedAt(p), IntegerModPrimePower { p: q, .. }) => p == q,
            (IntegerLocalizedAt(p), PrimeField(q)) => p == q,
            (IntegerModPrimePower { p, m }, IntegerModPrimePower { p: q, m: n }) => {
                p == q && n <= m
            }
            (IntegerModPrimePower { p, .. }, PrimeField(q)) => p == q,
            _ => false,
        }
    }

    pub fn coerce_from(&self, from: &CoeffRing, c: &Coeff) -> Result<Coeff> {
        if !self.can_coerce_from(from) {
            return Err(AlgebraError::ModeMismatch {
                left: *from,
                right: *self,
            });
        }
        self.normalize(c.clone())
    }

    /// The ring's coefficient domain as seen by the Gröbner engine.
    pub(crate) fn domain(&self) -> Domain {
        match *self {
            CoeffRing::Rational => Domain::Field(None),
            CoeffRing::PrimeField(p) => Domain::Field(Some(p)),
            CoeffRing::Integer | CoeffRing::IntegerModPrimePower { .. } => Domain::Integer,
            CoeffRing::IntegerLocalizedAt(p) => Domain::Dvr(p),
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CoeffRing::Integer => write!(f, "ZZ"),
            CoeffRing::IntegerLocalizedAt(p) => write!(f, "ZZ_({p})"),
            CoeffRing::Rational => write!(f, "QQ"),
            CoeffRing::IntegerModPrimePower { p, m } => write!(f, "ZZ/{}", pow_u64(p, m)),
            CoeffRing::PrimeField(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for CoeffRing {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || AlgebraError::Invalid(format!("unknown coefficient ring `{s}`"));
        match s {
            "ZZ" => return Ok(CoeffRing::Integer),
            "QQ" => return Ok(CoeffRing::Rational),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("ZZ_(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = rest.trim().parse().map_err(|_| bad())?;
            if !is_prime(p) {
                return Err(AlgebraError::NotPrime(p));
            }
            return Ok(CoeffRing::IntegerLocalizedAt(p));
        }
        if let Some(rest) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = rest.trim().parse().map_err(|_| bad())?;
            return CoeffRing::mod_prime_power(p, 1);
        }
        if let Some(rest) = s.strip_prefix("ZZ/") {
            let n: u64 = rest.trim().parse().map_err(|_| bad())?;
            let (p, m) = prime_power(n).ok_or_else(|| {
                AlgebraError::Invalid(format!("ZZ/{n}: modulus must be a prime power"))
            })?;
            return CoeffRing::mod_prime_power(p, m);
        }
        Err(bad())
    }
}

/// Writes `n = pᵐ` if possible.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = 0;
    let mut r = n;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Coefficient arithmetic used by the Gröbner engine.
///
/// ℤ/pᵐ is handled as ℤ with `pᵐ` adjoined to the ideal, so only three kinds
/// of domain occur: fields, ℤ, and the discrete valuation ring ℤ₍ₚ₎.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Domain {
    Field(Option<u64>),
    Integer,
    Dvr(u64),
}

impl Domain {
    pub fn reduce(&self, c: Coeff) -> Coeff {
        match self {
            Domain::Field(Some(p)) => {
                BigRational::from_integer(residue(&c, &BigInt::from(*p)).expect("non-invertible"))
            }
            _ => c,
        }
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a * b)
    }

    fn field_div(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match self {
            Domain::Field(Some(p)) => {
                let m = BigInt::from(*p);
                let inv = mod_inverse(&b.to_integer(), &m).expect("division by zero in GF(p)");
                BigRational::from_integer((a.to_integer() * inv).mod_floor(&m))
            }
            _ => a / b,
        }
    }

    fn val(&self, a: &Coeff) -> Option<i64> {
        match self {
            Domain::Dvr(p) => rational_valuation(a, *p),
            _ => unreachable!(),
        }
    }

    /// Whether `a` divides `b`.
    pub fn divides(&self, a: &Coeff, b: &Coeff) -> bool {
        if b.is_zero() {
            return true;
        }
        if a.is_zero() {
            return false;
        }
        match self {
            Domain::Field(_) => true,
            Domain::Integer => (b.numer() % a.numer()).is_zero(),
            Domain::Dvr(_) => self.val(a) <= self.val(b),
        }
    }

    /// `b / a`, assuming `a | b`.
    pub fn div_exact(&self, b: &Coeff, a: &Coeff) -> Coeff {
        match self {
            Domain::Field(_) => self.field_div(b, a),
            _ => b / a,
        }
    }

    /// Division with canonical remainder: `c = q·d + r`.
    pub fn div_rem(&self, c: &Coeff, d: &Coeff) -> (Coeff, Coeff) {
        match self {
            Domain::Field(_) => (self.field_div(c, d), Coeff::zero()),
            Domain::Integer => {
                let dn = d.numer().abs();
                let r = c.numer().mod_floor(&dn);
                let q = (c.numer() - &r) / d.numer();
                (BigRational::from_integer(q), BigRational::from_integer(r))
            }
            Domain::Dvr(p) => {
                if self.divides(d, c) {
                    return (c / d, Coeff::zero());
                }
                let k = self.val(d).unwrap() as u32;
                let modulus = pow_u64(*p, k);
                let r = BigRational::from_integer(residue(c, &modulus).unwrap());
                ((c - &r) / d, r)
            }
        }
    }

    /// A unit `u` with `u·c` the canonical associate of `c`.
    pub fn normalizing_unit(&self, c: &Coeff) -> Coeff {
        match self {
            Domain::Field(_) => self.field_div(&Coeff::one(), c),
            Domain::Integer => {
                if c.is_negative() {
                    -Coeff::one()
                } else {
                    Coeff::one()
                }
            }
            Domain::Dvr(p) => {
                let k = self.val(c).unwrap();
                BigRational::from_integer(pow_u64(*p, k as u32)) / c
            }
        }
    }

    /// Multipliers `(ma, mb)` with `ma·a = mb·b = lcm(a, b)`.
    pub fn lcm_multipliers(&self, a: &Coeff, b: &Coeff) -> (Coeff, Coeff) {
        match self {
            Domain::Field(_) => (
                self.field_div(&Coeff::one(), a),
                self.field_div(&Coeff::one(), b),
            ),
            Domain::Integer => {
                let l = a.numer().lcm(b.numer());
                (
                    BigRational::from_integer(&l / a.numer()),
                    BigRational::from_integer(&l / b.numer()),
                )
            }
            Domain::Dvr(_) => {
                if self.val(a) >= self.val(b) {
                    (Coeff::one(), a / b)
                } else {
                    (b / a, Coeff::one())
                }
            }
        }
    }

    /// Bezout data `(g, s, t)` with `s·a + t·b = g = gcd(a, b)`; only needed
    /// over ℤ where leading coefficients can be incomparable.
    pub fn gcdext(&self, a: &Coeff, b: &Coeff) -> (Coeff, Coeff, Coeff) {
        let e = a.numer().extended_gcd(b.numer());
        (
            BigRational::from_integer(e.gcd),
            BigRational::from_integer(e.x),
            BigRational::from_integer(e.y),
        )
    }

    pub fn is_unit(&self, c: &Coeff) -> bool {
        match self {
            Domain::Field(_) => !c.is_zero(),
            Domain::Integer => c.numer().abs().is_one() && c.denom().is_one(),
            Domain::Dvr(_) => self.val(c) == Some(0),
        }
    }

    /// Size used to pick the best reducer: smaller divides more.
    pub fn size_key(&self, c: &Coeff) -> BigInt {
        match self {
            Domain::Field(_) => BigInt::zero(),
            Domain::Integer => c.numer().abs(),
            Domain::Dvr(_) => BigInt::from(self.val(c).unwrap_or(i64::MAX)),
        }
    }
}
