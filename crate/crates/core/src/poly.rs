//! Sparse multivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::{Coeff, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::expr::{EvalContext, Expr};
use crate::monomial::{Monomial, MonomialOrder};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: CoeffRing,
    nvars: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero(ring: CoeffRing, nvars: usize) -> Self {
        Polynomial {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: CoeffRing, nvars: usize) -> Self {
        Self::from_int(ring, nvars, 1)
    }

    pub fn from_int(ring: CoeffRing, nvars: usize, n: i64) -> Self {
        Self::constant(ring, nvars, BigRational::from_integer(n.into())).unwrap()
    }

    pub fn constant(ring: CoeffRing, nvars: usize, c: Coeff) -> Result<Self> {
        Self::from_terms(ring, nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(ring: CoeffRing, nvars: usize, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(nvars, i), Coeff::one());
        let mut p = Polynomial { ring, nvars, terms };
        p.strip();
        p
    }

    pub fn from_terms(
        ring: CoeffRing,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Coeff)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(AlgebraError::VariableMismatch(m.nvars(), nvars));
            }
            let c = ring.normalize(c)?;
            let e = map.entry(m).or_insert_with(Coeff::zero);
            *e = ring.add(e, &c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            ring,
            nvars,
            terms: map,
        })
    }

    /// Builds from terms whose coefficients are already canonical.
    pub(crate) fn from_canonical(
        ring: CoeffRing,
        nvars: usize,
        terms: BTreeMap<Monomial, Coeff>,
    ) -> Self {
        Polynomial { ring, nvars, terms }
    }

    fn strip(&mut self) {
        let ring = self.ring;
        for c in self.terms.values_mut() {
            *c = ring.reduce(c.clone());
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Terms in descending order for the given monomial order.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &Coeff)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    pub fn leading(&self, order: MonomialOrder) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d);
        Polynomial {
            ring: self.ring,
            nvars: self.nvars,
            terms: terms.map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut ds = self.terms.keys().map(|m| m.degree());
        match ds.next() {
            None => true,
            Some(d) => ds.all(|e| e == d),
        }
    }

    /// Which variables occur with a nonzero exponent.
    pub fn support_vars(&self) -> Vec<bool> {
        let mut used = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (i, e) in m.exponents().iter().enumerate() {
                if *e > 0 {
                    used[i] = true;
                }
            }
        }
        used
    }

    pub fn involves_only(&self, allowed: &[bool]) -> bool {
        self.terms.keys().all(|m| m.supported_in(allowed))
    }

    fn check(&self, other: &Polynomial) -> Result<()> {
        if self.ring != other.ring {
            return Err(AlgebraError::ModeMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        if self.nvars != other.nvars {
            return Err(AlgebraError::VariableMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert_with(Coeff::zero);
            *e = self.ring.add(e, c);
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = map.entry(ma.mul(mb)).or_insert_with(Coeff::zero);
                *e += ca * cb;
            }
        }
        let mut out = Polynomial {
            ring: self.ring,
            nvars: self.nvars,
            terms: map,
        };
        out.strip();
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), self.ring.neg(c)))
            .collect();
        Polynomial {
            ring: self.ring,
            nvars: self.nvars,
            terms,
        }
    }

    /// Multiplies by a coefficient of the ring.
    pub fn scale(&self, c: &Coeff) -> Result<Polynomial> {
        let c = self.ring.normalize(c.clone())?;
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * &c;
        }
        out.strip();
        Ok(out)
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Polynomial {
        let terms = self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect();
        let mut out = Polynomial {
            ring: self.ring,
            nvars: self.nvars,
            terms,
        };
        out.strip();
        out
    }

    pub fn pow(&self, e: u64) -> Polynomial {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> Polynomial {
        let ctx = PolyContext::anonymous(self.ring, self.nvars);
        ctx.pow(self, e).expect("polynomial powers cannot fail")
    }

    /// Moves coefficients into `target` along the canonical coefficient map.
    pub fn change_ring(&self, target: CoeffRing) -> Result<Polynomial> {
        if !target.can_coerce_from(&self.ring) {
            return Err(AlgebraError::ModeMismatch {
                left: self.ring,
                right: target,
            });
        }
        Polynomial::from_terms(
            target,
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Reinterprets coefficients in `target` without checking the mode
    /// lattice (used for localizations such as ℤ₍ₚ₎ → ℚ and rescalings).
    pub fn reinterpret(&self, target: CoeffRing) -> Result<Polynomial> {
        Polynomial::from_terms(
            target,
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Sends variable `i` to variable `map[i]` of a ring with `nvars` variables.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> Polynomial {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(m, c)| (m.remap(nvars, map), c.clone()))
            .collect();
        Polynomial::from_terms(self.ring, nvars, terms).unwrap()
    }

    /// Substitutes `images[i]` for variable `i`; coefficients are coerced
    /// into the ring of the images.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(AlgebraError::VariableMismatch(images.len(), self.nvars));
        }
        let (ring, n) = match images.first() {
            Some(p) => (p.ring, p.nvars),
            None => (self.ring, 0),
        };
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(p.ring, p.nvars), p.clone()])
            .collect();
        let mut out = Polynomial::zero(ring, n);
        for (m, c) in self.sorted_terms(MonomialOrder::GrevLex) {
            let c = ring.coerce_from(&self.ring, c)?;
            let mut t = Polynomial::constant(ring, n, c)?;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().checked_mul(&images[i])?;
                    powers[i].push(next);
                }
                t = t.checked_mul(&powers[i][e as usize])?;
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// Value at a point with coordinates in the fraction field, computed in ℚ.
    pub fn evaluate_rational(&self, point: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                t *= num_traits::pow(x.clone(), e as usize);
            }
            total += t;
        }
        total
    }

    /// Value at a point of 𝔽ₚⁿ; coefficients must be p-integral.
    pub fn evaluate_mod(&self, p: u64, point: &[u64]) -> Option<u64> {
        let pb = BigInt::from(p);
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let inv = crate::coeff::mod_inverse(c.denom(), &pb)?;
            let mut t = (c.numer() * inv).mod_floor(&pb);
            for (x, &e) in point.iter().zip(m.exponents()) {
                t = (t * BigInt::from(*x).modpow(&BigInt::from(e), &pb)).mod_floor(&pb);
            }
            total += t;
        }
        let r = total.mod_floor(&pb);
        Some(u64::try_from(r).unwrap())
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn parse(ring: CoeffRing, names: &[String], text: &str) -> Result<Polynomial> {
        let expr = Expr::parse(text)?;
        expr.eval(&PolyContext::new(ring, names))
    }

    pub fn render(&self, names: &[String]) -> String {
        render_terms(self.sorted_terms(MonomialOrder::GrevLex), names)
    }
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

pub(crate) fn render_terms(terms: Vec<(&Monomial, &Coeff)>, names: &[String]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = render_monomial(m, names);
        if body.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&body);
        } else {
            out.push_str(&format!("{a}*{body}"));
        }
    }
    out
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_names(self.nvars)))
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs)
            .expect("polynomial addition across rings")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs)
            .expect("polynomial subtraction across rings")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs)
            .expect("polynomial multiplication across rings")
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

/// Reads expressions as polynomials in a free polynomial ring.
pub struct PolyContext<'a> {
    ring: CoeffRing,
    nvars: usize,
    names: Option<&'a [String]>,
}

impl<'a> PolyContext<'a> {
    pub fn new(ring: CoeffRing, names: &'a [String]) -> Self {
        PolyContext {
            ring,
            nvars: names.len(),
            names: Some(names),
        }
    }

    fn anonymous(ring: CoeffRing, nvars: usize) -> Self {
        PolyContext {
            ring,
            nvars,
            names: None,
        }
    }
}

impl EvalContext for PolyContext<'_> {
    type Value = Polynomial;

    fn var(&self, name: &str) -> Result<Polynomial> {
        let i = self
            .names
            .and_then(|ns| ns.iter().position(|n| n == name))
            .ok_or_else(|| AlgebraError::Invalid(format!("unknown variable `{name}`")))?;
        Ok(Polynomial::var(self.ring, self.nvars, i))
    }
    fn constant(&self, c: &BigRational) -> Result<Polynomial> {
        Polynomial::constant(self.ring, self.nvars, c.clone())
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_add(b)
    }
    fn sub(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_sub(b)
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_mul(b)
    }
    fn neg(&self, a: &Polynomial) -> Result<Polynomial> {
        Ok(a.neg())
    }
    fn as_constant(&self, a: &Polynomial) -> Option<BigRational> {
        a.is_constant().then(|| a.constant_term())
    }
    fn scale(&self, a: &Polynomial, c: &BigRational) -> Result<Polynomial> {
        a.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn zz(text: &str) -> Polynomial {
        Polynomial::parse(CoeffRing::Integer, &names(&["x", "y"]), text).unwrap()
    }

    #[test]
    fn binomial_square_over_integers() {
        let a = zz("x + 2*y");
        let sq = &a * &a;
        assert_eq!(sq, zz("x^2 + 4*x*y + 4*y^2"));
        assert_eq!(a.pow(2), sq);
        assert_eq!(sq.render(&names(&["x", "y"])), "x^2 + 4*x*y + 4*y^2");
    }

    #[test]
    fn arithmetic_mod_four() {
        let ring = CoeffRing::mod_prime_power(2, 2).unwrap();
        let n = names(&["x"]);
        let a = Polynomial::parse(ring, &n, "1 + x").unwrap();
        assert_eq!((&a * &a).render(&n), "x^2 + 2*x + 1");
        let b = Polynomial::parse(ring, &n, "3*x - 5").unwrap();
        assert_eq!(b.render(&n), "3*x + 3");
    }

    #[test]
    fn annihilation_and_zero_power() {
        let x = zz("x");
        let zero = Polynomial::zero(CoeffRing::Integer, 2);
        assert!((&x * &zero).is_zero());
        assert_eq!(zz("x + y").pow(0), Polynomial::one(CoeffRing::Integer, 2));
        assert_eq!(zz("y").pow(4).render(&names(&["x", "y"])), "y^4");
    }

    #[test]
    fn rendering_signs_and_rationals() {
        let n = names(&["x", "y"]);
        let p = Polynomial::parse(CoeffRing::Rational, &n, "x^2*y + 4*y^3 - 2").unwrap();
        assert_eq!(p.render(&n), "x^2*y + 4*y^3 - 2");
        let q = Polynomial::parse(CoeffRing::Rational, &n, "-x/2 + 3/4").unwrap();
        assert_eq!(q.render(&n), "-1/2*x + 3/4");
        assert_eq!(
            Polynomial::parse(CoeffRing::Rational, &n, &q.render(&n)).unwrap(),
            q
        );
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = zz("x");
        let b = a.change_ring(CoeffRing::Rational).unwrap();
        assert!(matches!(
            a.checked_add(&b),
            Err(AlgebraError::ModeMismatch { .. })
        ));
        assert!(Polynomial::parse(CoeffRing::Integer, &names(&["x"]), "x/2").is_err());
    }

    #[test]
    fn substitution() {
        let n = names(&["t"]);
        let t2 = Polynomial::parse(CoeffRing::Rational, &n, "t^2").unwrap();
        let t3 = Polynomial::parse(CoeffRing::Rational, &n, "t^3").unwrap();
        let cusp = zz("y^2 - x^3");
        assert!(cusp.substitute(&[t2, t3]).unwrap().is_zero());
    }

    #[test]
    fn evaluation() {
        let p = zz("x^2 - 3*y + 1");
        let pt = [
            BigRational::from_integer(2.into()),
            BigRational::from_integer(1.into()),
        ];
        assert_eq!(
            p.evaluate_rational(&pt),
            BigRational::from_integer(2.into())
        );
        assert_eq!(p.evaluate_mod(5, &[4, 3]), Some(3));
    }

    fn ring_strategy() -> impl Strategy<Value = CoeffRing> {
        prop_oneof![
            Just(CoeffRing::Integer),
            Just(CoeffRing::Rational),
            Just(CoeffRing::IntegerLocalizedAt(3)),
            Just(CoeffRing::IntegerModPrimePower { p: 2, m: 3 }),
            Just(CoeffRing::PrimeField(5)),
        ]
    }

    fn poly_in(ring: CoeffRing) -> impl Strategy<Value = Polynomial> {
        let den = match ring {
            CoeffRing::Integer => 1i64,
            CoeffRing::Rational => 6,
            _ => 2,
        };
        prop::collection::vec(((0u32..3, 0u32..3), -9i64..9, 1i64..=den), 0..5).prop_map(
            move |ts| {
                let terms = ts.into_iter().filter_map(|((a, b), c, d)| {
                    let q = BigRational::new(c.into(), d.into());
                    ring.contains(&q)
                        .then(|| (Monomial::from_exponents(vec![a, b]), q))
                });
                Polynomial::from_terms(ring, 2, terms).unwrap()
            },
        )
    }

    fn triple() -> impl Strategy<Value = (Polynomial, Polynomial, Polynomial)> {
        ring_strategy().prop_flat_map(|r| (poly_in(r), poly_in(r), poly_in(r)))
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in triple()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn pow_is_additive_in_exponent((a, _, _) in triple(), e1 in 0u64..4, e2 in 0u64..4) {
            prop_assert_eq!(a.pow(e1 + e2), &a.pow(e1) * &a.pow(e2));
        }

        #[test]
        fn render_parse_roundtrip((a, _, _) in triple()) {
            let n = vec!["x".to_string(), "y".to_string()];
            prop_assert_eq!(Polynomial::parse(a.ring(), &n, &a.render(&n)).unwrap(), a);
        }
    }
}
