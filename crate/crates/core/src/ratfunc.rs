//! Univariate polynomials and rational functions over ℚ, used as the
//! coefficient field ℚ(t) with its t-adic valuation.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense polynomial in `t` over ℚ, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly(Vec<BigRational>);

impl UPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> UPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub fn constant(c: BigRational) -> UPoly {
        UPoly::new(vec![c])
    }

    pub fn one() -> UPoly {
        UPoly::constant(BigRational::one())
    }

    /// `c·tᵏ`.
    pub fn monomial(c: BigRational, k: usize) -> UPoly {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        UPoly::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Order of vanishing at `t = 0`.
    pub fn t_order(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        UPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UPoly::new(v)
    }

    pub fn scale(&self, c: &BigRational) -> UPoly {
        UPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Division with remainder; panics on division by zero.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, b) in d.0.iter().enumerate() {
                    r[k + j] -= &c * b;
                }
            }
            q[k] = c;
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// Drops all coefficients of degree `>= k`.
    pub fn truncate(&self, k: usize) -> UPoly {
        UPoly::new(self.0.iter().take(k).cloned().collect())
    }

    /// Renders with variable name `t`.
    pub fn render(&self, t: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigRational::zero();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => t.to_string(),
                _ => format!("{t}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

/// Reduced fraction `num/den` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn new(num: UPoly, den: UPoly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = d.lead().recip();
        RatFunc {
            num: n.scale(&l),
            den: d.scale(&l),
        }
    }

    pub fn from_poly(p: UPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: UPoly::one(),
        }
    }

    pub fn zero() -> RatFunc {
        RatFunc::from_poly(UPoly::zero())
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(UPoly::one())
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> RatFunc {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> RatFunc {
        self.mul(&o.inv())
    }

    /// t-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let n = self.num.t_order()? as i64;
        Some(n - self.den.t_order().unwrap_or(0) as i64)
    }

    /// Power series of an integral element, truncated below `tᵏ`.
    pub fn series(&self, k: usize) -> UPoly {
        assert!(
            self.valuation().is_none_or(|v| v >= 0),
            "series of a non-integral element"
        );
        if self.is_zero() || k == 0 {
            return UPoly::zero();
        }
        let d = &self.den.0;
        let d0inv = d[0].recip();
        let mut inv = vec![BigRational::zero(); k];
        inv[0] = d0inv.clone();
        for i in 1..k {
            let mut s = BigRational::zero();
            for j in 1..=i.min(d.len() - 1) {
                s += &d[j] * &inv[i - j];
            }
            inv[i] = -s * &d0inv;
        }
        self.num.mul(&UPoly::new(inv)).truncate(k)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == UPoly::one() {
            write!(f, "{}", self.num.render("t"))
        } else {
            write!(f, "({})/({})", self.num.render("t"), self.den.render("t"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(v: &[i64]) -> UPoly {
        UPoly::new(
            v.iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    #[test]
    fn gcd_and_reduction() {
        let a = up(&[-1, 0, 1]);
        let b = up(&[1, 1]);
        assert_eq!(a.gcd(&b), b);
        let r = RatFunc::new(a, up(&[2, 2]));
        assert_eq!(r.den(), &UPoly::one());
        assert_eq!(
            r.num(),
            &up(&[-1, 1]).scale(&BigRational::new(1.into(), 2.into()))
        );
    }

    #[test]
    fn valuations() {
        let r = RatFunc::new(up(&[0, 0, 3]), up(&[0, 1, 1]));
        assert_eq!(r.valuation(), Some(1));
        assert_eq!(r.inv().valuation(), Some(-1));
        assert_eq!(RatFunc::zero().valuation(), None);
    }

    #[test]
    fn series_inverts() {
        let r = RatFunc::new(UPoly::one(), up(&[1, -1]));
        assert_eq!(r.series(4), up(&[1, 1, 1, 1]));
        let s = RatFunc::new(up(&[1, 2]), up(&[1, 3, 1]));
        let k = 6;
        let back = s.series(k).mul(&up(&[1, 3, 1])).truncate(k);
        assert_eq!(back, up(&[1, 2]));
    }
}
