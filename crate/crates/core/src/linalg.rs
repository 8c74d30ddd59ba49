//! Dense linear algebra over fields, and lattices over discrete valuation
//! rings inside valued fields (ℚ with the p-adic valuation, ℚ(t) with the
//! t-adic one).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::{rational_valuation, residue, CoeffRing};
use crate::ratfunc::{RatFunc, UPoly};

pub trait Field {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

/// A field with a discrete valuation; its valuation ring is `O`.
pub trait ValuedField: Field {
    /// Valuation of a nonzero element.
    fn valuation(&self, a: &Self::Elem) -> i64;
    /// `πᵏ` for the fixed uniformizer π.
    fn pi_pow(&self, k: i64) -> Self::Elem;
    /// Canonical representative of an integral `a` modulo `πᵛ`.
    fn residue_rep(&self, a: &Self::Elem, v: u32) -> Self::Elem;
}

/// ℚ or 𝔽ₚ with canonical coefficients.
#[derive(Clone, Copy, Debug)]
pub struct CoeffField(pub CoeffRing);

impl Field for CoeffField {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.0.add(a, b)
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.0.sub(a, b)
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.0.mul(a, b)
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        self.0.inverse(a).expect("inverse of zero")
    }
}

/// ℚ with the p-adic valuation.
#[derive(Clone, Copy, Debug)]
pub struct PAdic(pub u64);

impl Field for PAdic {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
}

impl ValuedField for PAdic {
    fn valuation(&self, a: &BigRational) -> i64 {
        rational_valuation(a, self.0).expect("valuation of zero")
    }
    fn pi_pow(&self, k: i64) -> BigRational {
        let p = BigRational::from_integer(BigInt::from(self.0));
        if k >= 0 {
            num_traits::pow(p, k as usize)
        } else {
            num_traits::pow(p.recip(), (-k) as usize)
        }
    }
    fn residue_rep(&self, a: &BigRational, v: u32) -> BigRational {
        let m = num_traits::pow(BigInt::from(self.0), v as usize);
        BigRational::from_integer(residue(a, &m).expect("non-integral element"))
    }
}

/// ℚ(t) with the t-adic valuation.
#[derive(Clone, Copy, Debug)]
pub struct TAdic;

impl Field for TAdic {
    type Elem = RatFunc;
    fn zero(&self) -> RatFunc {
        RatFunc::zero()
    }
    fn one(&self) -> RatFunc {
        RatFunc::one()
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(b)
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.sub(b)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(b)
    }
    fn inv(&self, a: &RatFunc) -> RatFunc {
        a.inv()
    }
}

impl ValuedField for TAdic {
    fn valuation(&self, a: &RatFunc) -> i64 {
        a.valuation().expect("valuation of zero")
    }
    fn pi_pow(&self, k: i64) -> RatFunc {
        let t = RatFunc::from_poly(UPoly::monomial(
            BigRational::one(),
            k.unsigned_abs() as usize,
        ));
        if k >= 0 {
            t
        } else {
            t.inv()
        }
    }
    fn residue_rep(&self, a: &RatFunc, v: u32) -> RatFunc {
        RatFunc::from_poly(a.series(v as usize))
    }
}

fn axpy<F: Field>(f: &F, row: &mut [F::Elem], c: &F::Elem, pivot: &[F::Elem]) {
    for (r, p) in row.iter_mut().zip(pivot) {
        if !f.is_zero(p) {
            *r = f.sub(r, &f.mul(c, p));
        }
    }
}

fn scale<F: Field>(f: &F, row: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    row.iter().map(|a| f.mul(a, c)).collect()
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(f: &F, mut rows: Vec<Vec<F::Elem>>) -> (Vec<Vec<F::Elem>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, i);
        let inv = f.inv(&rows[r][c]);
        rows[r] = scale(f, &rows[r], &inv);
        let pivot = rows[r].clone();
        for (j, row) in rows.iter_mut().enumerate() {
            if j != r && !f.is_zero(&row[c]) {
                let k = row[c].clone();
                axpy(f, row, &k, &pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank<F: Field>(f: &F, rows: Vec<Vec<F::Elem>>) -> usize {
    rref(f, rows).1.len()
}

/// Basis of `{λ : Σ λᵢ rowᵢ = 0}`, in reduced echelon form.
pub fn left_kernel<F: Field>(f: &F, rows: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let n = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<F::Elem>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            v
        })
        .collect();
    let (red, pivots) = rref(f, aug);
    let kernel: Vec<Vec<F::Elem>> = red
        .into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= ncols)
        .map(|(r, _)| r[ncols..].to_vec())
        .collect();
    rref(f, kernel).0
}

/// Whether `v` lies in the span of `rows` (given in reduced echelon form
/// with `pivots`).
pub fn in_span<F: Field>(f: &F, rows: &[Vec<F::Elem>], pivots: &[usize], v: &[F::Elem]) -> bool {
    let mut w = v.to_vec();
    for (row, &c) in rows.iter().zip(pivots) {
        if !f.is_zero(&w[c]) {
            let k = w[c].clone();
            axpy(f, &mut w, &k, row);
        }
    }
    w.iter().all(|a| f.is_zero(a))
}

/// A finitely generated `O`-submodule of `Kⁿ` in Hermite normal form: each
/// pivot equals `πᵛ`, entries below pivots vanish, and entries above pivots
/// are canonical residues modulo the pivot.
#[derive(Clone, Debug)]
pub struct Lattice<F: ValuedField> {
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
    ncols: usize,
}

fn min_valuation<F: ValuedField>(f: &F, row: &[F::Elem]) -> Option<i64> {
    row.iter()
        .filter(|a| !f.is_zero(a))
        .map(|a| f.valuation(a))
        .min()
}

impl<F: ValuedField> Lattice<F> {
    /// The `O`-span of `gens`, each of length `ncols`.
    pub fn span(f: &F, ncols: usize, gens: Vec<Vec<F::Elem>>) -> Lattice<F> {
        let mut rest: Vec<Vec<F::Elem>> = gens
            .into_iter()
            .filter(|g| g.iter().any(|a| !f.is_zero(a)))
            .collect();
        let mut rows: Vec<Vec<F::Elem>> = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..ncols {
            let best = rest
                .iter()
                .enumerate()
                .filter(|(_, r)| !f.is_zero(&r[c]))
                .min_by_key(|(_, r)| f.valuation(&r[c]))
                .map(|(i, _)| i);
            let Some(i) = best else { continue };
            let mut pivot = rest.swap_remove(i);
            let v = f.valuation(&pivot[c]);
            let unit = f.div(&f.pi_pow(v), &pivot[c]);
            pivot = scale(f, &pivot, &unit);
            for r in rest.iter_mut() {
                if !f.is_zero(&r[c]) {
                    let k = f.div(&r[c], &pivot[c]);
                    axpy(f, r, &k, &pivot);
                }
            }
            rest.retain(|r| r.iter().any(|a| !f.is_zero(a)));
            if v >= 0 {
                for row in rows.iter_mut() {
                    if !f.is_zero(&row[c]) && f.valuation(&row[c]) >= 0 {
                        let red = f.residue_rep(&row[c], v as u32);
                        let k = f.div(&f.sub(&row[c], &red), &pivot[c]);
                        axpy(f, row, &k, &pivot);
                    }
                }
            }
            rows.push(pivot);
            pivots.push(c);
        }
        Lattice {
            rows,
            pivots,
            ncols,
        }
    }

    /// `O`-basis of `V ∩ Oⁿ` where `V` is the `K`-span of `gens`.
    pub fn saturation(f: &F, ncols: usize, gens: Vec<Vec<F::Elem>>) -> Lattice<F> {
        let (basis, _) = rref(f, gens);
        let mut rows: Vec<Vec<F::Elem>> = basis
            .into_iter()
            .map(|r| {
                let v = min_valuation(f, &r).unwrap_or(0);
                scale(f, &r, &f.pi_pow(-v))
            })
            .collect();
        // Unimodular elimination with unit pivots; a remaining block with no
        // unit entry is divisible by π.
        'outer: loop {
            let mut work = rows.clone();
            let mut done = vec![false; work.len()];
            loop {
                let mut best: Option<(usize, usize, i64)> = None;
                for (i, r) in work.iter().enumerate().filter(|(i, _)| !done[*i]) {
                    for (c, a) in r.iter().enumerate() {
                        if !f.is_zero(a) {
                            let v = f.valuation(a);
                            if best.is_none_or(|b| v < b.2) {
                                best = Some((i, c, v));
                            }
                        }
                    }
                }
                let Some((i, c, v)) = best else { break 'outer };
                if v > 0 {
                    let row = scale(f, &work[i], &f.pi_pow(-1));
                    rows = work;
                    rows[i] = row;
                    continue 'outer;
                }
                done[i] = true;
                let pivot = work[i].clone();
                for (j, r) in work.iter_mut().enumerate() {
                    if !done[j] && !f.is_zero(&r[c]) {
                        let k = f.div(&r[c], &pivot[c]);
                        axpy(f, r, &k, &pivot);
                    }
                }
                if done.iter().all(|d| *d) {
                    rows = work;
                    break 'outer;
                }
            }
        }
        Lattice::span(f, ncols, rows)
    }

    pub fn rows(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Whether `v` lies in the lattice.
    pub fn contains(&self, f: &F, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        let mut next = 0;
        for c in 0..self.ncols {
            if next < self.pivots.len() && self.pivots[next] == c {
                if !f.is_zero(&w[c]) {
                    let k = f.div(&w[c], &self.rows[next][c]);
                    if f.valuation(&k) < 0 {
                        return false;
                    }
                    axpy(f, &mut w, &k, &self.rows[next]);
                }
                next += 1;
            } else if !f.is_zero(&w[c]) {
                return false;
            }
        }
        true
    }

    /// Minimal valuation of column `c` over the lattice, `None` if it vanishes.
    pub fn column_valuation(&self, f: &F, c: usize) -> Option<i64> {
        self.rows
            .iter()
            .filter(|r| !f.is_zero(&r[c]))
            .map(|r| f.valuation(&r[c]))
            .min()
    }

    /// The lattice `π·L`.
    pub fn scaled_by_pi(&self, f: &F) -> Vec<Vec<F::Elem>> {
        let pi = f.pi_pow(1);
        self.rows.iter().map(|r| scale(f, r, &pi)).collect()
    }
}

/// Scales a vector of p-adically integral rationals by a p-adic unit so that
/// its entries are coprime integers with positive leading entry.
pub fn primitive_integer_row(row: &[BigRational], p: u64) -> Vec<BigRational> {
    let lcm = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = row
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let pb = BigInt::from(p);
    if !g.is_zero() {
        while (&g % &pb).is_zero() {
            g /= &pb;
        }
    }
    let sign = ints
        .iter()
        .find(|c| !c.is_zero())
        .map_or(BigInt::one(), |c| {
            if c.is_negative() {
                -BigInt::one()
            } else {
                BigInt::one()
            }
        });
    let d = if g.is_zero() { BigInt::one() } else { g * sign };
    ints.into_iter()
        .map(|c| BigRational::new(c, d.clone()))
        .collect()
}
