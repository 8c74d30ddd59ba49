//! Randomized invariants.

use mcalg::algebra::{FpAlgebra, RingMap};
use mcalg::certificate::replay;
use mcalg::groebner::Ideal;
use mcalg::perfection::perf_eq;
use mcalg::{CoeffRing, Polynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

const ZZ: CoeffRing = CoeffRing::Integer;

fn poly(ring: CoeffRing, nvars: usize, terms: &[(i64, Vec<u32>)]) -> Polynomial {
    let mut f = Polynomial::zero(ring, nvars);
    for (c, exps) in terms {
        let mut t = Polynomial::from_int(ring, nvars, *c);
        for (i, &e) in exps.iter().enumerate() {
            t = &t * &Polynomial::var(ring, nvars, i).pow(e as u64);
        }
        f = &f + &t;
    }
    f
}

/// Random terms of total degree at most `max_deg`.
fn terms(
    nvars: usize,
    max_deg: u32,
    coeff: i64,
    len: usize,
) -> impl Strategy<Value = Vec<(i64, Vec<u32>)>> {
    let term = (-coeff..=coeff, prop::collection::vec(0..=max_deg, nvars))
        .prop_filter("degree", move |(_, e)| e.iter().sum::<u32>() <= max_deg);
    prop::collection::vec(term, 0..=len)
}

/// Exponent pairs of total degree at most `d`.
fn monomials(d: u32) -> Vec<(u32, u32)> {
    (0..=d)
        .flat_map(|t| (0..=t).map(move |i| (i, t - i)))
        .collect()
}

fn vector(f: &Polynomial, basis: &[(u32, u32)]) -> Vec<BigInt> {
    basis
        .iter()
        .map(|&(i, j)| {
            let m = poly(ZZ, 2, &[(1, vec![i, j])]);
            let (mono, _) = m.terms().next().unwrap();
            f.coeff(mono).to_integer()
        })
        .collect()
}

/// Whether `f = Σ aᵢ gᵢ` with integer cofactors of degree at most `d`, by
/// echelon reduction of the integer lattice spanned by the `m·gᵢ`.
fn lattice_member(f: &Polynomial, gens: &[Polynomial], d: u32) -> bool {
    let top = d + gens
        .iter()
        .filter_map(|g| g.total_degree())
        .max()
        .unwrap_or(0);
    let basis = monomials(top.max(f.total_degree().unwrap_or(0)));
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for g in gens {
        for (i, j) in monomials(d) {
            rows.push(vector(&(&poly(ZZ, 2, &[(1, vec![i, j])]) * g), &basis));
        }
    }
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for col in 0..basis.len() {
        let mut pivot: Option<Vec<BigInt>> = None;
        for r in rows.iter_mut() {
            if r[col].is_zero() {
                continue;
            }
            match pivot.as_mut() {
                None => pivot = Some(std::mem::take(r)),
                Some(p) => {
                    // Replace (p, r) by (gcd row, combination with zero at col).
                    let e = p[col].extended_gcd(&r[col]);
                    let (a, b) = (&p[col] / &e.gcd, &r[col] / &e.gcd);
                    let new_p: Vec<BigInt> = p
                        .iter()
                        .zip(r.iter())
                        .map(|(x, y)| &e.x * x + &e.y * y)
                        .collect();
                    let new_r: Vec<BigInt> = p
                        .iter()
                        .zip(r.iter())
                        .map(|(x, y)| &a * y - &b * x)
                        .collect();
                    *p = new_p;
                    *r = new_r;
                }
            }
        }
        rows.retain(|r| !r.is_empty() && r.iter().any(|x| !x.is_zero()));
        if let Some(p) = pivot {
            echelon.push((col, p));
        }
    }
    let mut v = vector(f, &basis);
    for (col, p) in &echelon {
        if v[*col].is_zero() {
            continue;
        }
        let (q, r) = v[*col].div_rem(&p[*col]);
        if !r.is_zero() {
            return false;
        }
        for (x, y) in v.iter_mut().zip(p) {
            *x -= &q * y;
        }
    }
    v.iter().all(|x| x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Membership by normal form against an integer-lattice oracle with
    /// cofactors of degree at most 4. A lattice hit is a proof of membership;
    /// the converse holds for these small degrees but not in general, since
    /// `(xy - 1, y^2)` needs cofactors of degree 5 to reach `x^3`.
    #[test]
    fn membership_agrees_with_lattice_search(
        g1 in terms(2, 2, 3, 3),
        g2 in terms(2, 2, 3, 3),
        f in terms(2, 2, 6, 5),
        combo in (terms(2, 2, 3, 3), terms(2, 2, 3, 3)),
    ) {
        let gens = vec![poly(ZZ, 2, &g1), poly(ZZ, 2, &g2)];
        let ideal = Ideal::new(ZZ, 2, gens.clone()).unwrap();
        let member = &(&poly(ZZ, 2, &combo.0) * &gens[0]) + &(&poly(ZZ, 2, &combo.1) * &gens[1]);
        for f in [poly(ZZ, 2, &f), member] {
            prop_assert_eq!(ideal.contains(&f).unwrap(), lattice_member(&f, &gens, 4));
        }
    }

    #[test]
    fn elimination_is_monotone(g in prop::collection::vec(terms(3, 2, 3, 3), 1..3), extra in terms(3, 2, 3, 3)) {
        let q = CoeffRing::Rational;
        let gens: Vec<Polynomial> = g.iter().map(|t| poly(q, 3, t)).collect();
        let small = Ideal::new(q, 3, gens.clone()).unwrap();
        let mut more = gens.clone();
        more.push(poly(q, 3, &extra));
        let big = Ideal::new(q, 3, more).unwrap();
        let all = small.eliminate(&[true, true, true]).unwrap();
        for h in all.generators() {
            prop_assert!(small.contains(h).unwrap());
        }
        for h in small.generators() {
            prop_assert!(all.contains(h).unwrap());
        }
        let keep = [false, true, true];
        for h in small.eliminate(&keep).unwrap().generators() {
            prop_assert!(big.eliminate(&keep).unwrap().contains(h).unwrap());
            prop_assert!(h.involves_only(&keep));
        }
    }

    #[test]
    fn saturation_contains_the_ideal(g in terms(2, 2, 4, 3), f in terms(2, 1, 3, 2)) {
        let gens = vec![poly(ZZ, 2, &g)];
        let f = poly(ZZ, 2, &f);
        let ideal = Ideal::new(ZZ, 2, gens.clone()).unwrap();
        let sat = ideal.saturate(&f, 2000).unwrap();
        for h in &gens {
            prop_assert!(sat.contains(h).unwrap());
        }
        if !f.is_zero() {
            // Each saturation generator times a power of f lands in the ideal.
            for h in sat.generators() {
                let hit = (0..=6u64).any(|k| ideal.contains(&(&f.pow(k) * h)).unwrap());
                prop_assert!(hit);
            }
        }
    }

    #[test]
    fn map_composition_is_associative(a in terms(1, 2, 3, 3), b in terms(1, 2, 3, 3), c in terms(1, 2, 3, 3)) {
        let q = CoeffRing::Rational;
        let rings: Vec<FpAlgebra> = ["s", "t", "u", "v"].iter().map(|v| FpAlgebra::polynomial_ring(q, &[v])).collect();
        let f = RingMap::new(rings[0].clone(), rings[1].clone(), vec![poly(q, 1, &a)]).unwrap();
        let g = RingMap::new(rings[1].clone(), rings[2].clone(), vec![poly(q, 1, &b)]).unwrap();
        let h = RingMap::new(rings[2].clone(), rings[3].clone(), vec![poly(q, 1, &c)]).unwrap();
        let left = f.then(&g).unwrap().then(&h).unwrap();
        let right = f.then(&g.then(&h).unwrap()).unwrap();
        prop_assert_eq!(left.images(), right.images());
    }
}

fn z4x() -> FpAlgebra {
    FpAlgebra::parse(
        CoeffRing::mod_prime_power(2, 2).unwrap(),
        &["x"],
        &["x^2", "2*x"],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Equality in the perfection is an equivalence and a congruence on a
    /// finite ring where every question is decidable.
    #[test]
    fn perf_eq_is_a_congruence(a in 0i64..4, ax in 0i64..2, b in 0i64..4, bx in 0i64..2, c in 0i64..4, cx in 0i64..2) {
        let r = z4x();
        let el = |u: i64, v: i64| r.element(&format!("{u} + {v}*x")).unwrap();
        let (a, b, c) = (el(a, ax), el(b, bx), el(c, cx));
        let eq = |x: &Polynomial, y: &Polynomial| {
            let cert = perf_eq(&r, x, y, Some(2), 6).unwrap();
            replay(&cert).unwrap();
            cert.is_proved()
        };
        prop_assert!(eq(&a, &a));
        prop_assert_eq!(eq(&a, &b), eq(&b, &a));
        if eq(&a, &b) && eq(&b, &c) {
            prop_assert!(eq(&a, &c));
        }
        if eq(&a, &b) {
            prop_assert!(eq(&r.mul(&a, &c).unwrap(), &r.mul(&b, &c).unwrap()));
        }
    }
}

#[test]
fn lattice_oracle_sanity() {
    let gens = vec![
        poly(ZZ, 2, &[(2, vec![1, 0])]),
        poly(ZZ, 2, &[(1, vec![2, 0])]),
    ];
    assert!(lattice_member(&poly(ZZ, 2, &[(4, vec![1, 1])]), &gens, 2));
    assert!(!lattice_member(&poly(ZZ, 2, &[(1, vec![1, 0])]), &gens, 4));
    assert!(lattice_member(&poly(ZZ, 2, &[(-3, vec![2, 1])]), &gens, 2));
}
