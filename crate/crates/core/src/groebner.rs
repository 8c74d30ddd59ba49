//! Gröbner bases over fields, strong Gröbner bases over ℤ, and bases over the
//! discrete valuation ring ℤ₍ₚ₎.
//!
//! ℤ/pᵐ is handled by computing over ℤ with the constant `pᵐ` adjoined.
//! Normal forms are canonical: at every monomial the coefficient is reduced
//! modulo the leading-coefficient ideal of that monomial, so `NF(f) = NF(g)`
//! exactly when `f - g` lies in the ideal.

use std::collections::HashSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeff::{Coeff, CoeffRing, Domain};
use crate::error::{AlgebraError, Result};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::Polynomial;

pub const DEFAULT_PAIR_BUDGET: usize = 50_000;

type Terms = Vec<(Monomial, Coeff)>;

#[derive(Clone, Copy)]
struct Engine {
    dom: Domain,
    order: MonomialOrder,
}

impl Engine {
    fn terms_of(&self, p: &Polynomial) -> Terms {
        let mut t: Terms = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        t.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
        t
    }

    /// `a - c·m·b`, both inputs sorted descending.
    fn sub_mul(&self, a: &Terms, c: &Coeff, m: &Monomial, b: &Terms) -> Terms {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut i = 0;
        let mut j = 0;
        let scaled = |k: usize| (b[k].0.mul(m), self.dom.mul(c, &b[k].1));
        let mut next_b = if b.is_empty() { None } else { Some(scaled(0)) };
        while i < a.len() || next_b.is_some() {
            let ord = match (&next_b, a.get(i)) {
                (None, _) => std::cmp::Ordering::Greater,
                (Some(_), None) => std::cmp::Ordering::Less,
                (Some(bt), Some(at)) => self.order.cmp(&at.0, &bt.0),
            };
            match ord {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let (bm, bc) = next_b.take().unwrap();
                    let v = self.dom.reduce(-bc);
                    if !v.is_zero() {
                        out.push((bm, v));
                    }
                    j += 1;
                    next_b = (j < b.len()).then(|| scaled(j));
                }
                std::cmp::Ordering::Equal => {
                    let (bm, bc) = next_b.take().unwrap();
                    let v = self.dom.reduce(&a[i].1 - bc);
                    if !v.is_zero() {
                        out.push((bm, v));
                    }
                    i += 1;
                    j += 1;
                    next_b = (j < b.len()).then(|| scaled(j));
                }
            }
        }
        out
    }

    fn scale(&self, a: &Terms, c: &Coeff) -> Terms {
        a.iter()
            .map(|(m, x)| (m.clone(), self.dom.mul(x, c)))
            .filter(|(_, x)| !x.is_zero())
            .collect()
    }

    fn best_reducer(&self, m: &Monomial, basis: &[Terms]) -> Option<usize> {
        let mut best: Option<(usize, BigInt)> = None;
        for (k, g) in basis.iter().enumerate() {
            if g[0].0.divides(m) {
                let key = self.dom.size_key(&g[0].1);
                if best.as_ref().is_none_or(|(_, b)| key < *b) {
                    best = Some((k, key));
                }
            }
        }
        best.map(|b| b.0)
    }

    /// Fully reduced canonical remainder.
    fn normal_form(&self, mut f: Terms, basis: &[Terms]) -> Terms {
        let mut rest: Terms = Vec::new();
        while !f.is_empty() {
            let (m, c) = f[0].clone();
            match self.best_reducer(&m, basis) {
                None => {
                    rest.push(f.remove(0));
                }
                Some(k) => {
                    let g = &basis[k];
                    let (q, r) = self.dom.div_rem(&c, &g[0].1);
                    if !q.is_zero() {
                        let mq = g[0].0.quotient_of(&m);
                        f = self.sub_mul(&f, &q, &mq, g);
                    }
                    if !r.is_zero() {
                        debug_assert!(f.first().is_some_and(|t| t.0 == m));
                        rest.push(f.remove(0));
                    }
                }
            }
        }
        rest
    }

    /// Reduces only the leading term until it is irreducible (top reduction),
    /// which is all the pair loop needs.
    fn top_reduce(&self, mut f: Terms, basis: &[Terms]) -> Terms {
        while let Some((m, c)) = f.first().cloned() {
            let Some(k) = self.best_reducer(&m, basis) else {
                break;
            };
            let g = &basis[k];
            let (q, r) = self.dom.div_rem(&c, &g[0].1);
            if q.is_zero() {
                break;
            }
            let mq = g[0].0.quotient_of(&m);
            f = self.sub_mul(&f, &q, &mq, g);
            if !r.is_zero() {
                break;
            }
        }
        f
    }

    fn normalize(&self, f: Terms) -> Terms {
        if f.is_empty() {
            return f;
        }
        let u = self.dom.normalizing_unit(&f[0].1);
        self.scale(&f, &u)
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

fn buchberger(eng: &Engine, gens: Vec<Terms>, budget: usize) -> Result<Vec<Terms>> {
    let is_field = matches!(eng.dom, Domain::Field(_));
    let mut basis: Vec<Terms> = Vec::new();
    let mut sugar: Vec<u32> = Vec::new();
    let mut pending: Vec<Pair> = Vec::new();
    let mut live: HashSet<(usize, usize)> = HashSet::new();

    let add = |h: Terms,
               s: u32,
               basis: &mut Vec<Terms>,
               sugar: &mut Vec<u32>,
               pending: &mut Vec<Pair>,
               live: &mut HashSet<(usize, usize)>| {
        let h = eng.normalize(h);
        let n = basis.len();
        for (i, g) in basis.iter().enumerate() {
            let lcm = g[0].0.lcm(&h[0].0);
            let units = eng.dom.is_unit(&g[0].1) && eng.dom.is_unit(&h[0].1);
            if units && g[0].0.coprime(&h[0].0) {
                continue;
            }
            let d = lcm.degree();
            let s1 = sugar[i] + d - g[0].0.degree();
            let s2 = s + d - h[0].0.degree();
            pending.push(Pair {
                i,
                j: n,
                lcm,
                sugar: s1.max(s2),
            });
            live.insert((i, n));
        }
        basis.push(h);
        sugar.push(s);
    };

    for g in gens {
        let s = g.iter().map(|t| t.0.degree()).max().unwrap_or(0);
        let h = eng.normal_form(g, &basis);
        if !h.is_empty() {
            add(h, s, &mut basis, &mut sugar, &mut pending, &mut live);
        }
    }

    let mut processed = 0usize;
    while !pending.is_empty() {
        processed += 1;
        if processed > budget {
            return Err(AlgebraError::CapExceeded(format!(
                "Gröbner basis pair budget {budget} exhausted"
            )));
        }
        let mut best = 0;
        for k in 1..pending.len() {
            let a = &pending[k];
            let b = &pending[best];
            let ord = a
                .sugar
                .cmp(&b.sugar)
                .then_with(|| eng.order.cmp(&a.lcm, &b.lcm))
                .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)));
            if ord.is_lt() {
                best = k;
            }
        }
        let pair = pending.swap_remove(best);
        live.remove(&(pair.i, pair.j));

        if is_field {
            let chain = (0..basis.len()).any(|k| {
                k != pair.i
                    && k != pair.j
                    && basis[k][0].0.divides(&pair.lcm)
                    && !live.contains(&(pair.i.min(k), pair.i.max(k)))
                    && !live.contains(&(pair.j.min(k), pair.j.max(k)))
            });
            if chain {
                continue;
            }
        }

        let f = &basis[pair.i];
        let g = &basis[pair.j];
        let mf = f[0].0.quotient_of(&pair.lcm);
        let mg = g[0].0.quotient_of(&pair.lcm);
        let mut candidates = Vec::new();

        let (ca, cb) = eng.dom.lcm_multipliers(&f[0].1, &g[0].1);
        let s = eng.sub_mul(
            &eng.scale(
                &f.iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect(),
                &ca,
            ),
            &cb,
            &mg,
            g,
        );
        candidates.push(s);

        if eng.dom == Domain::Integer
            && !eng.dom.divides(&f[0].1, &g[0].1)
            && !eng.dom.divides(&g[0].1, &f[0].1)
        {
            let (_, sa, sb) = eng.dom.gcdext(&f[0].1, &g[0].1);
            let left = eng.scale(
                &f.iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect(),
                &sa,
            );
            let gp = eng.sub_mul(&left, &-sb, &mg, g);
            candidates.push(gp);
        }

        for c in candidates {
            let h = eng.top_reduce(c, &basis);
            if !h.is_empty() {
                let h = eng.normal_form(h, &basis);
                if !h.is_empty() {
                    add(
                        h,
                        pair.sugar,
                        &mut basis,
                        &mut sugar,
                        &mut pending,
                        &mut live,
                    );
                }
            }
        }
    }
    Ok(interreduce(eng, basis))
}

fn interreduce(eng: &Engine, basis: Vec<Terms>) -> Vec<Terms> {
    let mut b = basis;
    b.sort_by(|x, y| {
        eng.order
            .cmp(&x[0].0, &y[0].0)
            .then_with(|| eng.dom.size_key(&x[0].1).cmp(&eng.dom.size_key(&y[0].1)))
    });
    let mut keep: Vec<Terms> = Vec::new();
    for g in b {
        let redundant = keep
            .iter()
            .any(|h| h[0].0.divides(&g[0].0) && eng.dom.divides(&h[0].1, &g[0].1));
        if !redundant {
            keep.push(g);
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for k in 0..keep.len() {
        let others: Vec<Terms> = keep
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, g)| g.clone())
            .collect();
        let head = keep[k][0].clone();
        let tail = eng.normal_form(keep[k][1..].to_vec(), &others);
        let mut g = vec![head];
        g.extend(tail);
        out.push(eng.normalize(g));
    }
    out.sort_by(|x, y| eng.order.cmp(&x[0].0, &y[0].0));
    out
}

/// A computed Gröbner basis together with the data needed to reduce by it.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: CoeffRing,
    nvars: usize,
    order: MonomialOrder,
    elems: Vec<Terms>,
}

impl GroebnerBasis {
    fn engine(&self) -> Engine {
        Engine {
            dom: self.ring.domain(),
            order: self.order,
        }
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    /// Basis elements as polynomials of the ideal's ring (for ℤ/pᵐ the
    /// adjoined constant `pᵐ` becomes zero and is omitted).
    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.elems
            .iter()
            .map(|t| Polynomial::from_terms(self.ring, self.nvars, t.iter().cloned()).unwrap())
            .filter(|p| !p.is_zero())
            .collect()
    }

    pub(crate) fn leading_terms(&self) -> Vec<(Monomial, Coeff)> {
        self.elems.iter().map(|t| t[0].clone()).collect()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.elems.iter().map(|t| t[0].0.clone()).collect()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.ring() != self.ring {
            return Err(AlgebraError::ModeMismatch {
                left: f.ring(),
                right: self.ring,
            });
        }
        if f.nvars() != self.nvars {
            return Err(AlgebraError::VariableMismatch(f.nvars(), self.nvars));
        }
        let eng = self.engine();
        let r = eng.normal_form(eng.terms_of(f), &self.elems);
        Ok(Polynomial::from_terms(self.ring, self.nvars, r).unwrap())
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.elems.iter().any(|t| {
            t.len() == 1 && t[0].0.is_one() && self.ring.domain().divides(&t[0].1, &Coeff::one())
        })
    }
}

/// An ideal of a polynomial ring, with a lazily computed basis.
#[derive(Debug)]
pub struct Ideal {
    ring: CoeffRing,
    nvars: usize,
    order: MonomialOrder,
    generators: Vec<Polynomial>,
    budget: usize,
    basis: OnceLock<Result<GroebnerBasis>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let basis = OnceLock::new();
        if let Some(b) = self.basis.get() {
            let _ = basis.set(b.clone());
        }
        Ideal {
            ring: self.ring,
            nvars: self.nvars,
            order: self.order,
            generators: self.generators.clone(),
            budget: self.budget,
            basis,
        }
    }
}

impl Ideal {
    pub fn new(ring: CoeffRing, nvars: usize, generators: Vec<Polynomial>) -> Result<Ideal> {
        Ideal::with_order(ring, nvars, generators, MonomialOrder::GrevLex)
    }

    pub fn with_order(
        ring: CoeffRing,
        nvars: usize,
        generators: Vec<Polynomial>,
        order: MonomialOrder,
    ) -> Result<Ideal> {
        for g in &generators {
            if g.ring() != ring {
                return Err(AlgebraError::ModeMismatch {
                    left: g.ring(),
                    right: ring,
                });
            }
            if g.nvars() != nvars {
                return Err(AlgebraError::VariableMismatch(g.nvars(), nvars));
            }
        }
        Ok(Ideal {
            ring,
            nvars,
            order,
            generators,
            budget: DEFAULT_PAIR_BUDGET,
            basis: OnceLock::new(),
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Ideal {
        self.budget = budget;
        self.basis = OnceLock::new();
        self
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn groebner_basis(&self) -> Result<&GroebnerBasis> {
        self.basis
            .get_or_init(|| {
                let eng = Engine {
                    dom: self.ring.domain(),
                    order: self.order,
                };
                let mut gens: Vec<Terms> = Vec::new();
                if let Some(m) = self.ring.modulus() {
                    if eng.dom == Domain::Integer {
                        gens.push(vec![(
                            Monomial::one(self.nvars),
                            BigRational::from_integer(m),
                        )]);
                    }
                }
                gens.extend(self.generators.iter().map(|g| eng.terms_of(g)));
                let elems = buchberger(&eng, gens, self.budget)?;
                Ok(GroebnerBasis {
                    ring: self.ring,
                    nvars: self.nvars,
                    order: self.order,
                    elems,
                })
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        self.groebner_basis()?.normal_form(f)
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner_basis()?.is_unit_ideal())
    }

    /// Reduced basis as a list of polynomials.
    pub fn reduced_generators(&self) -> Result<Vec<Polynomial>> {
        Ok(self.groebner_basis()?.polynomials())
    }

    pub fn add_generators(&self, more: &[Polynomial]) -> Result<Ideal> {
        let mut g = self.generators.clone();
        g.extend(more.iter().cloned());
        Ok(Ideal::with_order(self.ring, self.nvars, g, self.order)?.with_budget(self.budget))
    }

    /// `I ∩ k[kept variables]`, returned in the same ambient ring.
    pub fn eliminate(&self, keep: &[bool]) -> Result<Ideal> {
        if keep.len() != self.nvars {
            return Err(AlgebraError::VariableMismatch(keep.len(), self.nvars));
        }
        let elim: Vec<usize> = (0..self.nvars).filter(|&i| !keep[i]).collect();
        let kept: Vec<usize> = (0..self.nvars).filter(|&i| keep[i]).collect();
        let mut to_new = vec![0; self.nvars];
        for (pos, &i) in elim.iter().chain(kept.iter()).enumerate() {
            to_new[i] = pos;
        }
        let mut to_old = vec![0; self.nvars];
        for (i, &j) in to_new.iter().enumerate() {
            to_old[j] = i;
        }
        let moved: Vec<Polynomial> = self
            .generators
            .iter()
            .map(|g| g.remap_vars(self.nvars, &to_new))
            .collect();
        let big = Ideal::with_order(
            self.ring,
            self.nvars,
            moved,
            MonomialOrder::Block(elim.len()),
        )?
        .with_budget(self.budget);
        let mut allowed = vec![false; self.nvars];
        for a in allowed.iter_mut().skip(elim.len()) {
            *a = true;
        }
        let basis = big.reduced_generators()?;
        let out: Vec<Polynomial> = basis
            .into_iter()
            .filter(|g| g.involves_only(&allowed))
            .map(|g| g.remap_vars(self.nvars, &to_old))
            .collect();
        Ok(Ideal::with_order(self.ring, self.nvars, out, self.order)?.with_budget(self.budget))
    }

    /// `(I : f^∞)` via an auxiliary variable `z` and the relation `1 - z·f`.
    pub fn saturate(&self, f: &Polynomial, cap: usize) -> Result<Ideal> {
        let n = self.nvars;
        let lift: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Polynomial> = self
            .generators
            .iter()
            .map(|g| g.remap_vars(n + 1, &lift))
            .collect();
        let z = Polynomial::var(self.ring, n + 1, n);
        let one = Polynomial::one(self.ring, n + 1);
        gens.push(&one - &(&z * &f.remap_vars(n + 1, &lift)));
        let mut keep = vec![true; n + 1];
        keep[n] = false;
        let big = Ideal::with_order(self.ring, n + 1, gens, self.order)?.with_budget(cap);
        let e = big.eliminate(&keep)?;
        let back: Vec<Polynomial> = e
            .reduced_generators()?
            .into_iter()
            .map(|g| drop_last_var(&g))
            .collect();
        Ok(Ideal::with_order(self.ring, n, back, self.order)?.with_budget(self.budget))
    }

    /// `I ∩ J` via `t·I + (1 - t)·J` and elimination of `t`.
    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        let n = self.nvars;
        let lift: Vec<usize> = (1..=n).collect();
        let t = Polynomial::var(self.ring, n + 1, 0);
        let one = Polynomial::one(self.ring, n + 1);
        let omt = &one - &t;
        let mut gens: Vec<Polynomial> = self
            .generators
            .iter()
            .map(|g| &t * &g.remap_vars(n + 1, &lift))
            .collect();
        gens.extend(
            other
                .generators
                .iter()
                .map(|g| &omt * &g.remap_vars(n + 1, &lift)),
        );
        let mut keep = vec![true; n + 1];
        keep[0] = false;
        let big = Ideal::with_order(self.ring, n + 1, gens, self.order)?.with_budget(self.budget);
        let e = big.eliminate(&keep)?;
        let to_old: Vec<usize> = std::iter::once(0).chain(0..n).collect();
        let back: Vec<Polynomial> = e
            .reduced_generators()?
            .into_iter()
            .map(|g| g.remap_vars(n, &to_old))
            .collect();
        Ideal::with_order(self.ring, n, back, self.order)
    }
}

fn drop_last_var(g: &Polynomial) -> Polynomial {
    let n = g.nvars() - 1;
    let terms = g.terms().map(|(m, c)| {
        (
            Monomial::from_exponents(m.exponents()[..n].to_vec()),
            c.clone(),
        )
    });
    Polynomial::from_terms(g.ring(), n, terms).unwrap()
}

/// Exact quotient `f / g` in the polynomial ring over a field, if `g | f`.
pub fn divide_exact(f: &Polynomial, g: &Polynomial) -> Option<Polynomial> {
    if g.is_zero() {
        return None;
    }
    let eng = Engine {
        dom: f.ring().domain(),
        order: MonomialOrder::GrevLex,
    };
    let gt = eng.terms_of(g);
    let mut r = eng.terms_of(f);
    let mut q: Terms = Vec::new();
    while let Some((m, c)) = r.first().cloned() {
        if !gt[0].0.divides(&m) || !eng.dom.divides(&gt[0].1, &c) {
            return None;
        }
        let qc = eng.dom.div_exact(&c, &gt[0].1);
        let qm = gt[0].0.quotient_of(&m);
        r = eng.sub_mul(&r, &qc, &qm, &gt);
        q.push((qm, qc));
    }
    Some(Polynomial::from_terms(f.ring(), f.nvars(), q).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn ideal(ring: CoeffRing, vars: &[&str], gens: &[&str]) -> (Ideal, Vec<String>) {
        let n = names(vars);
        let g = gens
            .iter()
            .map(|s| Polynomial::parse(ring, &n, s).unwrap())
            .collect();
        (Ideal::new(ring, n.len(), g).unwrap(), n)
    }

    fn rendered(i: &Ideal, n: &[String]) -> Vec<String> {
        i.reduced_generators()
            .unwrap()
            .iter()
            .map(|p| p.render(n))
            .collect()
    }

    #[test]
    fn field_basis_collapses() {
        let (i, n) = ideal(CoeffRing::Rational, &["x"], &["x^2 - 1", "x - 1"]);
        assert_eq!(rendered(&i, &n), vec!["x - 1"]);
    }

    #[test]
    fn strong_basis_over_integers() {
        let (i, n) = ideal(CoeffRing::Integer, &["x"], &["2*x", "x^2"]);
        assert_eq!(rendered(&i, &n), vec!["2*x", "x^2"]);
        let p = |s: &str| Polynomial::parse(CoeffRing::Integer, &n, s).unwrap();
        assert!(i.normal_form(&p("x^2 + 2*x")).unwrap().is_zero());
        assert_eq!(i.normal_form(&p("x")).unwrap(), p("x"));
        assert_eq!(i.normal_form(&p("3*x")).unwrap(), p("x"));
    }

    #[test]
    fn zero_ideal_and_constant_remainder() {
        let (i, _) = ideal(CoeffRing::Rational, &["x"], &["0"]);
        assert!(i.reduced_generators().unwrap().is_empty());
        let (j, n) = ideal(CoeffRing::Integer, &["x"], &["4"]);
        let three = Polynomial::parse(CoeffRing::Integer, &n, "3").unwrap();
        assert_eq!(j.normal_form(&three).unwrap(), three);
        let seven = Polynomial::parse(CoeffRing::Integer, &n, "7").unwrap();
        assert_eq!(j.normal_form(&seven).unwrap(), three);
    }

    #[test]
    fn mixed_leading_coefficients_need_gpolys() {
        let (i, n) = ideal(CoeffRing::Integer, &["x", "y"], &["3*x*y - y", "2*x^2 + x"]);
        let p = |s: &str| Polynomial::parse(CoeffRing::Integer, &n, s).unwrap();
        for g in i.generators() {
            assert!(i.contains(g).unwrap());
        }
        // 2x·(3xy - y) - 3y·(2x^2 + x) = -5xy, and -5xy + 2(3xy - y)... combinations
        let combo = &(&p("x") * &p("3*x*y - y")) - &(&p("y") * &p("2*x^2 + x"));
        assert!(i.contains(&combo).unwrap());
        assert!(!i.contains(&p("x*y")).unwrap() || i.contains(&p("y")).unwrap());
    }

    #[test]
    fn modular_coefficients() {
        let z4 = CoeffRing::mod_prime_power(2, 2).unwrap();
        let (i, n) = ideal(z4, &["x"], &["x^2", "2*x"]);
        let f = Polynomial::parse(z4, &n, "1 + x").unwrap().pow(2);
        assert_eq!(i.normal_form(&f).unwrap(), Polynomial::one(z4, 1));
        let (j, n) = ideal(z4, &["x"], &["x^2 - 2", "2*x"]);
        let g = Polynomial::parse(z4, &n, "x^4").unwrap();
        assert!(j.contains(&g).unwrap());
    }

    #[test]
    fn localized_basis() {
        let zl = CoeffRing::IntegerLocalizedAt(2);
        let (i, n) = ideal(zl, &["x"], &["3*x", "6"]);
        assert_eq!(rendered(&i, &n), vec!["2", "x"]);
        let p = |s: &str| Polynomial::parse(zl, &n, s).unwrap();
        assert_eq!(i.normal_form(&p("5")).unwrap(), p("1"));
        assert!(i.contains(&p("x/3 + 4/5")).unwrap());
    }

    #[test]
    fn elimination_gives_cusp() {
        let (i, n) = ideal(
            CoeffRing::Rational,
            &["t", "x", "y"],
            &["t^2 - x", "t^3 - y"],
        );
        let e = i.eliminate(&[false, true, true]).unwrap();
        assert_eq!(rendered(&e, &n), vec!["x^3 - y^2"]);
        let (j, _) = ideal(CoeffRing::Rational, &["x", "y"], &["x - 1"]);
        assert!(j
            .eliminate(&[false, true])
            .unwrap()
            .reduced_generators()
            .unwrap()
            .is_empty());
        let (k, n) = ideal(CoeffRing::Rational, &["x", "y"], &["x", "y"]);
        assert_eq!(
            rendered(&k.eliminate(&[false, true]).unwrap(), &n),
            vec!["y"]
        );
    }

    #[test]
    fn saturation_examples() {
        let (i, n) = ideal(CoeffRing::Integer, &["x"], &["2*x"]);
        let two = Polynomial::from_int(CoeffRing::Integer, 1, 2);
        assert_eq!(rendered(&i.saturate(&two, 1000).unwrap(), &n), vec!["x"]);
        let (j, _) = ideal(CoeffRing::Rational, &["x"], &["x^2"]);
        let x = Polynomial::var(CoeffRing::Rational, 1, 0);
        assert!(j.saturate(&x, 1000).unwrap().is_unit().unwrap());
        let (k, n) = ideal(CoeffRing::Rational, &["x", "y"], &["x"]);
        let y = Polynomial::var(CoeffRing::Rational, 2, 1);
        assert_eq!(rendered(&k.saturate(&y, 1000).unwrap(), &n), vec!["x"]);
    }

    #[test]
    fn intersection_and_division() {
        let (i, n) = ideal(CoeffRing::Rational, &["x", "y"], &["x"]);
        let (j, _) = ideal(CoeffRing::Rational, &["x", "y"], &["y"]);
        assert_eq!(rendered(&i.intersect(&j).unwrap(), &n), vec!["x*y"]);
        let p = |s: &str| Polynomial::parse(CoeffRing::Rational, &n, s).unwrap();
        assert_eq!(divide_exact(&p("x^2 - y^2"), &p("x - y")), Some(p("x + y")));
        assert_eq!(divide_exact(&p("x^2 + y"), &p("x")), None);
    }

    #[test]
    fn basis_is_deterministic_and_idempotent() {
        let (i, n) = ideal(
            CoeffRing::Integer,
            &["x", "y"],
            &["4*x^2 + 3*y", "6*x*y - 2", "y^3 + x"],
        );
        let a = rendered(&i, &n);
        let b = rendered(&i.clone().with_budget(DEFAULT_PAIR_BUDGET), &n);
        assert_eq!(a, b);
        let again = Ideal::new(CoeffRing::Integer, 2, i.reduced_generators().unwrap()).unwrap();
        assert_eq!(rendered(&again, &n), a);
    }
}
