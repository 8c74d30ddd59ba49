//! Finitely presented algebras, ring maps, kernels and subalgebra membership.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::certificate::{Certificate, MapSpec, Obligation, RingSpec, Verdict};
use crate::coeff::{Coeff, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::expr::{EvalContext, Expr};
use crate::groebner::{GroebnerBasis, Ideal, DEFAULT_PAIR_BUDGET};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::Polynomial;

/// `base[vars] / relations`.
#[derive(Clone, Debug)]
pub struct FpAlgebra {
    base: CoeffRing,
    vars: Vec<String>,
    relations: Arc<Ideal>,
}

impl PartialEq for FpAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.vars == other.vars
            && self.relations.generators() == other.relations.generators()
    }
}

impl FpAlgebra {
    pub fn new(
        base: CoeffRing,
        vars: Vec<String>,
        relations: Vec<Polynomial>,
    ) -> Result<FpAlgebra> {
        let mut seen = vars.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != vars.len() {
            return Err(AlgebraError::Invalid("duplicate variable names".into()));
        }
        let ideal = Ideal::new(base, vars.len(), relations)?;
        Ok(FpAlgebra {
            base,
            vars,
            relations: Arc::new(ideal),
        })
    }

    pub fn polynomial_ring(base: CoeffRing, vars: &[&str]) -> FpAlgebra {
        FpAlgebra::new(base, vars.iter().map(|s| s.to_string()).collect(), vec![]).unwrap()
    }

    /// Builds from text: `FpAlgebra::parse(ZZ, &["x"], &["x^2", "2*x"])`.
    pub fn parse(base: CoeffRing, vars: &[&str], relations: &[&str]) -> Result<FpAlgebra> {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let rels = relations
            .iter()
            .map(|r| Polynomial::parse(base, &names, r))
            .collect::<Result<Vec<_>>>()?;
        FpAlgebra::new(base, names, rels)
    }

    pub fn from_spec(spec: &RingSpec) -> Result<FpAlgebra> {
        let base: CoeffRing = spec.base.parse()?;
        let vars: Vec<&str> = spec.vars.iter().map(|s| s.as_str()).collect();
        let rels: Vec<&str> = spec.relations.iter().map(|s| s.as_str()).collect();
        FpAlgebra::parse(base, &vars, &rels)
    }

    pub fn spec(&self) -> RingSpec {
        RingSpec {
            base: self.base.to_string(),
            vars: self.vars.clone(),
            relations: self
                .relations
                .generators()
                .iter()
                .map(|r| r.render(&self.vars))
                .collect(),
        }
    }

    pub fn with_budget(&self, budget: usize) -> FpAlgebra {
        let ideal = (*self.relations).clone().with_budget(budget);
        FpAlgebra {
            base: self.base,
            vars: self.vars.clone(),
            relations: Arc::new(ideal),
        }
    }

    pub fn base(&self) -> CoeffRing {
        self.base
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn relations(&self) -> &Ideal {
        &self.relations
    }

    pub fn basis(&self) -> Result<&GroebnerBasis> {
        self.relations.groebner_basis()
    }

    pub fn var(&self, name: &str) -> Result<Polynomial> {
        let i = self
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| AlgebraError::Invalid(format!("unknown variable `{name}`")))?;
        Ok(Polynomial::var(self.base, self.nvars(), i))
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.base, self.nvars())
    }

    pub fn one(&self) -> Result<Polynomial> {
        self.reduce(&Polynomial::one(self.base, self.nvars()))
    }

    pub fn from_int(&self, n: i64) -> Result<Polynomial> {
        self.reduce(&Polynomial::from_int(self.base, self.nvars(), n))
    }

    /// Parses an expression and returns its normal form.
    pub fn element(&self, text: &str) -> Result<Polynomial> {
        Expr::parse(text)?.eval(&self.context())
    }

    pub fn context(&self) -> QuotientContext<'_> {
        QuotientContext { alg: self }
    }

    pub fn reduce(&self, f: &Polynomial) -> Result<Polynomial> {
        self.relations.normal_form(f)
    }

    pub fn is_zero(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn equal(&self, a: &Polynomial, b: &Polynomial) -> Result<bool> {
        self.is_zero(&a.checked_sub(b)?)
    }

    pub fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.reduce(&a.checked_add(b)?)
    }

    pub fn sub(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.reduce(&a.checked_sub(b)?)
    }

    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.reduce(&a.checked_mul(b)?)
    }

    /// `aᵉ` by square-and-multiply with reduction after every step, so huge
    /// exponents stay cheap in rings with small normal forms.
    pub fn pow(&self, a: &Polynomial, e: &BigUint) -> Result<Polynomial> {
        self.context().pow(a, e)
    }

    pub fn pow_u64(&self, a: &Polynomial, e: u64) -> Result<Polynomial> {
        self.pow(a, &BigUint::from(e))
    }

    pub fn render(&self, f: &Polynomial) -> String {
        f.render(&self.vars)
    }

    pub fn is_zero_ring(&self) -> Result<bool> {
        self.relations.is_unit()
    }

    /// Smallest `m ≤ cap` with `pᵐ = 0` in the algebra.
    pub fn torsion_exponent(&self, p: u64, cap: u32) -> Result<Option<u32>> {
        let pp = Polynomial::from_int(self.base, self.nvars(), p as i64);
        let mut acc = Polynomial::one(self.base, self.nvars());
        for m in 1..=cap {
            acc = self.mul(&acc, &pp)?;
            if acc.is_zero() {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    /// Same presentation over ℚ.
    pub fn base_change_to_q(&self) -> Result<FpAlgebra> {
        match self.base {
            CoeffRing::Integer | CoeffRing::IntegerLocalizedAt(_) => {}
            other => {
                return Err(AlgebraError::Unsupported(format!(
                    "base change to QQ is only defined from ZZ or ZZ_(p), not {other}"
                )))
            }
        }
        let rels = self
            .relations
            .generators()
            .iter()
            .map(|r| r.change_ring(CoeffRing::Rational))
            .collect::<Result<Vec<_>>>()?;
        FpAlgebra::new(CoeffRing::Rational, self.vars.clone(), rels)
    }

    /// Presentation of `A ⊗ ℤ₍ₚ₎` from an algebra over ℤ or ℤ₍ₚ₎.
    pub fn localize_at(&self, p: u64) -> Result<FpAlgebra> {
        match self.base {
            CoeffRing::Integer => {}
            CoeffRing::IntegerLocalizedAt(q) if q == p => return Ok(self.clone()),
            other => {
                return Err(AlgebraError::Unsupported(format!(
                    "localization at {p} is only defined from ZZ or ZZ_({p}), not {other}"
                )))
            }
        }
        let target = CoeffRing::IntegerLocalizedAt(p);
        if !crate::coeff::is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let rels = self
            .relations
            .generators()
            .iter()
            .map(|r| r.change_ring(target))
            .collect::<Result<Vec<_>>>()?;
        FpAlgebra::new(target, self.vars.clone(), rels)
    }

    /// Presentation of `A / pᵐ` over ℤ/pᵐ.
    pub fn reduce_mod(&self, p: u64, m: u32) -> Result<FpAlgebra> {
        match self.base {
            CoeffRing::Integer => {}
            CoeffRing::IntegerLocalizedAt(q) if q == p => {}
            other => {
                return Err(AlgebraError::Unsupported(format!(
                    "reduction mod {p}^{m} is only defined from ZZ or ZZ_({p}), not {other}"
                )))
            }
        }
        let target = CoeffRing::mod_prime_power(p, m)?;
        let rels = self
            .relations
            .generators()
            .iter()
            .map(|r| r.change_ring(target))
            .collect::<Result<Vec<_>>>()?;
        FpAlgebra::new(target, self.vars.clone(), rels)
    }

    /// Moves an element of another algebra with the same variable names into
    /// this one along the coefficient map.
    pub fn import(&self, f: &Polynomial) -> Result<Polynomial> {
        self.reduce(&f.change_ring(self.base)?)
    }

    /// Whether `f` is nilpotent, decided by `1 ∈ I + (1 - z·f)`.
    pub fn is_nilpotent(&self, f: &Polynomial) -> Result<bool> {
        let n = self.nvars();
        let lift: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Polynomial> = self
            .relations
            .generators()
            .iter()
            .map(|g| g.remap_vars(n + 1, &lift))
            .collect();
        let z = Polynomial::var(self.base, n + 1, n);
        gens.push(&Polynomial::one(self.base, n + 1) - &(&z * &f.remap_vars(n + 1, &lift)));
        Ideal::new(self.base, n + 1, gens)?.is_unit()
    }

    /// Least `r` with `f^{r+1} = 0`, searched up to `cap`, with a
    /// non-nilpotence proof when it does not exist.
    pub fn nilpotency_index(&self, f: &Polynomial, cap: u32) -> Result<Certificate> {
        let f = self.reduce(f)?;
        let rendered = self.render(&f);
        let mut cert = Certificate::new(format!("nilpotency index of {rendered}"));
        cert.caps.insert("exponent_cap".into(), cap as u64);
        let mut acc = f.clone();
        for e in 1..=cap {
            if acc.is_zero() {
                cert.verdict = Verdict::Proved;
                cert.witness = json!({ "index": e - 1 });
                cert.obligations.push(Obligation::Zero {
                    ring: self.spec(),
                    expr: format!("({rendered})^{e}"),
                });
                return Ok(cert);
            }
            acc = self.mul(&acc, &f)?;
        }
        match self.is_nilpotent(&f) {
            Ok(false) => {
                cert.verdict = Verdict::Refuted;
                cert.obligations.push(Obligation::NotNilpotent {
                    ring: self.spec(),
                    element: rendered,
                });
            }
            Ok(true) => cert
                .notes
                .push(format!("nilpotent, but index exceeds {cap}")),
            Err(AlgebraError::CapExceeded(m)) => cert.notes.push(m),
            Err(e) => return Err(e),
        }
        Ok(cert)
    }

    /// Monomials outside the leading ideal, a vector-space basis of the
    /// algebra over a field base; `None` if there are more than `limit`.
    pub fn standard_monomials(&self, limit: usize) -> Result<Option<Vec<Monomial>>> {
        if !self.base.is_field() {
            return Err(AlgebraError::Unsupported(
                "standard monomials need a field base".into(),
            ));
        }
        let basis = self.basis()?;
        if basis.is_unit_ideal() {
            return Ok(Some(Vec::new()));
        }
        let leads = basis.leading_monomials();
        let n = self.nvars();
        let mut frontier = vec![Monomial::one(n)];
        let mut found: BTreeSet<Monomial> = BTreeSet::new();
        while let Some(m) = frontier.pop() {
            if found.contains(&m) || leads.iter().any(|l| l.divides(&m)) {
                continue;
            }
            found.insert(m.clone());
            if found.len() > limit {
                return Ok(None);
            }
            for i in 0..n {
                frontier.push(m.mul(&Monomial::var(n, i)));
            }
        }
        let mut out: Vec<Monomial> = found.into_iter().collect();
        out.sort_by(|a, b| basis.order().cmp(a, b));
        Ok(Some(out))
    }

    /// All elements of a finite algebra as normal forms, or `None` when the
    /// algebra is infinite or has more than `limit` elements.
    pub fn elements(&self, limit: usize) -> Result<Option<Vec<Polynomial>>> {
        let Some(modulus) = self.base.modulus() else {
            return Ok(None);
        };
        let basis = self.basis()?;
        let gb = basis.polynomials_with_modulus();
        let n = self.nvars();
        let order = basis.order();
        let bound = |m: &Monomial| -> BigInt {
            let mut best = modulus.clone();
            for (lm, lc) in &gb {
                if lm.divides(m) && *lc < best {
                    best = lc.clone();
                }
            }
            best
        };
        let mut frontier = vec![Monomial::one(n)];
        let mut support: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        while let Some(m) = frontier.pop() {
            if support.contains_key(&m) {
                continue;
            }
            let d = bound(&m);
            if d <= BigInt::one() {
                continue;
            }
            support.insert(m.clone(), d);
            if support.len() > limit {
                return Ok(None);
            }
            for i in 0..n {
                frontier.push(m.mul(&Monomial::var(n, i)));
            }
        }
        let mut total = BigInt::one();
        for d in support.values() {
            total *= d;
        }
        if total > BigInt::from(limit) {
            return Ok(None);
        }
        let mut mons: Vec<(Monomial, u64)> = support
            .into_iter()
            .map(|(m, d)| (m, d.to_u64().unwrap()))
            .collect();
        mons.sort_by(|a, b| order.cmp(&a.0, &b.0));
        let mut out = vec![BTreeMap::new()];
        for (m, d) in &mons {
            let mut next = Vec::with_capacity(out.len() * *d as usize);
            for t in &out {
                for c in 0..*d {
                    let mut t2: BTreeMap<Monomial, Coeff> = t.clone();
                    if c > 0 {
                        t2.insert(m.clone(), BigRational::from_integer(c.into()));
                    }
                    next.push(t2);
                }
            }
            out = next;
        }
        Ok(Some(
            out.into_iter()
                .map(|t| Polynomial::from_canonical(self.base, n, t))
                .collect(),
        ))
    }
}

/// Evaluates expressions inside an algebra, reducing after every operation.
pub struct QuotientContext<'a> {
    alg: &'a FpAlgebra,
}

impl EvalContext for QuotientContext<'_> {
    type Value = Polynomial;

    fn var(&self, name: &str) -> Result<Polynomial> {
        self.alg.reduce(&self.alg.var(name)?)
    }
    fn constant(&self, c: &BigRational) -> Result<Polynomial> {
        self.alg.reduce(&Polynomial::constant(
            self.alg.base,
            self.alg.nvars(),
            c.clone(),
        )?)
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.alg.add(a, b)
    }
    fn sub(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.alg.sub(a, b)
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        self.alg.mul(a, b)
    }
    fn neg(&self, a: &Polynomial) -> Result<Polynomial> {
        self.alg.reduce(&a.neg())
    }
    fn as_constant(&self, a: &Polynomial) -> Option<BigRational> {
        a.is_constant().then(|| a.constant_term())
    }
    fn scale(&self, a: &Polynomial, c: &BigRational) -> Result<Polynomial> {
        self.alg.reduce(&a.scale(c)?)
    }
}

/// A homomorphism `source → target` given by the images of the source
/// variables.
#[derive(Clone, Debug)]
pub struct RingMap {
    source: FpAlgebra,
    target: FpAlgebra,
    images: Vec<Polynomial>,
}

impl RingMap {
    /// Checks that every source relation maps to zero.
    pub fn new(source: FpAlgebra, target: FpAlgebra, images: Vec<Polynomial>) -> Result<RingMap> {
        if images.len() != source.nvars() {
            return Err(AlgebraError::VariableMismatch(images.len(), source.nvars()));
        }
        if !target.base().can_coerce_from(&source.base()) {
            return Err(AlgebraError::ModeMismatch {
                left: source.base(),
                right: target.base(),
            });
        }
        let images = images
            .iter()
            .map(|i| target.reduce(i))
            .collect::<Result<Vec<_>>>()?;
        let map = RingMap {
            source,
            target,
            images,
        };
        for r in map.source.relations().generators() {
            let img = map.apply_poly(r)?;
            if !img.is_zero() {
                return Err(AlgebraError::NotWellDefined(format!(
                    "relation {} maps to {}",
                    map.source.render(r),
                    map.target.render(&img)
                )));
            }
        }
        Ok(map)
    }

    pub fn parse(source: &FpAlgebra, target: &FpAlgebra, images: &[&str]) -> Result<RingMap> {
        let imgs = images
            .iter()
            .map(|s| target.element(s))
            .collect::<Result<Vec<_>>>()?;
        RingMap::new(source.clone(), target.clone(), imgs)
    }

    pub fn spec(&self) -> MapSpec {
        MapSpec {
            source: self.source.spec(),
            target: self.target.spec(),
            images: self.images.iter().map(|i| self.target.render(i)).collect(),
        }
    }

    /// Text of `f(b)` as an expression in the target's variables.
    pub fn expand(&self, b: &Polynomial) -> String {
        let names: Vec<String> = self
            .images
            .iter()
            .map(|i| format!("({})", self.target.render(i)))
            .collect();
        b.render(&names)
    }

    pub fn identity(a: &FpAlgebra) -> RingMap {
        let images = (0..a.nvars())
            .map(|i| Polynomial::var(a.base(), a.nvars(), i))
            .collect();
        RingMap {
            source: a.clone(),
            target: a.clone(),
            images,
        }
    }

    pub fn source(&self) -> &FpAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FpAlgebra {
        &self.target
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    fn apply_poly(&self, f: &Polynomial) -> Result<Polynomial> {
        if self.images.is_empty() {
            let c = self
                .target
                .base()
                .coerce_from(&f.ring(), &f.constant_term())?;
            return self.target.reduce(&Polynomial::constant(
                self.target.base(),
                self.target.nvars(),
                c,
            )?);
        }
        let mut acc = self.target.zero();
        for (m, c) in f.sorted_terms(MonomialOrder::GrevLex) {
            let c = self.target.base().coerce_from(&f.ring(), c)?;
            let mut t = Polynomial::constant(self.target.base(), self.target.nvars(), c)?;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = self
                        .target
                        .mul(&t, &self.target.pow_u64(&self.images[i], e as u64)?)?;
                }
            }
            acc = acc.checked_add(&t)?;
        }
        self.target.reduce(&acc)
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        self.apply_poly(f)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RingMap) -> Result<RingMap> {
        if self.target != other.source {
            return Err(AlgebraError::Invalid("maps do not compose".into()));
        }
        let images = self
            .images
            .iter()
            .map(|i| other.apply(i))
            .collect::<Result<Vec<_>>>()?;
        RingMap::new(self.source.clone(), other.target.clone(), images)
    }

    /// Kernel ideal in the source polynomial ring, via tag elimination.
    pub fn kernel(&self) -> Result<Ideal> {
        let base = self.target.base();
        if self.source.base() != base {
            return Err(AlgebraError::Unsupported(
                "kernel across different bases".into(),
            ));
        }
        let n = self.target.nvars();
        let k = self.source.nvars();
        let lift: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Polynomial> = self
            .target
            .relations()
            .generators()
            .iter()
            .map(|g| g.remap_vars(n + k, &lift))
            .collect();
        for (i, img) in self.images.iter().enumerate() {
            let tag = Polynomial::var(base, n + k, n + i);
            gens.push(&tag - &img.remap_vars(n + k, &lift));
        }
        let big = Ideal::new(base, n + k, gens)?;
        let keep: Vec<bool> = (0..n + k).map(|i| i >= n).collect();
        let e = big.eliminate(&keep)?;
        let to_old: Vec<usize> = (0..n + k).map(|i| i.saturating_sub(n)).collect();
        let gens = e
            .reduced_generators()?
            .into_iter()
            .map(|g| g.remap_vars(k, &to_old))
            .collect();
        Ideal::new(base, k, gens)
    }

    /// The same map with both sides base changed to ℚ.
    pub fn base_change_to_q(&self) -> Result<RingMap> {
        let s = self.source.base_change_to_q()?;
        let t = self.target.base_change_to_q()?;
        let images = self
            .images
            .iter()
            .map(|i| i.change_ring(CoeffRing::Rational))
            .collect::<Result<Vec<_>>>()?;
        RingMap::new(s, t, images)
    }
}

/// Outcome of a subalgebra membership test.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// `element = expression(generators)`; the expression is a polynomial in
    /// the tag variables `g0, g1, ...`.
    Member(Polynomial),
    NotMember,
}

/// Decides membership in the subalgebra of an algebra generated by a list of
/// elements. The tag-variable Gröbner basis is computed once and reused.
#[derive(Clone, Debug)]
pub struct SubalgebraOracle {
    ambient: FpAlgebra,
    generators: Vec<Polynomial>,
    ideal: Arc<Ideal>,
}

impl SubalgebraOracle {
    pub fn new(ambient: &FpAlgebra, generators: &[Polynomial]) -> Result<SubalgebraOracle> {
        SubalgebraOracle::with_budget(ambient, generators, DEFAULT_PAIR_BUDGET)
    }

    pub fn with_budget(
        ambient: &FpAlgebra,
        generators: &[Polynomial],
        budget: usize,
    ) -> Result<SubalgebraOracle> {
        let base = ambient.base();
        let n = ambient.nvars();
        let k = generators.len();
        let lift: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Polynomial> = ambient
            .relations()
            .generators()
            .iter()
            .map(|g| g.remap_vars(n + k, &lift))
            .collect();
        for (i, g) in generators.iter().enumerate() {
            let tag = Polynomial::var(base, n + k, n + i);
            gens.push(&tag - &g.remap_vars(n + k, &lift));
        }
        let ideal =
            Ideal::with_order(base, n + k, gens, MonomialOrder::Block(n))?.with_budget(budget);
        Ok(SubalgebraOracle {
            ambient: ambient.clone(),
            generators: generators.to_vec(),
            ideal: Arc::new(ideal),
        })
    }

    pub fn ambient(&self) -> &FpAlgebra {
        &self.ambient
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn member(&self, b: &Polynomial) -> Result<Membership> {
        let n = self.ambient.nvars();
        let k = self.generators.len();
        let lift: Vec<usize> = (0..n).collect();
        let nf = self.ideal.normal_form(&b.remap_vars(n + k, &lift))?;
        let allowed: Vec<bool> = (0..n + k).map(|i| i >= n).collect();
        if !nf.involves_only(&allowed) {
            return Ok(Membership::NotMember);
        }
        let to_tags: Vec<usize> = (0..n + k).map(|i| i.saturating_sub(n)).collect();
        Ok(Membership::Member(nf.remap_vars(k, &to_tags)))
    }

    /// Terms of the tag normal form that involve ambient variables. Linear in
    /// `b` over a field base, and zero exactly for members.
    pub fn residual(&self, b: &Polynomial) -> Result<Polynomial> {
        let n = self.ambient.nvars();
        let k = self.generators.len();
        let lift: Vec<usize> = (0..n).collect();
        let nf = self.ideal.normal_form(&b.remap_vars(n + k, &lift))?;
        let terms = nf
            .terms()
            .filter(|(m, _)| m.exponents()[..n].iter().any(|&e| e > 0));
        Polynomial::from_terms(nf.ring(), n + k, terms.map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Renders a tag expression with each tag replaced by its generator, as
    /// text that parses in the ambient algebra.
    pub fn expand_expression(&self, expr: &Polynomial) -> String {
        let names: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("({})", self.ambient.render(g)))
            .collect();
        expr.render(&names)
    }

    /// Membership certificate with a replayable identity or refutation.
    pub fn certify(&self, b: &Polynomial) -> Result<Certificate> {
        let rendered = self.ambient.render(b);
        let gen_text: Vec<String> = self
            .generators
            .iter()
            .map(|g| self.ambient.render(g))
            .collect();
        let mut cert = Certificate::new(format!(
            "{rendered} in subalgebra [{}]",
            gen_text.join(", ")
        ));
        match self.member(b) {
            Ok(Membership::Member(expr)) => {
                let expansion = self.expand_expression(&expr);
                let tags: Vec<String> = (0..self.generators.len())
                    .map(|i| format!("g{i}"))
                    .collect();
                cert.verdict = Verdict::Proved;
                cert.witness = json!({ "expression": expr.render(&tags), "expansion": expansion });
                cert.obligations.push(Obligation::InSubalgebra {
                    ring: self.ambient.spec(),
                    generators: gen_text,
                    element: rendered,
                    expression: expr.render(&tags),
                });
            }
            Ok(Membership::NotMember) => {
                cert.verdict = Verdict::Refuted;
                cert.obligations.push(Obligation::NotInSubalgebra {
                    ring: self.ambient.spec(),
                    generators: gen_text,
                    element: rendered,
                });
            }
            Err(AlgebraError::CapExceeded(m)) => cert.notes.push(m),
            Err(e) => return Err(e),
        }
        Ok(cert)
    }
}

/// One-shot subalgebra membership certificate.
pub fn subalgebra_member(
    ambient: &FpAlgebra,
    gens: &[Polynomial],
    b: &Polynomial,
) -> Result<Certificate> {
    SubalgebraOracle::new(ambient, gens)?.certify(b)
}

impl GroebnerBasis {
    /// Leading monomials and integer leading coefficients of the basis over
    /// ℤ, including the modulus element for ℤ/pᵐ.
    pub(crate) fn polynomials_with_modulus(&self) -> Vec<(Monomial, BigInt)> {
        self.leading_terms()
            .into_iter()
            .map(|(m, c)| {
                (
                    m,
                    if c.is_integer() {
                        c.to_integer()
                    } else {
                        BigInt::zero()
                    },
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qxy() -> FpAlgebra {
        FpAlgebra::polynomial_ring(CoeffRing::Rational, &["x", "y"])
    }

    #[test]
    fn base_change_collapses_torsion() {
        let a = FpAlgebra::parse(CoeffRing::Integer, &["x"], &["x^2", "2*x"]).unwrap();
        let q = a.base_change_to_q().unwrap();
        assert!(q.is_zero(&q.element("x").unwrap()).unwrap());
        assert!(!q.is_zero_ring().unwrap());
        let z4 = FpAlgebra::parse(CoeffRing::Integer, &[], &["4"]).unwrap();
        assert!(z4.base_change_to_q().unwrap().is_zero_ring().unwrap());
        let zxy = FpAlgebra::polynomial_ring(CoeffRing::Integer, &["x", "y"]);
        assert_eq!(zxy.base_change_to_q().unwrap(), qxy());
    }

    #[test]
    fn reduction_mod_p() {
        let zx = FpAlgebra::polynomial_ring(CoeffRing::Integer, &["x"]);
        assert_eq!(
            zx.reduce_mod(2, 1).unwrap().base(),
            CoeffRing::PrimeField(2)
        );
        let a = FpAlgebra::parse(CoeffRing::Integer, &["x"], &["x^2 - 2", "2*x"]).unwrap();
        let a2 = a.reduce_mod(2, 1).unwrap();
        let gens: Vec<String> = a2
            .relations()
            .reduced_generators()
            .unwrap()
            .iter()
            .map(|g| a2.render(g))
            .collect();
        assert_eq!(gens, vec!["x^2"]);
        assert!(FpAlgebra::polynomial_ring(CoeffRing::Rational, &["x"])
            .reduce_mod(2, 1)
            .is_err());
    }

    #[test]
    fn mode_lattice_is_enforced() {
        let zx = FpAlgebra::polynomial_ring(CoeffRing::Integer, &["x"]);
        assert!(zx.base_change_to_q().unwrap().reduce_mod(2, 1).is_err());
        assert!(zx.reduce_mod(2, 2).unwrap().base_change_to_q().is_err());
    }

    #[test]
    fn kernels() {
        let t = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t"]);
        let f = RingMap::parse(&qxy(), &t, &["t^2", "t^3"]).unwrap();
        let k = f.kernel().unwrap();
        let names = qxy().vars().to_vec();
        let g: Vec<String> = k
            .reduced_generators()
            .unwrap()
            .iter()
            .map(|p| p.render(&names))
            .collect();
        assert_eq!(g, vec!["x^3 - y^2"]);
        for r in k.reduced_generators().unwrap() {
            assert!(f.apply(&r).unwrap().is_zero());
        }
        assert!(RingMap::identity(&qxy())
            .kernel()
            .unwrap()
            .reduced_generators()
            .unwrap()
            .is_empty());
        let qx = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["x"]);
        let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &[]);
        let ev = RingMap::parse(&qx, &q, &["0"]).unwrap();
        let g: Vec<String> = ev
            .kernel()
            .unwrap()
            .reduced_generators()
            .unwrap()
            .iter()
            .map(|p| p.render(qx.vars()))
            .collect();
        assert_eq!(g, vec!["x"]);
    }

    #[test]
    fn ill_defined_maps_are_rejected() {
        let a = FpAlgebra::parse(CoeffRing::Rational, &["x"], &["x^2"]).unwrap();
        let t = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t"]);
        assert!(matches!(
            RingMap::parse(&a, &t, &["t"]),
            Err(AlgebraError::NotWellDefined(_))
        ));
        assert!(RingMap::parse(&a, &a, &["0"]).is_ok());
    }

    #[test]
    fn composition() {
        let t = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t"]);
        let s = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["s"]);
        let f = RingMap::parse(&qxy(), &t, &["t^2", "t^3"]).unwrap();
        let g = RingMap::parse(&t, &s, &["s + 1"]).unwrap();
        let h = f.then(&g).unwrap();
        assert_eq!(h.images()[0], s.element("(s + 1)^2").unwrap());
    }

    #[test]
    fn subalgebra_membership() {
        let b = qxy();
        let gens: Vec<Polynomial> = ["x^2", "x^3", "x + 2*y"]
            .iter()
            .map(|s| b.element(s).unwrap())
            .collect();
        let o = SubalgebraOracle::new(&b, &gens).unwrap();
        assert!(matches!(
            o.member(&b.element("x + 2*y").unwrap()).unwrap(),
            Membership::Member(_)
        ));
        assert_eq!(
            o.member(&b.element("x").unwrap()).unwrap(),
            Membership::NotMember
        );
        assert_eq!(
            o.member(&b.element("y").unwrap()).unwrap(),
            Membership::NotMember
        );
        let c = o.certify(&b.element("x*y + y^2").unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::Proved);
        crate::certificate::replay(&c).unwrap();
    }

    #[test]
    fn subalgebra_membership_over_integers() {
        let b = FpAlgebra::polynomial_ring(CoeffRing::Integer, &["t"]);
        let gens = vec![b.element("2*t").unwrap(), b.element("t^2").unwrap()];
        let o = SubalgebraOracle::new(&b, &gens).unwrap();
        assert_eq!(
            o.member(&b.element("t").unwrap()).unwrap(),
            Membership::NotMember
        );
        assert!(matches!(
            o.member(&b.element("4*t^3 + t^2").unwrap()).unwrap(),
            Membership::Member(_)
        ));
        assert_eq!(
            o.member(&b.element("t^3").unwrap()).unwrap(),
            Membership::NotMember
        );
    }

    #[test]
    fn nilpotency() {
        let z4 = CoeffRing::mod_prime_power(2, 2).unwrap();
        let a = FpAlgebra::parse(z4, &["x"], &["x^2", "2*x"]).unwrap();
        let c = a.nilpotency_index(&a.element("x").unwrap(), 8).unwrap();
        assert_eq!(c.verdict, Verdict::Proved);
        assert_eq!(c.witness["index"], 1);
        let z8 = FpAlgebra::polynomial_ring(CoeffRing::mod_prime_power(2, 3).unwrap(), &[]);
        let c = z8.nilpotency_index(&z8.from_int(2).unwrap(), 8).unwrap();
        assert_eq!(c.witness["index"], 2);
        let q = FpAlgebra::parse(CoeffRing::Rational, &["x", "y"], &["y"]).unwrap();
        let c = q.nilpotency_index(&q.element("x").unwrap(), 8).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        crate::certificate::replay(&c).unwrap();
    }

    #[test]
    fn finite_enumeration() {
        let z4 = CoeffRing::mod_prime_power(2, 2).unwrap();
        let a = FpAlgebra::parse(z4, &["x"], &["x^2", "2*x"]).unwrap();
        assert_eq!(a.elements(100).unwrap().unwrap().len(), 8);
        let f2 = FpAlgebra::parse(CoeffRing::PrimeField(2), &["x"], &["x^2"]).unwrap();
        assert_eq!(f2.elements(100).unwrap().unwrap().len(), 4);
        let f2x = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &["x"]);
        assert!(f2x.elements(100).unwrap().is_none());
        let z4only = FpAlgebra::polynomial_ring(z4, &[]);
        assert_eq!(z4only.elements(100).unwrap().unwrap().len(), 4);
    }
}
