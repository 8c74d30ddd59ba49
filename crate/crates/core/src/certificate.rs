//! Tri-state certificates and their independent replay.
//!
//! A certificate carries a list of [`Obligation`]s. Each obligation is a
//! self-contained statement about a ring given in text form, re-checked by
//! [`replay`] through normal forms or evaluation at points, never by search.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{FpAlgebra, Membership, RingMap, SubalgebraOracle};
use crate::coeff::{Coeff, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::expr::{EvalContext, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Proved,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Proved => "proved",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A ring in text form: base coefficient ring, variable names, relations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub base: String,
    pub vars: Vec<String>,
    pub relations: Vec<String>,
}

/// A ring map in text form: images of the source variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MapSpec {
    pub source: RingSpec,
    pub target: RingSpec,
    pub images: Vec<String>,
}

/// One chain step: `generator` with `prime = None` (elementary: b², b³
/// below) or `Some(p)` (p-type: p·b, bᵖ below), and tag expressions of the
/// two powers in terms of the generators below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    pub first: String,
    pub second: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRecord {
    pub element: String,
    pub expression: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obligation {
    /// `expr` is zero in `ring`.
    Zero { ring: RingSpec, expr: String },
    /// `expr` is nonzero in `ring`.
    NonZero { ring: RingSpec, expr: String },
    /// `element` is not nilpotent in `ring`.
    NotNilpotent { ring: RingSpec, element: String },
    /// `element` equals `expression` with each tag `g{i}` replaced by the
    /// i-th entry of `generators`.
    InSubalgebra {
        ring: RingSpec,
        generators: Vec<String>,
        element: String,
        expression: String,
    },
    /// A chain `A ⊆ A[b₁] ⊆ … ⊆ A[b₁,…,bₖ]` of elementary and p-type steps
    /// inside `ring`, starting from the subalgebra generated by `subring`,
    /// and expressions of each of `covers` in the final subalgebra.
    Chain {
        ring: RingSpec,
        subring: Vec<String>,
        steps: Vec<StepRecord>,
        covers: Vec<CoverRecord>,
    },
    /// `element` is not in the subalgebra of `ring` generated by `generators`.
    NotInSubalgebra {
        ring: RingSpec,
        generators: Vec<String>,
        element: String,
    },
    /// Two points of `ring` with values in `field` agree on every expression
    /// of `equal_on` and differ on `differ_on`.
    PointObstruction {
        ring: RingSpec,
        field: String,
        p1: Vec<String>,
        p2: Vec<String>,
        equal_on: Vec<String>,
        differ_on: String,
    },
    /// At a point of `ring` with values in `field`, the values α, β of `a`
    /// and `b` satisfy `α^{pⁿ} ≠ β^{pⁿ}` for every `n`: in 𝔽ₚ this means
    /// α ≠ β; in ℚ it means α ≠ β and, for p = 2, α ≠ -β.
    PowerObstruction {
        ring: RingSpec,
        field: String,
        point: Vec<String>,
        a: String,
        b: String,
        prime: u64,
    },
    /// Two points of `ring` agree on every expression of `equal_on`, while
    /// the values of `a` at them have distinct p-power classes (as in
    /// `PowerObstruction`). Then no `a^{pⁿ}` lies in the subalgebra
    /// generated by `equal_on`.
    ImageObstruction {
        ring: RingSpec,
        field: String,
        p1: Vec<String>,
        p2: Vec<String>,
        equal_on: Vec<String>,
        a: String,
        prime: u64,
    },
    /// For finite rings and maps `f: A → B ← C: g`, the eventual image of
    /// `x ↦ xᵖ` on `A ×_B C` equals the compatible pairs of eventual images.
    FiberPerfectionBijection { f: MapSpec, g: MapSpec, prime: u64 },
    /// `n` is the least exponent with `pᵐ | C(pⁿ, i)` for all `1 ≤ i ≤ r`.
    ExponentBound { p: u64, m: u32, r: u64, n: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub witness: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obligations: Vec<Obligation>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub caps: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Certificate>,
}

impl Certificate {
    pub fn new(claim: impl Into<String>) -> Certificate {
        Certificate {
            claim: claim.into(),
            verdict: Verdict::Inconclusive,
            witness: Value::Null,
            obligations: Vec::new(),
            caps: BTreeMap::new(),
            notes: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::Proved
    }

    pub fn is_refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }

    pub fn with_cap(mut self, name: &str, value: u64) -> Certificate {
        self.caps.insert(name.into(), value);
        self
    }

    /// Number of obligations in this certificate and all parts.
    pub fn obligation_count(&self) -> usize {
        self.obligations.len()
            + self
                .parts
                .iter()
                .map(|p| p.obligation_count())
                .sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayFailure {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ReplayFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ReplayFailure {}

/// Re-checks every obligation of a certificate tree.
pub fn replay(cert: &Certificate) -> std::result::Result<(), ReplayFailure> {
    Replayer::default().replay(cert)
}

#[derive(Default)]
pub struct Replayer {
    rings: HashMap<RingSpec, FpAlgebra>,
}

impl Replayer {
    pub fn replay(&mut self, cert: &Certificate) -> std::result::Result<(), ReplayFailure> {
        self.walk(cert, &cert.claim)
    }

    fn walk(&mut self, cert: &Certificate, path: &str) -> std::result::Result<(), ReplayFailure> {
        if cert.verdict != Verdict::Inconclusive
            && cert.obligation_count() == 0
            && cert.parts.is_empty()
        {
            return Err(ReplayFailure {
                path: path.into(),
                message: format!("{} certificate carries no obligations", cert.verdict),
            });
        }
        for (k, ob) in cert.obligations.iter().enumerate() {
            match self.check(ob) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(ReplayFailure {
                        path: path.into(),
                        message: format!("obligation {k} does not hold: {}", describe(ob)),
                    })
                }
                Err(e) => {
                    return Err(ReplayFailure {
                        path: path.into(),
                        message: format!("obligation {k} could not be checked: {e}"),
                    })
                }
            }
        }
        for part in &cert.parts {
            self.walk(part, &format!("{path} / {}", part.claim))?;
        }
        Ok(())
    }

    fn ring(&mut self, spec: &RingSpec) -> Result<FpAlgebra> {
        if let Some(r) = self.rings.get(spec) {
            return Ok(r.clone());
        }
        let r = FpAlgebra::from_spec(spec)?;
        self.rings.insert(spec.clone(), r.clone());
        Ok(r)
    }

    fn map(&mut self, spec: &MapSpec) -> Result<RingMap> {
        let s = self.ring(&spec.source)?;
        let t = self.ring(&spec.target)?;
        let images: Vec<&str> = spec.images.iter().map(|s| s.as_str()).collect();
        RingMap::parse(&s, &t, &images)
    }

    /// Checks one obligation; `Ok(false)` means it is false.
    pub fn check(&mut self, ob: &Obligation) -> Result<bool> {
        match ob {
            Obligation::Zero { ring, expr } => {
                let r = self.ring(ring)?;
                Ok(r.element(expr)?.is_zero())
            }
            Obligation::NonZero { ring, expr } => {
                let r = self.ring(ring)?;
                Ok(!r.element(expr)?.is_zero())
            }
            Obligation::NotNilpotent { ring, element } => {
                let r = self.ring(ring)?;
                Ok(!r.is_nilpotent(&r.element(element)?)?)
            }
            Obligation::InSubalgebra {
                ring,
                generators,
                element,
                expression,
            } => {
                let r = self.ring(ring)?;
                let gens = generators
                    .iter()
                    .map(|g| r.element(g))
                    .collect::<Result<Vec<_>>>()?;
                tag_identity(&r, &gens, &r.element(element)?, expression)
            }
            Obligation::Chain {
                ring,
                subring,
                steps,
                covers,
            } => {
                let r = self.ring(ring)?;
                let mut gens = subring
                    .iter()
                    .map(|g| r.element(g))
                    .collect::<Result<Vec<_>>>()?;
                for step in steps {
                    let b = r.element(&step.generator)?;
                    let (first, second) = match step.prime {
                        None => (r.pow_u64(&b, 2)?, r.pow_u64(&b, 3)?),
                        Some(p) => (r.mul(&r.from_int(p as i64)?, &b)?, r.pow_u64(&b, p)?),
                    };
                    if !tag_identity(&r, &gens, &first, &step.first)?
                        || !tag_identity(&r, &gens, &second, &step.second)?
                    {
                        return Ok(false);
                    }
                    gens.push(b);
                }
                for c in covers {
                    if !tag_identity(&r, &gens, &r.element(&c.element)?, &c.expression)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Obligation::NotInSubalgebra {
                ring,
                generators,
                element,
            } => {
                let r = self.ring(ring)?;
                let gens = generators
                    .iter()
                    .map(|g| r.element(g))
                    .collect::<Result<Vec<_>>>()?;
                let oracle = SubalgebraOracle::new(&r, &gens)?;
                Ok(oracle.member(&r.element(element)?)? == Membership::NotMember)
            }
            Obligation::PointObstruction {
                ring,
                field,
                p1,
                p2,
                equal_on,
                differ_on,
            } => {
                let r = self.ring(ring)?;
                let field: CoeffRing = field.parse()?;
                let c1 = PointContext::new(&r, field, p1)?;
                let c2 = PointContext::new(&r, field, p2)?;
                if !c1.is_point()? || !c2.is_point()? {
                    return Ok(false);
                }
                for e in equal_on {
                    let e = Expr::parse(e)?;
                    if e.eval(&c1)? != e.eval(&c2)? {
                        return Ok(false);
                    }
                }
                let d = Expr::parse(differ_on)?;
                Ok(d.eval(&c1)? != d.eval(&c2)?)
            }
            Obligation::PowerObstruction {
                ring,
                field,
                point,
                a,
                b,
                prime,
            } => {
                let r = self.ring(ring)?;
                let field: CoeffRing = field.parse()?;
                let c = PointContext::new(&r, field, point)?;
                if !c.is_point()? {
                    return Ok(false);
                }
                let alpha = Expr::parse(a)?.eval(&c)?;
                let beta = Expr::parse(b)?.eval(&c)?;
                Ok(power_classes_differ(field, &alpha, &beta, *prime))
            }
            Obligation::ImageObstruction {
                ring,
                field,
                p1,
                p2,
                equal_on,
                a,
                prime,
            } => {
                let r = self.ring(ring)?;
                let field: CoeffRing = field.parse()?;
                let c1 = PointContext::new(&r, field, p1)?;
                let c2 = PointContext::new(&r, field, p2)?;
                if !c1.is_point()? || !c2.is_point()? {
                    return Ok(false);
                }
                for e in equal_on {
                    let e = Expr::parse(e)?;
                    if e.eval(&c1)? != e.eval(&c2)? {
                        return Ok(false);
                    }
                }
                let a = Expr::parse(a)?;
                Ok(power_classes_differ(
                    field,
                    &a.eval(&c1)?,
                    &a.eval(&c2)?,
                    *prime,
                ))
            }
            Obligation::FiberPerfectionBijection { f, g, prime } => {
                let f = self.map(f)?;
                let g = self.map(g)?;
                let check = crate::perfection::fiber_perfection_sets(&f, &g, *prime, 4096)?;
                Ok(check.is_bijection())
            }
            Obligation::ExponentBound { p, m, r, n } => {
                Ok(crate::perfection::brute_force_exponent_bound(*p, *m, *r, *n + 1) == Some(*n))
            }
        }
    }
}

/// Whether `α^{pⁿ} ≠ β^{pⁿ}` for all `n` in the given field.
pub(crate) fn power_classes_differ(field: CoeffRing, alpha: &Coeff, beta: &Coeff, p: u64) -> bool {
    match field {
        CoeffRing::PrimeField(q) if q == p => alpha != beta,
        CoeffRing::Rational => alpha != beta && (p != 2 || *alpha != -beta.clone()),
        _ => false,
    }
}

fn tag_identity(
    r: &FpAlgebra,
    gens: &[crate::poly::Polynomial],
    element: &crate::poly::Polynomial,
    expression: &str,
) -> Result<bool> {
    let ctx = TagContext {
        alg: r,
        inner: r.context(),
        generators: gens,
    };
    let value = Expr::parse(expression)?.eval(&ctx)?;
    r.equal(&value, element)
}

fn describe(ob: &Obligation) -> String {
    match ob {
        Obligation::Zero { expr, .. } => format!("{expr} = 0"),
        Obligation::NonZero { expr, .. } => format!("{expr} != 0"),
        Obligation::NotNilpotent { element, .. } => format!("{element} not nilpotent"),
        Obligation::InSubalgebra {
            element,
            expression,
            ..
        } => format!("{element} = {expression}"),
        Obligation::Chain { steps, .. } => format!("chain of {} steps", steps.len()),
        Obligation::NotInSubalgebra {
            element,
            generators,
            ..
        } => {
            format!("{element} not in [{}]", generators.join(", "))
        }
        Obligation::PointObstruction { differ_on, .. } => format!("points separate {differ_on}"),
        Obligation::PowerObstruction { a, b, .. } => {
            format!("{a} and {b} have distinct p-power classes")
        }
        Obligation::ImageObstruction { a, .. } => format!("no p-power of {a} in the image"),
        Obligation::FiberPerfectionBijection { .. } => "perfection of the fiber product".into(),
        Obligation::ExponentBound { p, m, r, n } => format!("bound({p}, {m}, {r}) = {n}"),
    }
}

/// Evaluates tag expressions `g0, g1, ...` inside an algebra.
struct TagContext<'a> {
    alg: &'a FpAlgebra,
    inner: crate::algebra::QuotientContext<'a>,
    generators: &'a [crate::poly::Polynomial],
}

impl EvalContext for TagContext<'_> {
    type Value = crate::poly::Polynomial;

    fn var(&self, name: &str) -> Result<Self::Value> {
        name.strip_prefix('g')
            .and_then(|i| i.parse::<usize>().ok())
            .and_then(|i| self.generators.get(i))
            .map(|g| self.alg.reduce(g))
            .unwrap_or_else(|| Err(AlgebraError::Invalid(format!("unknown tag `{name}`"))))
    }
    fn constant(&self, c: &BigRational) -> Result<Self::Value> {
        self.inner.constant(c)
    }
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value> {
        self.inner.add(a, b)
    }
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value> {
        self.inner.sub(a, b)
    }
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value> {
        self.inner.mul(a, b)
    }
    fn neg(&self, a: &Self::Value) -> Result<Self::Value> {
        self.inner.neg(a)
    }
    fn as_constant(&self, a: &Self::Value) -> Option<BigRational> {
        self.inner.as_constant(a)
    }
    fn scale(&self, a: &Self::Value, c: &BigRational) -> Result<Self::Value> {
        self.inner.scale(a, c)
    }
}

/// Evaluates expressions of an algebra at a point with coordinates in a
/// prime field or ℚ.
pub struct PointContext<'a> {
    alg: &'a FpAlgebra,
    field: CoeffRing,
    values: Vec<Coeff>,
}

impl<'a> PointContext<'a> {
    pub fn new(
        alg: &'a FpAlgebra,
        field: CoeffRing,
        values: &[String],
    ) -> Result<PointContext<'a>> {
        if !matches!(field, CoeffRing::Rational | CoeffRing::PrimeField(_)) {
            return Err(AlgebraError::Invalid(format!(
                "points must have values in a field, not {field}"
            )));
        }
        if !field.can_coerce_from(&alg.base()) {
            return Err(AlgebraError::ModeMismatch {
                left: alg.base(),
                right: field,
            });
        }
        if values.len() != alg.nvars() {
            return Err(AlgebraError::VariableMismatch(values.len(), alg.nvars()));
        }
        let num = crate::expr::NumericContext {
            names: &[],
            values: &[],
        };
        let values = values
            .iter()
            .map(|v| field.normalize(Expr::parse(v)?.eval(&num)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(PointContext { alg, field, values })
    }

    pub fn from_values(
        alg: &'a FpAlgebra,
        field: CoeffRing,
        values: Vec<Coeff>,
    ) -> PointContext<'a> {
        PointContext { alg, field, values }
    }

    /// Whether every relation vanishes at the point.
    pub fn is_point(&self) -> Result<bool> {
        for r in self.alg.relations().generators() {
            if !self.eval_poly(r)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eval_poly(&self, f: &crate::poly::Polynomial) -> Result<Coeff> {
        let mut total = Coeff::zero();
        for (m, c) in f.terms() {
            let mut t = self.field.coerce_from(&self.alg.base(), c)?;
            for (x, &e) in self.values.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t = self.field.mul(&t, x);
                }
            }
            total = self.field.add(&total, &t);
        }
        Ok(total)
    }
}

impl EvalContext for PointContext<'_> {
    type Value = Coeff;

    fn var(&self, name: &str) -> Result<Coeff> {
        let i = self
            .alg
            .vars()
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| AlgebraError::Invalid(format!("unknown variable `{name}`")))?;
        Ok(self.values[i].clone())
    }
    fn constant(&self, c: &BigRational) -> Result<Coeff> {
        self.field.normalize(self.alg.base().normalize(c.clone())?)
    }
    fn add(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(self.field.add(a, b))
    }
    fn sub(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(self.field.sub(a, b))
    }
    fn mul(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(self.field.mul(a, b))
    }
    fn neg(&self, a: &Coeff) -> Result<Coeff> {
        Ok(self.field.neg(a))
    }
    fn as_constant(&self, a: &Coeff) -> Option<BigRational> {
        Some(a.clone())
    }
    fn scale(&self, a: &Coeff, c: &BigRational) -> Result<Coeff> {
        let c = self.field.normalize(c.clone())?;
        Ok(self.field.mul(a, &c))
    }
    fn pow(&self, a: &Coeff, e: &BigUint) -> Result<Coeff> {
        let mut result = self.field.from_int(1);
        let mut base = a.clone();
        let mut e = e.clone();
        while !e.is_zero() {
            if e.bit(0) {
                result = self.field.mul(&result, &base);
            }
            base = self.field.mul(&base, &base);
            e >>= 1;
        }
        Ok(result)
    }
}
