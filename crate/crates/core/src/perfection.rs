//! The multiplicative perfection `colim(x ↦ xᵖ)`: equality of classes,
//! exponent bounds, and witnesses for surjectivity and injectivity of the
//! induced map on perfections.

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde_json::json;

use crate::algebra::{FpAlgebra, Membership, RingMap, SubalgebraOracle};
use crate::certificate::{power_classes_differ, Certificate, Obligation, PointContext, Verdict};
use crate::coeff::{is_prime, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::points::{self, DEFAULT_POINT_LIMIT, DEFAULT_RADIUS};
use crate::poly::Polynomial;

pub const DEFAULT_EXPONENT_CAP: u32 = 32;

/// Least `n` with `pᵐ | C(pⁿ, i)` for every `1 ≤ i ≤ r`.
///
/// Kummer gives `v_p(C(pⁿ, i)) = n - v_p(i)` for `i ≤ pⁿ`, and `i = pᴸ` with
/// `L = ⌊log_p r⌋` is the worst case, so `n = m + L`.
pub fn perf_exponent_bound(p: u64, m: u32, r: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if m == 0 || r == 0 {
        return Err(AlgebraError::Invalid("m and r must be at least 1".into()));
    }
    let mut l = 0;
    let mut pw = p;
    while pw <= r {
        l += 1;
        pw = pw.saturating_mul(p);
    }
    Ok(m + l)
}

/// Direct search over `n ≤ n_max` using exact binomial coefficients.
pub fn brute_force_exponent_bound(p: u64, m: u32, r: u64, n_max: u32) -> Option<u32> {
    let pm = num_traits::pow(BigInt::from(p), m as usize);
    (0..=n_max).find(|&n| {
        let big_n = num_traits::pow(BigInt::from(p), n as usize);
        let mut c = BigInt::one();
        for i in 1..=r {
            let i_big = BigInt::from(i);
            c = c * (&big_n - &i_big + 1) / &i_big;
            if !(&c % &pm).is_zero() {
                return false;
            }
        }
        true
    })
}

pub fn exponent_bound_certificate(p: u64, m: u32, r: u64) -> Result<Certificate> {
    let n = perf_exponent_bound(p, m, r)?;
    let mut cert = Certificate::new(format!("least n with {p}^{m} | C({p}^n, i) for i <= {r}"));
    cert.verdict = Verdict::Proved;
    cert.witness = json!({ "n": n });
    cert.obligations
        .push(Obligation::ExponentBound { p, m, r, n });
    Ok(cert)
}

/// The prime along which powers are taken.
pub fn distinguished_prime(alg: &FpAlgebra, prime: Option<u64>) -> Result<u64> {
    match (alg.base().prime(), prime) {
        (Some(p), Some(q)) if p != q => Err(AlgebraError::Invalid(format!(
            "base {} carries the prime {p}, not {q}",
            alg.base()
        ))),
        (Some(p), _) | (None, Some(p)) => {
            if is_prime(p) {
                Ok(p)
            } else {
                Err(AlgebraError::NotPrime(p))
            }
        }
        (None, None) => Err(AlgebraError::Invalid(format!(
            "base {} has no distinguished prime",
            alg.base()
        ))),
    }
}

fn p_power(p: u64, n: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), n as usize)
}

/// `A / p` over 𝔽ₚ, when meaningful.
pub fn mod_p(alg: &FpAlgebra, p: u64) -> Result<Option<FpAlgebra>> {
    Ok(match alg.base() {
        CoeffRing::Integer => Some(alg.reduce_mod(p, 1)?),
        CoeffRing::IntegerLocalizedAt(q) if q == p => Some(alg.reduce_mod(p, 1)?),
        CoeffRing::IntegerModPrimePower { p: q, .. } | CoeffRing::PrimeField(q) if q == p => {
            let rels = alg
                .relations()
                .generators()
                .iter()
                .map(|r| r.change_ring(CoeffRing::PrimeField(p)))
                .collect::<Result<Vec<_>>>()?;
            Some(FpAlgebra::new(
                CoeffRing::PrimeField(p),
                alg.vars().to_vec(),
                rels,
            )?)
        }
        _ => None,
    })
}

/// A proof that `aᵖⁿ ≠ bᵖⁿ` for every `n`, if one is found.
///
/// Either `a - b` is not nilpotent in `A/p` (since `aᵖⁿ - bᵖⁿ ≡ (a - b)ᵖⁿ`
/// mod p), or some ℚ-point separates the p-power classes of the values.
pub fn refute_power_equality(
    alg: &FpAlgebra,
    a: &Polynomial,
    b: &Polynomial,
    p: u64,
) -> Result<Option<Obligation>> {
    if let Some(ap) = mod_p(alg, p)? {
        let d = ap.import(&alg.sub(a, b)?)?;
        match ap.is_nilpotent(&d) {
            Ok(false) => {
                return Ok(Some(Obligation::NotNilpotent {
                    ring: ap.spec(),
                    element: ap.render(&d),
                }));
            }
            Ok(true) | Err(AlgebraError::CapExceeded(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if CoeffRing::Rational.can_coerce_from(&alg.base()) {
        let pts = points::points(
            alg,
            CoeffRing::Rational,
            DEFAULT_RADIUS,
            DEFAULT_POINT_LIMIT,
        )?;
        for pt in pts {
            let ctx = PointContext::from_values(alg, CoeffRing::Rational, pt.clone());
            let alpha = ctx.eval_poly(a)?;
            let beta = ctx.eval_poly(b)?;
            if power_classes_differ(CoeffRing::Rational, &alpha, &beta, p) {
                return Ok(Some(Obligation::PowerObstruction {
                    ring: alg.spec(),
                    field: "QQ".into(),
                    point: points::render_point(&pt),
                    a: alg.render(a),
                    b: alg.render(b),
                    prime: p,
                }));
            }
        }
    }
    Ok(None)
}

/// Least `n ≤ cap` with `aᵖⁿ = bᵖⁿ`, or a proof that none exists.
pub fn perf_eq(
    alg: &FpAlgebra,
    a: &Polynomial,
    b: &Polynomial,
    prime: Option<u64>,
    cap: u32,
) -> Result<Certificate> {
    let p = distinguished_prime(alg, prime)?;
    let a = alg.reduce(a)?;
    let b = alg.reduce(b)?;
    let (ra, rb) = (alg.render(&a), alg.render(&b));
    let mut cert = Certificate::new(format!("{ra} ~ {rb} in the {p}-perfection"));
    cert.caps.insert("exponent_cap".into(), cap as u64);
    let mut ap = a.clone();
    let mut bp = b.clone();
    for n in 0..=cap {
        if ap == bp {
            let e = p_power(p, n);
            cert.verdict = Verdict::Proved;
            cert.witness = json!({ "n": n });
            cert.obligations.push(Obligation::Zero {
                ring: alg.spec(),
                expr: format!("({ra})^{e} - ({rb})^{e}"),
            });
            return Ok(cert);
        }
        if n < cap {
            ap = alg.pow_u64(&ap, p)?;
            bp = alg.pow_u64(&bp, p)?;
        }
    }
    if let Some(ob) = refute_power_equality(alg, &a, &b, p)? {
        cert.verdict = Verdict::Refuted;
        cert.obligations.push(ob);
    } else {
        cert.notes
            .push(format!("no exponent up to {cap} and no obstruction found"));
    }
    Ok(cert)
}

fn same_base(pi: &RingMap) -> Result<()> {
    if pi.source().base() != pi.target().base() {
        return Err(AlgebraError::Unsupported(format!(
            "perfection witnesses need a common base, got {} and {}",
            pi.source().base(),
            pi.target().base()
        )));
    }
    Ok(())
}

/// Points of the target agreeing on the image of `pi` at which `a` takes
/// values in distinct p-power classes.
fn image_obstruction(pi: &RingMap, a: &Polynomial, p: u64) -> Result<Option<Obligation>> {
    let alg = pi.target();
    for field in points::point_fields(alg.base(), &[p]) {
        if matches!(field, CoeffRing::PrimeField(q) if q != p) {
            continue;
        }
        let pts = points::points(alg, field, DEFAULT_RADIUS, DEFAULT_POINT_LIMIT)?;
        let mut by_key: HashMap<Vec<String>, Vec<Vec<crate::coeff::Coeff>>> = HashMap::new();
        for pt in pts {
            let ctx = PointContext::from_values(alg, field, pt.clone());
            let key = pi
                .images()
                .iter()
                .map(|g| ctx.eval_poly(g).map(|v| v.to_string()))
                .collect::<Result<Vec<_>>>()?;
            let alpha = ctx.eval_poly(a)?;
            let bucket = by_key.entry(key).or_default();
            for other in bucket.iter() {
                let octx = PointContext::from_values(alg, field, other.clone());
                let beta = octx.eval_poly(a)?;
                if power_classes_differ(field, &alpha, &beta, p) {
                    return Ok(Some(Obligation::ImageObstruction {
                        ring: alg.spec(),
                        field: field.to_string(),
                        p1: points::render_point(other),
                        p2: points::render_point(&pt),
                        equal_on: pi.images().iter().map(|g| alg.render(g)).collect(),
                        a: alg.render(a),
                        prime: p,
                    }));
                }
            }
            bucket.push(pt);
        }
    }
    Ok(None)
}

fn surj_with_oracle(
    pi: &RingMap,
    oracle: &SubalgebraOracle,
    a: &Polynomial,
    p: u64,
    cap: u32,
) -> Result<Certificate> {
    let alg = pi.target();
    let a = alg.reduce(a)?;
    let ra = alg.render(&a);
    let mut cert = Certificate::new(format!("some {p}-power of {ra} lies in the image"));
    cert.caps.insert("exponent_cap".into(), cap as u64);
    let mut c = a.clone();
    for k in 0..=cap {
        match oracle.member(&c) {
            Ok(Membership::Member(expr)) => {
                let b = pi.source().reduce(&expr.reinterpret(pi.source().base())?)?;
                let e = p_power(p, k);
                cert.verdict = Verdict::Proved;
                cert.witness = json!({ "k": k, "b": pi.source().render(&b) });
                cert.obligations.push(Obligation::Zero {
                    ring: alg.spec(),
                    expr: format!("({ra})^{e} - ({})", pi.expand(&b)),
                });
                return Ok(cert);
            }
            Ok(Membership::NotMember) => {}
            Err(AlgebraError::CapExceeded(m)) => {
                cert.notes.push(m);
                return Ok(cert);
            }
            Err(e) => return Err(e),
        }
        if k < cap {
            c = alg.pow_u64(&c, p)?;
        }
    }
    if let Some(ob) = image_obstruction(pi, &a, p)? {
        cert.verdict = Verdict::Refuted;
        cert.obligations.push(ob);
    } else {
        cert.notes.push(format!(
            "no {p}-power up to exponent {cap} lies in the image"
        ));
    }
    Ok(cert)
}

/// Finds `k` and `b` with `π(b) = a^{pᵏ}`.
pub fn perf_surj_witness(
    pi: &RingMap,
    a: &Polynomial,
    prime: Option<u64>,
    cap: u32,
) -> Result<Certificate> {
    same_base(pi)?;
    let p = distinguished_prime(pi.target(), prime)?;
    let oracle = SubalgebraOracle::new(pi.target(), pi.images())?;
    surj_with_oracle(pi, &oracle, a, p, cap)
}

/// Finds `m` with `b^{pᵐ} = b'^{pᵐ}` in the source, given `π(b) = π(b')`.
pub fn perf_inj_witness(
    pi: &RingMap,
    b: &Polynomial,
    b2: &Polynomial,
    prime: Option<u64>,
    cap: u32,
) -> Result<Certificate> {
    if pi.apply(b)? != pi.apply(b2)? {
        return Err(AlgebraError::Precondition(format!(
            "{} and {} have different images",
            pi.source().render(b),
            pi.source().render(b2)
        )));
    }
    let p = distinguished_prime(pi.source(), prime)?;
    perf_eq(pi.source(), b, b2, Some(p), cap)
}

fn combine(parts: &[Certificate]) -> Verdict {
    if parts.iter().any(|c| c.is_refuted()) {
        Verdict::Refuted
    } else if parts.iter().all(|c| c.is_proved()) {
        Verdict::Proved
    } else {
        Verdict::Inconclusive
    }
}

/// Checks that `π` induces a bijection on perfections, on a sample of
/// target elements and on pairs built from kernel generators.
///
/// Over ℚ there is no distinguished prime; unless one is given the check
/// runs for 2, 3 and 5 and fails as soon as one of them fails.
pub fn perf_iso_check(
    pi: &RingMap,
    sample: &[Polynomial],
    prime: Option<u64>,
    cap: u32,
) -> Result<Certificate> {
    same_base(pi)?;
    let primes: Vec<u64> = match (pi.target().base().prime(), prime) {
        (Some(p), _) => vec![p],
        (None, Some(p)) => vec![p],
        (None, None) => vec![2, 3, 5],
    };
    let mut cert = Certificate::new("induced map on perfections is bijective on the sample");
    cert.caps.insert("exponent_cap".into(), cap as u64);
    let oracle = SubalgebraOracle::new(pi.target(), pi.images())?;
    let kernel_pairs = kernel_pairs(pi, &mut cert)?;
    for &p in &primes {
        let mut per_prime = Certificate::new(format!("prime {p}"));
        for a in sample {
            per_prime
                .parts
                .push(surj_with_oracle(pi, &oracle, a, p, cap)?);
        }
        for (b, b2) in &kernel_pairs {
            let mut c = perf_inj_witness(pi, b, b2, Some(p), cap)?;
            c.claim = format!("injectivity: {}", c.claim);
            per_prime.parts.push(c);
        }
        per_prime.verdict = combine(&per_prime.parts);
        if per_prime.parts.is_empty() {
            per_prime.verdict = Verdict::Inconclusive;
            per_prime.notes.push("empty sample".into());
        }
        let refuted = per_prime.is_refuted();
        cert.parts.push(per_prime);
        if refuted {
            break;
        }
    }
    cert.verdict = combine(&cert.parts);
    cert.witness = json!({ "primes": primes, "sample": sample.iter().map(|a| pi.target().render(a)).collect::<Vec<_>>() });
    Ok(cert)
}

/// Pairs `(0, k)` and `(1, 1 + k)` for generators `k` of the kernel.
fn kernel_pairs(pi: &RingMap, cert: &mut Certificate) -> Result<Vec<(Polynomial, Polynomial)>> {
    let src = pi.source();
    let ker = match pi.kernel() {
        Ok(k) => k,
        Err(e) => {
            cert.notes.push(format!("kernel not computed: {e}"));
            return Ok(vec![]);
        }
    };
    let mut out = Vec::new();
    for k in ker.reduced_generators()? {
        let k = src.reduce(&k)?;
        if k.is_zero() {
            continue;
        }
        out.push((src.zero(), k.clone()));
        out.push((src.one()?, src.add(&src.one()?, &k)?));
    }
    Ok(out)
}

/// Descends a section along `π: B → A` given its generic-fiber value:
/// finds `n` and `b` with `π(b) = a^{pⁿ}` in A and `b = bq^{pⁿ}` in B ⊗ ℚ.
pub fn descend_section(
    pi: &RingMap,
    a: &Polynomial,
    bq: &Polynomial,
    candidate: Option<&Polynomial>,
    cap: u32,
) -> Result<Certificate> {
    same_base(pi)?;
    let p = match pi.source().base() {
        CoeffRing::IntegerLocalizedAt(p) => p,
        other => {
            return Err(AlgebraError::Unsupported(format!(
                "section descent needs base ZZ_(p), got {other}"
            )))
        }
    };
    let b_alg = pi.source();
    let a_alg = pi.target();
    let piq = pi.base_change_to_q()?;
    let bq_alg = piq.source().clone();
    let aq_alg = piq.target();
    let bq = bq_alg.reduce(bq)?;
    let a = a_alg.reduce(a)?;
    if piq.apply(&bq)? != aq_alg.import(&a)? {
        return Err(AlgebraError::Precondition(format!(
            "{} and {} disagree over QQ",
            a_alg.render(&a),
            bq_alg.render(&bq)
        )));
    }
    let ra = a_alg.render(&a);
    let rbq = bq_alg.render(&bq);
    let mut cert = Certificate::new(format!("descent of ({ra}, {rbq})"));
    cert.caps.insert("exponent_cap".into(), cap as u64);
    let finish = |cert: &mut Certificate, n: u32, b: &Polynomial| {
        let e = p_power(p, n);
        cert.verdict = Verdict::Proved;
        cert.witness = json!({ "n": n, "b": b_alg.render(b) });
        cert.obligations.push(Obligation::Zero {
            ring: a_alg.spec(),
            expr: format!("({ra})^{e} - ({})", pi.expand(b)),
        });
        cert.obligations.push(Obligation::Zero {
            ring: bq_alg.spec(),
            expr: format!("({}) - ({rbq})^{e}", b_alg.render(b)),
        });
    };
    let oracle = SubalgebraOracle::new(a_alg, pi.images())?;
    if let Some(cand) = candidate {
        let cand = b_alg.reduce(cand)?;
        if pi.apply(&cand)? == a && bq_alg.import(&cand)? == bq {
            finish(&mut cert, 0, &cand);
            if let Membership::Member(expr) = oracle.member(&a)? {
                let other = b_alg.reduce(&expr.reinterpret(b_alg.base())?)?;
                if other != cand {
                    let mut c = perf_inj_witness(pi, &cand, &other, Some(p), cap)?;
                    c.claim = format!("lifts agree in the perfection: {}", c.claim);
                    cert.parts.push(c);
                }
            }
            return Ok(cert);
        }
        cert.notes.push("offered lift rejected".into());
    }
    let mut c = a.clone();
    let mut target = bq.clone();
    for n in 0..=cap {
        if let Membership::Member(expr) = oracle.member(&c)? {
            let b = b_alg.reduce(&expr.reinterpret(b_alg.base())?)?;
            if bq_alg.import(&b)? == target {
                finish(&mut cert, n, &b);
                return Ok(cert);
            }
        }
        if n < cap {
            c = a_alg.pow_u64(&c, p)?;
            target = bq_alg.pow_u64(&target, p)?;
        }
    }
    cert.notes
        .push(format!("no compatible lift up to exponent {cap}"));
    Ok(cert)
}

/// Eventual images of Frobenius on a fiber product of finite rings and on
/// its factors.
pub struct FiberPerfectionSets {
    pub sizes: [usize; 4],
    pub eventual_product: BTreeSet<(usize, usize)>,
    pub compatible_eventual: BTreeSet<(usize, usize)>,
}

impl FiberPerfectionSets {
    pub fn is_bijection(&self) -> bool {
        self.eventual_product == self.compatible_eventual
    }
}

fn frobenius_table(alg: &FpAlgebra, elems: &[Polynomial], p: u64) -> Result<Vec<usize>> {
    let index: HashMap<&Polynomial, usize> =
        elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    elems
        .iter()
        .map(|e| {
            let f = alg.pow_u64(e, p)?;
            index
                .get(&f)
                .copied()
                .ok_or_else(|| AlgebraError::Invalid("element enumeration is not closed".into()))
        })
        .collect()
}

fn eventual_image<T: Ord + Clone>(start: BTreeSet<T>, f: impl Fn(&T) -> T) -> BTreeSet<T> {
    let mut cur = start;
    loop {
        let next: BTreeSet<T> = cur.iter().map(&f).collect();
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Computes `E(A ×_B C)` and `E(A) ×_{E(B)} E(C)` where `E` is the
/// eventual image of `x ↦ xᵖ`; the perfection of a finite monoid is that
/// eventual image with Frobenius acting bijectively.
pub fn fiber_perfection_sets(
    f: &RingMap,
    g: &RingMap,
    p: u64,
    limit: usize,
) -> Result<FiberPerfectionSets> {
    if f.target() != g.target() {
        return Err(AlgebraError::Invalid("maps must share a target".into()));
    }
    let too_big = || {
        AlgebraError::Invalid(format!(
            "rings must be finite with at most {limit} elements"
        ))
    };
    let ea = f.source().elements(limit)?.ok_or_else(too_big)?;
    let ec = g.source().elements(limit)?.ok_or_else(too_big)?;
    let eb = f.target().elements(limit)?.ok_or_else(too_big)?;
    let fa = frobenius_table(f.source(), &ea, p)?;
    let fc = frobenius_table(g.source(), &ec, p)?;
    let b_index: HashMap<&Polynomial, usize> = eb.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let image = |m: &RingMap, x: &Polynomial| -> Result<usize> {
        let y = m.apply(x)?;
        b_index
            .get(&y)
            .copied()
            .ok_or_else(|| AlgebraError::Invalid("image outside enumeration".into()))
    };
    let fimg = ea.iter().map(|x| image(f, x)).collect::<Result<Vec<_>>>()?;
    let gimg = ec.iter().map(|x| image(g, x)).collect::<Result<Vec<_>>>()?;
    let mut pairs = BTreeSet::new();
    for (i, fi) in fimg.iter().enumerate() {
        for (j, gj) in gimg.iter().enumerate() {
            if fi == gj {
                pairs.insert((i, j));
            }
        }
    }
    let n_pairs = pairs.len();
    let eventual_product = eventual_image(pairs, |&(i, j)| (fa[i], fc[j]));
    let e_a = eventual_image((0..ea.len()).collect(), |&i| fa[i]);
    let e_c = eventual_image((0..ec.len()).collect(), |&j| fc[j]);
    let mut compatible_eventual = BTreeSet::new();
    for &i in &e_a {
        for &j in &e_c {
            if fimg[i] == gimg[j] {
                compatible_eventual.insert((i, j));
            }
        }
    }
    Ok(FiberPerfectionSets {
        sizes: [ea.len(), eb.len(), ec.len(), n_pairs],
        eventual_product,
        compatible_eventual,
    })
}

/// Exhaustive check that perfection commutes with the fiber product of
/// finite rings `A → B ← C`.
pub fn fiber_product_perfection_check(
    f: &RingMap,
    g: &RingMap,
    p: u64,
    limit: usize,
) -> Result<Certificate> {
    let sets = fiber_perfection_sets(f, g, p, limit)?;
    let mut cert = Certificate::new(format!(
        "perfection of {} x_{} {} is the fiber product of perfections",
        f.source().base(),
        f.target().base(),
        g.source().base()
    ));
    cert.witness = json!({
        "size_a": sets.sizes[0],
        "size_b": sets.sizes[1],
        "size_c": sets.sizes[2],
        "size_fiber_product": sets.sizes[3],
        "perfection_of_fiber_product": sets.eventual_product.len(),
        "fiber_product_of_perfections": sets.compatible_eventual.len(),
    });
    cert.verdict = if sets.is_bijection() {
        Verdict::Proved
    } else {
        Verdict::Refuted
    };
    if cert.is_proved() {
        cert.obligations.push(Obligation::FiberPerfectionBijection {
            f: f.spec(),
            g: g.spec(),
            prime: p,
        });
    }
    Ok(cert)
}

/// `⌊log_p r⌋`, used by callers that report the bound's components.
pub fn floor_log(p: u64, r: u64) -> u32 {
    let mut l = 0;
    let mut x = r;
    while x >= p {
        x /= p;
        l += 1;
    }
    l
}
