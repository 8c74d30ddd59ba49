//! Universal homeomorphisms of affine extensions, certified by chains
//! `A ⊆ A[b₁] ⊆ … ⊆ A[b₁,…,bₖ]` where each `bᵢ` is elementary (`bᵢ², bᵢ³`
//! below) or p-type (`p·bᵢ, bᵢᵖ` below).
//!
//! A chain covering the generators of B proves the extension is a universal
//! homeomorphism. Refutations come only from points: two field-valued
//! points of B that agree on A.

use serde_json::json;

use crate::algebra::{FpAlgebra, Membership, RingMap, SubalgebraOracle};
use crate::certificate::{Certificate, CoverRecord, Obligation, StepRecord, Verdict};
use crate::coeff::{int, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::monomial::Monomial;
use crate::points::{self, DEFAULT_POINT_LIMIT, DEFAULT_RADIUS};
use crate::poly::Polynomial;

/// Primes tried for p-type steps over ℤ when none are configured.
pub const DEFAULT_STEP_PRIMES: [u64; 3] = [2, 3, 5];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCaps {
    /// Largest total degree of monomial candidates.
    pub degree_cap: u32,
    pub max_steps: usize,
    /// Primes for p-type steps and 𝔽ₚ-points over ℤ.
    pub primes: Vec<u64>,
    pub point_radius: i64,
    pub point_limit: usize,
}

impl Default for ChainCaps {
    fn default() -> Self {
        ChainCaps {
            degree_cap: 4,
            max_steps: 16,
            primes: Vec::new(),
            point_radius: DEFAULT_RADIUS,
            point_limit: DEFAULT_POINT_LIMIT,
        }
    }
}

impl ChainCaps {
    pub fn with_degree_cap(mut self, d: u32) -> Self {
        self.degree_cap = d;
        self
    }

    pub fn with_primes(mut self, primes: &[u64]) -> Self {
        self.primes = primes.to_vec();
        self
    }

    /// Primes usable for p-type steps over `base`. Over ℚ and ℤ₍ₚ₎ every
    /// other prime is a unit, so a q-type step would already lie below.
    pub fn step_primes(&self, base: CoeffRing) -> Vec<u64> {
        match base {
            CoeffRing::Rational => vec![],
            CoeffRing::Integer if self.primes.is_empty() => DEFAULT_STEP_PRIMES.to_vec(),
            CoeffRing::Integer => self.primes.clone(),
            other => other.prime().into_iter().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Elementary,
    PType(u64),
}

impl StepKind {
    pub fn prime(self) -> Option<u64> {
        match self {
            StepKind::Elementary => None,
            StepKind::PType(p) => Some(p),
        }
    }
}

impl std::fmt::Display for StepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepKind::Elementary => f.write_str("elementary"),
            StepKind::PType(p) => write!(f, "p-type({p})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub generator: Polynomial,
    pub kind: StepKind,
    /// Membership certificates for `b², b³` or `p·b, bᵖ`.
    pub witnesses: [Certificate; 2],
}

impl ChainStep {
    fn record(&self, alg: &FpAlgebra) -> StepRecord {
        let expr = |c: &Certificate| {
            c.witness["expression"]
                .as_str()
                .unwrap_or_default()
                .to_string()
        };
        StepRecord {
            generator: alg.render(&self.generator),
            prime: self.kind.prime(),
            first: expr(&self.witnesses[0]),
            second: expr(&self.witnesses[1]),
        }
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum StepOutcome {
    Step(ChainStep),
    /// The failing membership certificates, one per attempted kind.
    Refused(Vec<Certificate>),
}

/// Tests whether `b` is an elementary step over the subalgebra generated by
/// `below`, or a p-type step when `p` is given.
pub fn check_step(
    ambient: &FpAlgebra,
    below: &[Polynomial],
    b: &Polynomial,
    p: Option<u64>,
) -> Result<StepOutcome> {
    let oracle = SubalgebraOracle::new(ambient, below)?;
    let primes: Vec<u64> = p.into_iter().collect();
    check_step_with(&oracle, b, &primes)
}

fn certify_strict(oracle: &SubalgebraOracle, f: &Polynomial) -> Result<Certificate> {
    let c = oracle.certify(f)?;
    if c.verdict == Verdict::Inconclusive {
        return Err(AlgebraError::CapExceeded(c.notes.join("; ")));
    }
    Ok(c)
}

fn check_step_with(
    oracle: &SubalgebraOracle,
    b: &Polynomial,
    primes: &[u64],
) -> Result<StepOutcome> {
    let alg = oracle.ambient();
    let b = alg.reduce(b)?;
    let mut tries = vec![(
        StepKind::Elementary,
        alg.pow_u64(&b, 2)?,
        alg.pow_u64(&b, 3)?,
    )];
    for &p in primes {
        tries.push((
            StepKind::PType(p),
            alg.mul(&alg.from_int(p as i64)?, &b)?,
            alg.pow_u64(&b, p)?,
        ));
    }
    let mut refusals = Vec::new();
    for (kind, u, v) in tries {
        let cu = certify_strict(oracle, &u)?;
        if !cu.is_proved() {
            refusals.push(cu);
            continue;
        }
        let cv = certify_strict(oracle, &v)?;
        if !cv.is_proved() {
            refusals.push(cv);
            continue;
        }
        return Ok(StepOutcome::Step(ChainStep {
            generator: b,
            kind,
            witnesses: [cu, cv],
        }));
    }
    Ok(StepOutcome::Refused(refusals))
}

/// Result of a chain search for `A ⊆ B`, with A given by generators in B.
#[derive(Clone, Debug)]
pub struct UhCertificate {
    pub ambient: FpAlgebra,
    pub subring: Vec<Polynomial>,
    pub chain: Vec<ChainStep>,
    /// Elements shown to lie in the subalgebra generated by A and the chain.
    pub covers: Vec<Polynomial>,
    pub certificate: Certificate,
}

impl UhCertificate {
    pub fn verdict(&self) -> Verdict {
        self.certificate.verdict
    }

    pub fn is_proved(&self) -> bool {
        self.certificate.is_proved()
    }

    /// All generators: those of A followed by the chain.
    pub fn generators(&self) -> Vec<Polynomial> {
        let mut g = self.subring.clone();
        g.extend(self.chain.iter().map(|s| s.generator.clone()));
        g
    }
}

fn claim(alg: &FpAlgebra, subring: &[Polynomial], targets: &[Polynomial]) -> String {
    let r = |v: &[Polynomial]| {
        v.iter()
            .map(|g| alg.render(g))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "{}[{}] -> {}[{}] is a universal homeomorphism covering {{{}}}",
        alg.base(),
        r(subring),
        alg.base(),
        alg.vars().join(", "),
        r(targets)
    )
}

fn monomial_poly(alg: &FpAlgebra, m: &Monomial) -> Polynomial {
    Polynomial::one(alg.base(), alg.nvars()).mul_term(m, &int(1))
}

/// Candidate chain generators: targets, then monomials of B by degree.
fn candidates(alg: &FpAlgebra, targets: &[Polynomial], degree_cap: u32) -> Result<Vec<Polynomial>> {
    let mut out: Vec<Polynomial> = Vec::new();
    let mut push = |f: Polynomial| {
        if !f.is_zero() && !f.is_constant() && !out.contains(&f) {
            out.push(f);
        }
    };
    for t in targets {
        push(alg.reduce(t)?);
    }
    for d in 1..=degree_cap {
        let mut ms = Monomial::of_degree(alg.nvars(), d);
        ms.reverse();
        for m in ms {
            push(alg.reduce(&monomial_poly(alg, &m))?);
        }
    }
    Ok(out)
}

fn chain_obligation(
    alg: &FpAlgebra,
    subring: &[Polynomial],
    chain: &[ChainStep],
    covers: &[CoverRecord],
) -> Obligation {
    Obligation::Chain {
        ring: alg.spec(),
        subring: subring.iter().map(|g| alg.render(g)).collect(),
        steps: chain.iter().map(|s| s.record(alg)).collect(),
        covers: covers.to_vec(),
    }
}

fn tag_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("g{i}")).collect()
}

/// Expressions of `targets` in the subalgebra, or `None` if one is missing.
fn cover(oracle: &SubalgebraOracle, targets: &[Polynomial]) -> Result<Option<Vec<CoverRecord>>> {
    let alg = oracle.ambient();
    let tags = tag_names(oracle.generators().len());
    let mut out = Vec::new();
    for t in targets {
        match oracle.member(t)? {
            Membership::Member(e) => out.push(CoverRecord {
                element: alg.render(t),
                expression: e.render(&tags),
            }),
            Membership::NotMember => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn proved(
    alg: &FpAlgebra,
    subring: &[Polynomial],
    chain: Vec<ChainStep>,
    targets: &[Polynomial],
    covers: Vec<CoverRecord>,
    mut cert: Certificate,
) -> UhCertificate {
    cert.verdict = Verdict::Proved;
    cert.witness = json!({
        "chain": chain.iter().map(|s| json!({ "generator": alg.render(&s.generator), "kind": s.kind.to_string() })).collect::<Vec<_>>(),
    });
    cert.obligations
        .push(chain_obligation(alg, subring, &chain, &covers));
    UhCertificate {
        ambient: alg.clone(),
        subring: subring.to_vec(),
        chain,
        covers: targets.to_vec(),
        certificate: cert,
    }
}

/// Searches for a chain from the subalgebra generated by `subring` whose
/// top contains every target (all variables of B when `targets` is empty).
pub fn find_chain(
    ambient: &FpAlgebra,
    subring: &[Polynomial],
    targets: &[Polynomial],
    caps: &ChainCaps,
) -> Result<UhCertificate> {
    let alg = ambient;
    let subring = subring
        .iter()
        .map(|g| alg.reduce(g))
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<Polynomial> = if targets.is_empty() {
        (0..alg.nvars())
            .map(|i| Polynomial::var(alg.base(), alg.nvars(), i))
            .collect()
    } else {
        targets
            .iter()
            .map(|t| alg.reduce(t))
            .collect::<Result<Vec<_>>>()?
    };
    let mut cert = Certificate::new(claim(alg, &subring, &targets))
        .with_cap("degree_cap", caps.degree_cap as u64)
        .with_cap("max_steps", caps.max_steps as u64);
    let primes = caps.step_primes(alg.base());
    let cands = candidates(alg, &targets, caps.degree_cap)?;
    let mut chain: Vec<ChainStep> = Vec::new();
    let mut gens = subring.clone();
    let outcome: Result<Option<Vec<CoverRecord>>> = (|| loop {
        let oracle = SubalgebraOracle::new(alg, &gens)?;
        if let Some(c) = cover(&oracle, &targets)? {
            return Ok(Some(c));
        }
        if chain.len() >= caps.max_steps {
            return Ok(None);
        }
        let mut next = None;
        for c in &cands {
            if matches!(oracle.member(c)?, Membership::Member(_)) {
                continue;
            }
            if let StepOutcome::Step(s) = check_step_with(&oracle, c, &primes)? {
                next = Some(s);
                break;
            }
        }
        match next {
            Some(s) => {
                gens.push(s.generator.clone());
                chain.push(s);
            }
            None => return Ok(None),
        }
    })();
    match outcome {
        Ok(Some(covers)) => return Ok(proved(alg, &subring, chain, &targets, covers, cert)),
        Ok(None) => cert.notes.push(format!(
            "no chain found with {} steps below degree {}",
            chain.len(),
            caps.degree_cap
        )),
        Err(AlgebraError::CapExceeded(m)) => cert.notes.push(m),
        Err(e) => return Err(e),
    }
    let fields = points::point_fields(alg.base(), &primes);
    let ob = points::separating_points(
        alg,
        &fields,
        &subring,
        &targets,
        caps.point_radius,
        caps.point_limit,
    )?;
    if let Some(ob) = ob {
        cert.verdict = Verdict::Refuted;
        cert.obligations.push(ob);
        chain.clear();
    }
    Ok(UhCertificate {
        ambient: alg.clone(),
        subring,
        chain,
        covers: vec![],
        certificate: cert,
    })
}

/// Concatenates a chain for `A ⊆ B` with one for `B ⊆ C` inside a common
/// ambient C, where B is generated by what the first chain covers.
pub fn compose(first: &UhCertificate, second: &UhCertificate) -> Result<UhCertificate> {
    if !first.is_proved() || !second.is_proved() {
        return Err(AlgebraError::Precondition(
            "both chains must be proved".into(),
        ));
    }
    if first.ambient != second.ambient {
        return Err(AlgebraError::Precondition(
            "chains live in different rings".into(),
        ));
    }
    let alg = &first.ambient;
    let mut gens = first.generators();
    let oracle = SubalgebraOracle::new(alg, &gens)?;
    if cover(&oracle, &second.subring)?.is_none() {
        return Err(AlgebraError::Precondition(
            "the second chain does not start inside the first".into(),
        ));
    }
    let mut chain = first.chain.clone();
    for s in &second.chain {
        let oracle = SubalgebraOracle::new(alg, &gens)?;
        let primes: Vec<u64> = s.kind.prime().into_iter().collect();
        match check_step_with(&oracle, &s.generator, &primes)? {
            StepOutcome::Step(step) => {
                gens.push(step.generator.clone());
                chain.push(step);
            }
            StepOutcome::Refused(_) => {
                return Err(AlgebraError::Invalid(
                    "a step of the second chain does not lift".into(),
                ));
            }
        }
    }
    let oracle = SubalgebraOracle::new(alg, &gens)?;
    let covers = cover(&oracle, &second.covers)?
        .ok_or_else(|| AlgebraError::Invalid("composed chain lost a target".into()))?;
    let cert = Certificate::new(claim(alg, &first.subring, &second.covers));
    Ok(proved(
        alg,
        &first.subring,
        chain,
        &second.covers,
        covers,
        cert,
    ))
}

/// Presents the subalgebra generated by `gens` as `base[g0, …]/ker` with
/// its inclusion into `ambient`.
pub fn inclusion_map(ambient: &FpAlgebra, gens: &[Polynomial]) -> Result<RingMap> {
    let names = tag_names(gens.len());
    let names_ref: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let free = FpAlgebra::polynomial_ring(ambient.base(), &names_ref);
    let to_b = RingMap::new(free, ambient.clone(), gens.to_vec())?;
    let ker = to_b.kernel()?;
    let source = FpAlgebra::new(ambient.base(), names, ker.reduced_generators()?)?;
    RingMap::new(source, ambient.clone(), gens.to_vec())
}

/// Checks `A ⊆ B` after localizing at each listed prime, and on the
/// generic fiber. Only the listed primes are tested.
pub fn uh_local_at_primes(
    ambient: &FpAlgebra,
    subring: &[Polynomial],
    primes: &[u64],
    caps: &ChainCaps,
) -> Result<Certificate> {
    let mut cert = Certificate::new(format!(
        "{} at primes {:?} and over QQ",
        claim(ambient, subring, &[]),
        primes
    ))
    .with_cap("degree_cap", caps.degree_cap as u64);
    for &p in primes {
        let local = ambient.localize_at(p)?;
        let sub = subring
            .iter()
            .map(|g| local.import(g))
            .collect::<Result<Vec<_>>>()?;
        let mut c = find_chain(&local, &sub, &[], &caps.clone().with_primes(&[p]))?.certificate;
        c.claim = format!("at {p}: {}", c.claim);
        cert.parts.push(c);
    }
    let q = ambient.base_change_to_q()?;
    let sub = subring
        .iter()
        .map(|g| q.import(g))
        .collect::<Result<Vec<_>>>()?;
    let mut c = find_chain(&q, &sub, &[], caps)?.certificate;
    c.claim = format!("generic fiber: {}", c.claim);
    cert.parts.push(c);
    cert.verdict = if cert.parts.iter().any(|c| c.is_refuted()) {
        Verdict::Refuted
    } else if cert.parts.iter().all(|c| c.is_proved()) {
        Verdict::Proved
    } else {
        Verdict::Inconclusive
    };
    cert.witness = json!({ "primes_tested": primes, "generic_fiber": true });
    cert.notes.push("only the listed primes were tested".into());
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::replay;

    fn gens(alg: &FpAlgebra, g: &[&str]) -> Vec<Polynomial> {
        g.iter().map(|s| alg.element(s).unwrap()).collect()
    }

    #[test]
    fn steps() {
        let f2t = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &["t"]);
        let out = check_step(
            &f2t,
            &gens(&f2t, &["t^2", "t^3"]),
            &f2t.element("t").unwrap(),
            None,
        )
        .unwrap();
        assert!(matches!(
            out,
            StepOutcome::Step(ChainStep {
                kind: StepKind::Elementary,
                ..
            })
        ));

        let z2t = FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(2), &["t"]);
        let out = check_step(
            &z2t,
            &gens(&z2t, &["2*t", "t^2"]),
            &z2t.element("t").unwrap(),
            Some(2),
        )
        .unwrap();
        match out {
            StepOutcome::Step(s) => {
                assert_eq!(s.kind, StepKind::PType(2));
                replay(&s.witnesses[0]).unwrap();
                replay(&s.witnesses[1]).unwrap();
            }
            other => panic!("{other:?}"),
        }

        let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["x", "y"]);
        let out = check_step(&q, &gens(&q, &["x^2"]), &q.element("y").unwrap(), None).unwrap();
        assert!(matches!(out, StepOutcome::Refused(ref r) if r.len() == 1 && r[0].is_refuted()));
    }

    #[test]
    fn chains() {
        let z2t = FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(2), &["t"]);
        let c = find_chain(
            &z2t,
            &gens(&z2t, &["2*t", "t^2"]),
            &[],
            &ChainCaps::default(),
        )
        .unwrap();
        assert!(c.is_proved());
        assert_eq!(c.chain.len(), 1);
        assert_eq!(c.chain[0].kind, StepKind::PType(2));
        replay(&c.certificate).unwrap();

        let f2t = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &["t"]);
        let c = find_chain(
            &f2t,
            &gens(&f2t, &["t^2", "t^3"]),
            &[],
            &ChainCaps::default(),
        )
        .unwrap();
        assert_eq!(c.chain[0].kind, StepKind::Elementary);
        replay(&c.certificate).unwrap();
    }

    #[test]
    fn x_plus_2y_extension_is_a_chain() {
        let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["x", "y"]);
        let c = find_chain(
            &q,
            &gens(&q, &["x^2", "x^3", "x + 2*y"]),
            &[],
            &ChainCaps::default(),
        )
        .unwrap();
        assert!(c.is_proved());
        assert_eq!(q.render(&c.chain[0].generator), "x");
        replay(&c.certificate).unwrap();
    }

    #[test]
    fn point_refutations() {
        let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["x"]);
        let c = find_chain(&q, &gens(&q, &["x^2"]), &[], &ChainCaps::default()).unwrap();
        assert_eq!(c.verdict(), Verdict::Refuted);
        replay(&c.certificate).unwrap();
    }

    #[test]
    fn tampered_chain_fails_replay() {
        let f2t = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &["t"]);
        let mut c = find_chain(
            &f2t,
            &gens(&f2t, &["t^2", "t^3"]),
            &[],
            &ChainCaps::default(),
        )
        .unwrap();
        if let Obligation::Chain { subring, .. } = &mut c.certificate.obligations[0] {
            subring[1] = "t^5".into();
        }
        assert!(replay(&c.certificate).is_err());
    }

    #[test]
    fn local_checks() {
        let zt = FpAlgebra::polynomial_ring(CoeffRing::Integer, &["t"]);
        let c = uh_local_at_primes(
            &zt,
            &gens(&zt, &["2*t", "t^2"]),
            &[2],
            &ChainCaps::default(),
        )
        .unwrap();
        assert!(c.is_proved());
        replay(&c).unwrap();
        let c =
            uh_local_at_primes(&zt, &gens(&zt, &["t"]), &[2, 3], &ChainCaps::default()).unwrap();
        assert!(c.is_proved());
        let c =
            uh_local_at_primes(&zt, &gens(&zt, &["t^2"]), &[2, 3], &ChainCaps::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        assert!(c.parts.iter().all(|p| p.is_refuted()));
        replay(&c).unwrap();
    }

    #[test]
    fn composition() {
        let f2t = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &["t"]);
        let caps = ChainCaps::default();
        let a = find_chain(
            &f2t,
            &gens(&f2t, &["t^4", "t^6"]),
            &gens(&f2t, &["t^2", "t^3"]),
            &caps,
        )
        .unwrap();
        let b = find_chain(&f2t, &gens(&f2t, &["t^2", "t^3"]), &[], &caps).unwrap();
        assert!(a.is_proved() && b.is_proved());
        let c = compose(&a, &b).unwrap();
        assert!(c.is_proved());
        replay(&c.certificate).unwrap();
    }

    #[test]
    fn subring_presentation() {
        let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t"]);
        let m = inclusion_map(&q, &gens(&q, &["t^2", "t^3"])).unwrap();
        assert_eq!(m.source().relations().generators().len(), 1);
    }
}
