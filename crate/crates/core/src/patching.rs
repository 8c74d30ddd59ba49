//! Conductor squares `R ⊆ S ⊇ I`, invertible ideals with inverse witnesses,
//! and Milnor patching of rank-1 projectives given as invertible ideals.
//!
//! All modules live inside S or R. A patched module `M ⊆ S` is returned as
//! the ideal `c·M ⊆ R` for the first conductor generator `c`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::algebra::{FpAlgebra, Membership, RingMap, SubalgebraOracle};
use crate::certificate::{Certificate, Obligation, RingSpec, Verdict};
use crate::coeff::{Coeff, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::groebner::{divide_exact, Ideal};
use crate::linalg::{self, CoeffField};
use crate::monomial::Monomial;
use crate::par::{self, Exec};
use crate::poly::Polynomial;

/// Bound on the dimension or size of finite quotients that get enumerated.
const FINITE_LIMIT: usize = 4096;

/// Standard monomials of degree `<= d`, highest degree first.
fn standard_upto(alg: &FpAlgebra, d: u32) -> Result<Vec<Monomial>> {
    let basis = alg.basis()?;
    if basis.is_unit_ideal() {
        return Ok(Vec::new());
    }
    let leads = basis.leading_monomials();
    let order = basis.order();
    let mut out: Vec<Monomial> = Monomial::up_to_degree(alg.nvars(), d)
        .into_iter()
        .filter(|m| !leads.iter().any(|l| l.divides(m)))
        .collect();
    out.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| order.cmp(b, a)));
    Ok(out)
}

fn mono(base: CoeffRing, m: &Monomial) -> Polynomial {
    Polynomial::one(base, m.nvars()).mul_term(m, &Coeff::from_integer(1.into()))
}

/// Coefficient matrix of rows made of several polynomial blocks.
fn matrix(rows: &[Vec<Polynomial>]) -> Vec<Vec<Coeff>> {
    let nb = rows.first().map_or(0, |r| r.len());
    let mut index: Vec<BTreeMap<Monomial, usize>> = vec![BTreeMap::new(); nb];
    for r in rows {
        for (b, p) in r.iter().enumerate() {
            for (m, _) in p.terms() {
                let next = index[b].len();
                index[b].entry(m.clone()).or_insert(next);
            }
        }
    }
    let mut offsets = vec![0; nb + 1];
    for b in 0..nb {
        offsets[b + 1] = offsets[b] + index[b].len();
    }
    rows.iter()
        .map(|r| {
            let mut v = vec![Coeff::zero(); offsets[nb]];
            for (b, p) in r.iter().enumerate() {
                for (m, c) in p.terms() {
                    v[offsets[b] + index[b][m]] = c.clone();
                }
            }
            v
        })
        .collect()
}

/// Echelon basis of the first `keep` coordinates of the left kernel.
fn kernel_vectors(base: CoeffRing, rows: &[Vec<Polynomial>], keep: usize) -> Vec<Vec<Coeff>> {
    let f = CoeffField(base);
    let kernel = linalg::left_kernel(&f, &matrix(rows));
    let projected: Vec<Vec<Coeff>> = kernel.into_iter().map(|v| v[..keep].to_vec()).collect();
    linalg::rref(&f, projected)
        .0
        .into_iter()
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect()
}

fn poly_from(base: CoeffRing, mons: &[Monomial], v: &[Coeff]) -> Result<Polynomial> {
    let n = mons.first().map_or(0, |m| m.nvars());
    Polynomial::from_terms(base, n, mons.iter().cloned().zip(v.iter().cloned()))
}

/// `dims[d]` = dimension of the part spanned in degrees `<= d`, for
/// echelon vectors over columns sorted by descending degree.
fn dims_by_degree(vecs: &[Vec<Coeff>], mons: &[Monomial], cap: u32) -> Vec<usize> {
    let lead: Vec<u32> = vecs
        .iter()
        .filter_map(|v| {
            v.iter()
                .position(|c| !c.is_zero())
                .map(|i| mons[i].degree())
        })
        .collect();
    (0..=cap)
        .map(|d| lead.iter().filter(|&&e| e <= d).count())
        .collect()
}

fn spec_plus(alg: &FpAlgebra, extra: &[Polynomial]) -> RingSpec {
    let mut spec = alg.spec();
    spec.relations
        .extend(extra.iter().map(|p| p.render(alg.vars())));
    spec
}

fn ideal_with(alg: &FpAlgebra, extra: &[Polynomial]) -> Result<Ideal> {
    let mut gens = alg.relations().generators().to_vec();
    gens.extend(extra.iter().cloned());
    Ideal::new(alg.base(), alg.nvars(), gens)
}

/// Reduced generators of `(extra)` in `alg`, without those that vanish.
fn reduced_ideal(alg: &FpAlgebra, extra: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let mut out = Vec::new();
    for g in ideal_with(alg, extra)?.reduced_generators()? {
        if !alg.is_zero(&g)? {
            out.push(g);
        }
    }
    Ok(out)
}

/// `(a) ⊆ (b)` in `alg`, returning the first element of `a` outside `(b)`.
fn first_outside(
    alg: &FpAlgebra,
    a: &[Polynomial],
    b: &[Polynomial],
) -> Result<Option<Polynomial>> {
    let ib = ideal_with(alg, b)?;
    for x in a {
        if !ib.contains(x)? {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}

/// Zero obligations for `a ⊆ (b)`, or a NonZero obligation for a failure.
fn containment(
    alg: &FpAlgebra,
    a: &[Polynomial],
    b: &[Polynomial],
    cert: &mut Certificate,
) -> Result<bool> {
    let spec = spec_plus(alg, b);
    if let Some(x) = first_outside(alg, a, b)? {
        cert.obligations.push(Obligation::NonZero {
            ring: spec,
            expr: x.render(alg.vars()),
        });
        return Ok(false);
    }
    for x in a {
        cert.obligations.push(Obligation::Zero {
            ring: spec.clone(),
            expr: x.render(alg.vars()),
        });
    }
    Ok(true)
}

fn same_ideal(alg: &FpAlgebra, a: &[Polynomial], b: &[Polynomial]) -> Result<bool> {
    Ok(first_outside(alg, a, b)?.is_none() && first_outside(alg, b, a)?.is_none())
}

fn is_unit(alg: &FpAlgebra, f: &Polynomial) -> Result<bool> {
    ideal_with(alg, std::slice::from_ref(f))?.is_unit()
}

/// `{h : h·den ⊆ (num)}` in `alg`, as reduced generators.
pub fn colon(alg: &FpAlgebra, num: &[Polynomial], den: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let (base, n) = (alg.base(), alg.nvars());
    let q = ideal_with(alg, num)?;
    let mut acc: Option<Ideal> = None;
    for f in den {
        if alg.is_zero(f)? {
            continue;
        }
        let inter = q.intersect(&Ideal::new(base, n, vec![f.clone()])?)?;
        let quo = inter
            .reduced_generators()?
            .iter()
            .map(|h| {
                divide_exact(h, f)
                    .ok_or_else(|| AlgebraError::Invalid("inexact division in colon".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let jf = Ideal::new(base, n, quo)?;
        acc = Some(match acc {
            None => jf,
            Some(a) => a.intersect(&jf)?,
        });
    }
    match acc {
        None => Ok(vec![Polynomial::one(base, n)]),
        Some(a) => reduced_ideal(alg, a.generators()),
    }
}

/// Rejects rings with a nilpotent standard monomial of degree `<= 2`, or
/// any nilpotent element when the ring is small and finite.
fn check_reduced(alg: &FpAlgebra) -> Result<()> {
    if alg.relations().generators().is_empty() {
        return Ok(());
    }
    let mut probes: Vec<Polynomial> = standard_upto(alg, 2)?
        .iter()
        .filter(|m| !m.is_one())
        .map(|m| mono(alg.base(), m))
        .collect();
    if let Some(all) = alg.elements(FINITE_LIMIT)? {
        probes.extend(all);
    }
    for p in probes {
        if !alg.is_zero(&p)? && alg.is_nilpotent(&p)? {
            return Err(AlgebraError::NotReduced(format!(
                "{} is nilpotent",
                alg.render(&p)
            )));
        }
    }
    Ok(())
}

/// The square `R → S`, `R/I → S/I` for the conductor `I`.
#[derive(Clone, Debug)]
pub struct ConductorSquare {
    map: RingMap,
    module_gens: Vec<Polynomial>,
    ideal_s: Vec<Polynomial>,
    ideal_r: Vec<Polynomial>,
    r_mod_i: FpAlgebra,
    s_mod_i: FpAlgebra,
    bar: RingMap,
    oracle: SubalgebraOracle,
    cap: u32,
    pub certificate: Certificate,
}

impl ConductorSquare {
    pub fn map(&self) -> &RingMap {
        &self.map
    }

    pub fn r(&self) -> &FpAlgebra {
        self.map.source()
    }

    pub fn s(&self) -> &FpAlgebra {
        self.map.target()
    }

    pub fn module_generators(&self) -> &[Polynomial] {
        &self.module_gens
    }

    /// Generators of I as an ideal of S.
    pub fn ideal_in_s(&self) -> &[Polynomial] {
        &self.ideal_s
    }

    /// Generators of I as an ideal of R.
    pub fn ideal_in_r(&self) -> &[Polynomial] {
        &self.ideal_r
    }

    pub fn r_mod_i(&self) -> &FpAlgebra {
        &self.r_mod_i
    }

    pub fn s_mod_i(&self) -> &FpAlgebra {
        &self.s_mod_i
    }

    /// `R/I → S/I`.
    pub fn bar(&self) -> &RingMap {
        &self.bar
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// The preimage in R of an element of S lying in the image of R.
    pub fn pull_back(&self, s: &Polynomial) -> Result<Option<Polynomial>> {
        Ok(match self.oracle.member(s)? {
            Membership::Member(e) => Some(self.r().reduce(&e.reinterpret(self.r().base())?)?),
            Membership::NotMember => None,
        })
    }

    /// The conductor element `c` used to clear denominators, in S.
    pub fn clearing_element(&self) -> &Polynomial {
        &self.ideal_s[0]
    }

    fn member_obligation(&self, s: &Polynomial) -> Result<Option<(Polynomial, Obligation)>> {
        match self.oracle.member(s)? {
            Membership::Member(e) => {
                let tags: Vec<String> = (0..self.oracle.generators().len())
                    .map(|i| format!("g{i}"))
                    .collect();
                let ob = Obligation::InSubalgebra {
                    ring: self.s().spec(),
                    generators: self
                        .oracle
                        .generators()
                        .iter()
                        .map(|g| self.s().render(g))
                        .collect(),
                    element: self.s().render(s),
                    expression: e.render(&tags),
                };
                Ok(Some((
                    self.r().reduce(&e.reinterpret(self.r().base())?)?,
                    ob,
                )))
            }
            Membership::NotMember => Ok(None),
        }
    }
}

/// Conductor of an injective finite map `R → S` of reduced algebras over a
/// field. `module_gens` generate S as an R-module; by default every standard
/// monomial of S up to `cap` is used.
pub fn conductor(
    map: &RingMap,
    module_gens: Option<&[Polynomial]>,
    cap: u32,
) -> Result<ConductorSquare> {
    conductor_with(map, module_gens, cap, Exec::default())
}

pub fn conductor_with(
    map: &RingMap,
    module_gens: Option<&[Polynomial]>,
    cap: u32,
    exec: Exec,
) -> Result<ConductorSquare> {
    let (r, s) = (map.source(), map.target());
    let base = s.base();
    if r.base() != base || !base.is_field() {
        return Err(AlgebraError::Unsupported(
            "conductors need both rings over the same field".into(),
        ));
    }
    let images: Vec<String> = map.images().iter().map(|g| s.render(g)).collect();
    let mut cert = Certificate::new(format!(
        "conductor of the map {} -> [{}]",
        r.vars().join(", "),
        images.join(", ")
    ))
    .with_cap("degree", cap as u64);
    for g in map.kernel()?.reduced_generators()? {
        if !r.is_zero(&g)? {
            return Err(AlgebraError::Precondition(format!(
                "map is not injective: {} is in the kernel",
                r.render(&g)
            )));
        }
        cert.obligations.push(Obligation::Zero {
            ring: r.spec(),
            expr: g.render(r.vars()),
        });
    }
    check_reduced(s)?;
    check_reduced(r)?;
    let oracle = SubalgebraOracle::new(s, map.images())?;
    let mons = standard_upto(s, cap)?;
    let gens: Vec<Polynomial> = match module_gens {
        Some(g) => g.iter().map(|x| s.reduce(x)).collect::<Result<_>>()?,
        None => mons.iter().map(|m| mono(base, m)).collect(),
    };
    let rows = par::map(exec, &mons, |m| -> Result<Vec<Polynomial>> {
        gens.iter()
            .map(|g| oracle.residual(&s.mul(&mono(base, m), g)?))
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let vecs = kernel_vectors(base, &rows, mons.len());
    if vecs.is_empty() {
        return Err(AlgebraError::CapExceeded(format!(
            "no conductor element in degrees <= {cap}"
        )));
    }
    let dims = dims_by_degree(&vecs, &mons, cap);
    let elems = vecs
        .iter()
        .map(|v| poly_from(base, &mons, v))
        .collect::<Result<Vec<_>>>()?;
    let ideal_s = reduced_ideal(s, &elems)?;

    let mut square = ConductorSquare {
        map: map.clone(),
        module_gens: gens.clone(),
        ideal_s: ideal_s.clone(),
        ideal_r: Vec::new(),
        r_mod_i: r.clone(),
        s_mod_i: s.clone(),
        bar: RingMap::identity(r),
        oracle,
        cap,
        certificate: Certificate::new(""),
    };
    let mut pulled = Vec::new();
    for a in &ideal_s {
        for m in &gens {
            let prod = s.mul(a, m)?;
            match square.member_obligation(&prod)? {
                Some((e, ob)) => {
                    pulled.push(e);
                    cert.obligations.push(ob);
                }
                None => {
                    return Err(AlgebraError::CapExceeded(
                        "module generators do not generate S over R below the cap".into(),
                    ))
                }
            }
        }
    }
    let ideal_r = reduced_ideal(r, &pulled)?;
    let with_rels = |alg: &FpAlgebra, extra: &[Polynomial]| {
        let mut rels = alg.relations().generators().to_vec();
        rels.extend(extra.iter().cloned());
        FpAlgebra::new(base, alg.vars().to_vec(), rels)
    };
    let r_mod_i = with_rels(r, &ideal_r)?;
    let s_mod_i = with_rels(s, &ideal_s)?;
    let bar_images = map
        .images()
        .iter()
        .map(|g| s_mod_i.reduce(g))
        .collect::<Result<Vec<_>>>()?;
    let bar = RingMap::new(r_mod_i.clone(), s_mod_i.clone(), bar_images)?;
    square.ideal_r = ideal_r;
    square.r_mod_i = r_mod_i;
    square.s_mod_i = s_mod_i;
    square.bar = bar;

    let milnor = milnor_identity(&square, &mons)?;
    cert.verdict = if milnor.is_proved() {
        Verdict::Proved
    } else {
        Verdict::Inconclusive
    };
    cert.witness = json!({
        "ideal_in_s": square.ideal_s.iter().map(|g| s.render(g)).collect::<Vec<_>>(),
        "ideal_in_r": square.ideal_r.iter().map(|g| r.render(g)).collect::<Vec<_>>(),
        "module_generators": gens.iter().map(|g| s.render(g)).collect::<Vec<_>>(),
        "dims_by_degree": dims,
    });
    cert.notes.push(format!(
        "maximal among ideals of S spanned in degrees <= {cap}"
    ));
    cert.parts.push(milnor);
    square.certificate = cert;
    Ok(square)
}

/// Every `s ∈ S_{≤cap}` with `s mod I ∈ ι(R/I)` lies in R.
fn milnor_identity(sq: &ConductorSquare, mons: &[Monomial]) -> Result<Certificate> {
    let (s, base) = (sq.s(), sq.s().base());
    let mut cert = Certificate::new("R is the fiber product of S and R/I over S/I");
    let Some(r_std) = sq.r_mod_i.standard_monomials(FINITE_LIMIT)? else {
        cert.notes
            .push("R/I is not finite-dimensional below the limit".into());
        return Ok(cert);
    };
    let mut rows: Vec<Vec<Polynomial>> = mons
        .iter()
        .map(|m| sq.s_mod_i.reduce(&mono(base, m)))
        .map(|p| p.map(|p| vec![p]))
        .collect::<Result<_>>()?;
    for m in &r_std {
        rows.push(vec![sq.bar.apply(&mono(base, m))?.neg()]);
    }
    let vecs = kernel_vectors(base, &rows, mons.len());
    let dims = dims_by_degree(&vecs, mons, sq.cap);
    for v in &vecs {
        let x = poly_from(base, mons, v)?;
        match sq.member_obligation(&x)? {
            Some((_, ob)) => cert.obligations.push(ob),
            None => {
                cert.verdict = Verdict::Refuted;
                cert.obligations = vec![Obligation::NotInSubalgebra {
                    ring: s.spec(),
                    generators: sq.oracle.generators().iter().map(|g| s.render(g)).collect(),
                    element: s.render(&x),
                }];
                return Ok(cert);
            }
        }
    }
    cert.verdict = if cert.obligations.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Proved
    };
    cert.witness = json!({ "compatible_dims_by_degree": dims, "quotient_dim": r_std.len() });
    Ok(cert)
}

/// `inverse · generators = (g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvWitness {
    pub inverse: Vec<Polynomial>,
    pub g: Polynomial,
}

/// An ideal of `ambient` standing for a rank-1 projective module, with an
/// optional witness of invertibility.
#[derive(Clone, Debug)]
pub struct FracIdeal {
    ambient: FpAlgebra,
    generators: Vec<Polynomial>,
    inv_witness: Option<InvWitness>,
}

impl FracIdeal {
    pub fn new(ambient: &FpAlgebra, generators: &[Polynomial]) -> Result<FracIdeal> {
        Ok(FracIdeal {
            ambient: ambient.clone(),
            generators: reduced_ideal(ambient, generators)?,
            inv_witness: None,
        })
    }

    pub fn parse(ambient: &FpAlgebra, generators: &[&str]) -> Result<FracIdeal> {
        let g = generators
            .iter()
            .map(|t| ambient.element(t))
            .collect::<Result<Vec<_>>>()?;
        FracIdeal::new(ambient, &g)
    }

    /// The free module `(1)`.
    pub fn unit(ambient: &FpAlgebra) -> Result<FracIdeal> {
        let one = ambient.one()?;
        Ok(FracIdeal {
            ambient: ambient.clone(),
            generators: vec![one.clone()],
            inv_witness: Some(InvWitness {
                inverse: vec![one.clone()],
                g: one,
            }),
        })
    }

    pub fn ambient(&self) -> &FpAlgebra {
        &self.ambient
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn inv_witness(&self) -> Option<&InvWitness> {
        self.inv_witness.as_ref()
    }

    pub fn with_witness(mut self, inverse: Vec<Polynomial>, g: Polynomial) -> FracIdeal {
        self.inv_witness = Some(InvWitness { inverse, g });
        self
    }

    pub fn is_unit_ideal(&self) -> Result<bool> {
        ideal_with(&self.ambient, &self.generators)?.is_unit()
    }

    pub fn render(&self) -> Vec<String> {
        self.generators
            .iter()
            .map(|g| self.ambient.render(g))
            .collect()
    }

    pub fn same_ideal(&self, other: &FracIdeal) -> Result<bool> {
        same_ideal(&self.ambient, &self.generators, &other.generators)
    }

    fn products(&self, inverse: &[Polynomial]) -> Result<Vec<Polynomial>> {
        let mut out = Vec::new();
        for a in &self.generators {
            for j in inverse {
                out.push(self.ambient.mul(a, j)?);
            }
        }
        Ok(out)
    }

    /// Searches `J = (g) : I` for each generator `g` that is a nonzerodivisor,
    /// keeping the first with `g ∈ I·J`.
    pub fn find_inverse(&self) -> Result<Option<FracIdeal>> {
        for g in &self.generators {
            let ann = colon(&self.ambient, &[], std::slice::from_ref(g))?;
            if !ann.is_empty() {
                continue;
            }
            let j = colon(&self.ambient, std::slice::from_ref(g), &self.generators)?;
            if ideal_with(&self.ambient, &self.products(&j)?)?.contains(g)? {
                return Ok(Some(self.clone().with_witness(j, g.clone())));
            }
        }
        Ok(None)
    }

    /// Replays `I·J ⊆ (g)` and `g ∈ I·J` as normal-form obligations.
    pub fn replay_witness(&self) -> Result<Certificate> {
        let w = self
            .inv_witness
            .as_ref()
            .ok_or_else(|| AlgebraError::Precondition("no invertibility witness".into()))?;
        let alg = &self.ambient;
        let mut cert = Certificate::new(format!("({}) is invertible", self.render().join(", ")));
        let prods = self.products(&w.inverse)?;
        let ok = containment(alg, &prods, std::slice::from_ref(&w.g), &mut cert)?
            && containment(alg, std::slice::from_ref(&w.g), &prods, &mut cert)?;
        cert.verdict = if ok {
            Verdict::Proved
        } else {
            Verdict::Refuted
        };
        cert.witness = json!({
            "inverse": w.inverse.iter().map(|j| alg.render(j)).collect::<Vec<_>>(),
            "g": alg.render(&w.g),
        });
        Ok(cert)
    }

    /// A single generator, searched among the generators and the sums
    /// `gᵢ + c·gⱼ` with `c` ranging over a finite prime field.
    pub fn principal_generator(&self) -> Result<Option<Polynomial>> {
        let alg = &self.ambient;
        let mut cands = self.generators.clone();
        if let CoeffRing::PrimeField(p) = alg.base() {
            let n = self.generators.len();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for c in 1..p {
                        let cj = self.generators[j]
                            .scale(&BigRational::from_integer(BigInt::from(c)))?;
                        cands.push(alg.add(&self.generators[i], &cj)?);
                    }
                }
            }
        }
        for h in cands {
            if alg.is_zero(&h)? {
                continue;
            }
            if first_outside(alg, &self.generators, std::slice::from_ref(&h))?.is_none() {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }
}

/// A patched module: the ideal `c·M ⊆ R`, with its invertibility and
/// principality certificates.
#[derive(Clone, Debug)]
pub struct Patched {
    pub ideal: FracIdeal,
    pub phi: Polynomial,
    pub generator: Option<Polynomial>,
    pub invertible: Certificate,
    pub principal: Certificate,
}

fn require_witness(l: &FracIdeal, what: &str) -> Result<()> {
    if l.inv_witness.is_none() {
        return Err(AlgebraError::Precondition(format!(
            "{what} has no invertibility witness"
        )));
    }
    if !l.replay_witness()?.is_proved() {
        return Err(AlgebraError::Precondition(format!(
            "invertibility witness of {what} does not replay"
        )));
    }
    Ok(())
}

/// Glues `l_s` over S and `l_ri` over R/I along multiplication by the unit
/// `phi` of S/I: the kernel of `L_S × L_RI → S/I`, `(a, c) ↦ ā - phi·c̄`,
/// projected to its first factor and computed in degrees `<= cap`.
pub fn milnor_patch(
    sq: &ConductorSquare,
    l_s: &FracIdeal,
    l_ri: &FracIdeal,
    phi: &Polynomial,
    cap: u32,
) -> Result<Patched> {
    let (r, s, smi) = (sq.r(), sq.s(), &sq.s_mod_i);
    let base = s.base();
    if l_s.ambient != *s || l_ri.ambient != sq.r_mod_i {
        return Err(AlgebraError::Precondition(
            "patching data over the wrong rings".into(),
        ));
    }
    require_witness(l_s, "L_S")?;
    require_witness(l_ri, "L_RI")?;
    let phi = smi.reduce(phi)?;
    if !is_unit(smi, &phi)? {
        return Err(AlgebraError::Precondition(format!(
            "{} is not a unit of S/I",
            smi.render(&phi)
        )));
    }
    let glued = l_ri
        .generators
        .iter()
        .map(|c| smi.mul(&phi, &sq.bar.apply(c)?))
        .collect::<Result<Vec<_>>>()?;
    if !same_ideal(smi, &l_s.generators, &glued)? {
        return Err(AlgebraError::Precondition(
            "phi does not match the restrictions to S/I".into(),
        ));
    }

    let Some(r_std) = sq.r_mod_i.standard_monomials(FINITE_LIMIT)? else {
        return Err(AlgebraError::Unsupported(
            "R/I is not finite-dimensional below the limit".into(),
        ));
    };
    let mut u = Vec::new();
    for m in &r_std {
        for c in &l_ri.generators {
            let rc = sq.r_mod_i.mul(&mono(base, m), c)?;
            u.push(smi.mul(&phi, &sq.bar.apply(&rc)?)?);
        }
    }
    let ls_ideal = ideal_with(s, &l_s.generators)?;
    let mons = standard_upto(s, cap)?;
    let mut rows = Vec::new();
    for m in &mons {
        let x = mono(base, m);
        rows.push(vec![ls_ideal.normal_form(&x)?, smi.reduce(&x)?]);
    }
    for x in &u {
        rows.push(vec![s.zero(), x.neg()]);
    }
    let vecs = kernel_vectors(base, &rows, mons.len());
    let c = sq.clearing_element().clone();
    let mut gens = Vec::new();
    for v in &vecs {
        let x = s.mul(&c, &poly_from(base, &mons, v)?)?;
        let e = sq
            .pull_back(&x)?
            .ok_or_else(|| AlgebraError::Invalid(format!("{} should lie in R", s.render(&x))))?;
        gens.push(e);
    }
    let mut ideal = FracIdeal::new(r, &gens)?;
    let invertible = match ideal.find_inverse()? {
        Some(w) => {
            ideal = w;
            ideal.replay_witness()?
        }
        None => {
            let mut c = Certificate::new(format!("({}) is invertible", ideal.render().join(", ")));
            c.notes.push("no inverse found as a colon ideal".into());
            c
        }
    };
    let (generator, principal) = principality(sq, &ideal, l_s, l_ri, &phi)?;
    Ok(Patched {
        ideal,
        phi,
        generator,
        invertible,
        principal,
    })
}

/// Principal by an explicit generator, or not principal because `phi` avoids
/// `S*·ι((R/I)*)`. The obstruction is used when S is a polynomial ring over a
/// finite field (so `S* = k*`), both inputs are free and R/I is finite.
fn principality(
    sq: &ConductorSquare,
    ideal: &FracIdeal,
    l_s: &FracIdeal,
    l_ri: &FracIdeal,
    phi: &Polynomial,
) -> Result<(Option<Polynomial>, Certificate)> {
    let r = sq.r();
    let mut cert = Certificate::new(format!("({}) is principal", ideal.render().join(", ")));
    if let Some(h) = ideal.principal_generator()? {
        containment(r, &ideal.generators, std::slice::from_ref(&h), &mut cert)?;
        containment(r, std::slice::from_ref(&h), &ideal.generators, &mut cert)?;
        cert.verdict = Verdict::Proved;
        cert.witness = json!({ "generator": r.render(&h) });
        return Ok((Some(h), cert));
    }
    let smi = &sq.s_mod_i;
    let p = match smi.base() {
        CoeffRing::PrimeField(p) => p,
        _ => {
            cert.notes
                .push("no generator found; unit obstruction needs a finite field".into());
            return Ok((None, cert));
        }
    };
    let polynomial_s = sq.s().relations().generators().is_empty();
    if !polynomial_s || !l_s.is_unit_ideal()? || !l_ri.is_unit_ideal()? {
        cert.notes.push(
            "no generator found; unit obstruction needs free inputs over a polynomial ring".into(),
        );
        return Ok((None, cert));
    }
    let Some(elems) = sq.r_mod_i.elements(FINITE_LIMIT)? else {
        cert.notes
            .push("no generator found; R/I is too large to enumerate".into());
        return Ok((None, cert));
    };
    let mut image: BTreeSet<String> = BTreeSet::new();
    let mut image_elems = Vec::new();
    for e in elems {
        if !is_unit(&sq.r_mod_i, &e)? {
            continue;
        }
        let be = sq.bar.apply(&e)?;
        for lam in 1..p {
            let w = smi.reduce(&be.scale(&BigRational::from_integer(lam.into()))?)?;
            if image.insert(smi.render(&w)) {
                image_elems.push(w);
            }
        }
    }
    if image.contains(&smi.render(phi)) {
        cert.notes
            .push("phi lifts to units but no generator was found".into());
        return Ok((None, cert));
    }
    for w in &image_elems {
        cert.obligations.push(Obligation::NonZero {
            ring: smi.spec(),
            expr: smi.sub(phi, w)?.render(smi.vars()),
        });
    }
    cert.verdict = Verdict::Refuted;
    cert.witness = json!({ "phi": smi.render(phi), "unit_products": image.len() });
    cert.notes
        .push("units of a polynomial ring over a field are the nonzero constants".into());
    Ok((None, cert))
}

/// Restricts `l_r` to S and to R/I, patches back, and matches the result
/// with `l_r` by `c·L_R = h·L'` where `(h) = L_R·S` and `c` is the clearing
/// element.
pub fn patch_restrict_roundtrip(
    sq: &ConductorSquare,
    l_r: &FracIdeal,
    cap: u32,
) -> Result<Certificate> {
    let (r, s, smi) = (sq.r(), sq.s(), &sq.s_mod_i);
    if l_r.ambient != *r {
        return Err(AlgebraError::Precondition(
            "L_R is not an ideal of R".into(),
        ));
    }
    require_witness(l_r, "L_R")?;
    let base = s.base();
    let mut cert = Certificate::new(format!(
        "({}) survives restriction and patching",
        l_r.render().join(", ")
    ));
    if !s.relations().generators().is_empty() {
        cert.notes
            .push("restriction to S is only trivialized over polynomial rings".into());
        return Ok(cert);
    }
    let images = l_r
        .generators
        .iter()
        .map(|g| sq.map.apply(g))
        .collect::<Result<Vec<_>>>()?;
    let ext = reduced_ideal(s, &images)?;
    if ext.len() != 1 {
        cert.notes
            .push("extension to S is not visibly principal".into());
        return Ok(cert);
    }
    let h = ext[0].clone();
    let lifted = images
        .iter()
        .map(|x| {
            divide_exact(x, &h)
                .ok_or_else(|| AlgebraError::Invalid("inexact division by the S-generator".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(r_std) = sq.r_mod_i.standard_monomials(FINITE_LIMIT)? else {
        return Err(AlgebraError::Unsupported(
            "R/I is not finite-dimensional below the limit".into(),
        ));
    };
    let mut w = Vec::new();
    for m in &r_std {
        for j in &lifted {
            w.push(smi.mul(&sq.bar.apply(&mono(base, m))?, j)?);
        }
    }
    let f = CoeffField(base);
    let w_rows: Vec<Vec<Polynomial>> = w.iter().map(|x| vec![x.clone()]).collect();
    let w_dim = linalg::rank(&f, matrix(&w_rows));
    let mut phi = None;
    for cand in lifted
        .iter()
        .map(|x| smi.reduce(x))
        .chain(w.iter().cloned().map(Ok))
    {
        let cand = cand?;
        if cand.is_zero() || !is_unit(smi, &cand)? {
            continue;
        }
        let span: Vec<Vec<Polynomial>> = r_std
            .iter()
            .map(|m| Ok(vec![smi.mul(&cand, &sq.bar.apply(&mono(base, m))?)?]))
            .collect::<Result<_>>()?;
        if linalg::rank(&f, matrix(&span)) == w_dim {
            phi = Some(cand);
            break;
        }
    }
    let Some(phi) = phi else {
        cert.notes.push("no unit generates the image in S/I".into());
        return Ok(cert);
    };
    let patched = milnor_patch(
        sq,
        &FracIdeal::unit(s)?,
        &FracIdeal::unit(&sq.r_mod_i)?,
        &phi,
        cap,
    )?;
    let c_r = sq
        .pull_back(sq.clearing_element())?
        .ok_or_else(|| AlgebraError::Invalid("clearing element is not in R".into()))?;
    let left = l_r
        .generators
        .iter()
        .map(|g| r.mul(&c_r, g))
        .collect::<Result<Vec<_>>>()?;
    let mut right = Vec::new();
    for g in &patched.ideal.generators {
        let x = s.mul(&h, &sq.map.apply(g)?)?;
        match sq.member_obligation(&x)? {
            Some((e, ob)) => {
                cert.obligations.push(ob);
                right.push(e);
            }
            None => {
                cert.verdict = Verdict::Refuted;
                cert.obligations = vec![Obligation::NotInSubalgebra {
                    ring: s.spec(),
                    generators: sq.oracle.generators().iter().map(|g| s.render(g)).collect(),
                    element: s.render(&x),
                }];
                return Ok(cert);
            }
        }
    }
    let ok = containment(r, &left, &right, &mut cert)? && containment(r, &right, &left, &mut cert)?;
    cert.verdict = if ok {
        Verdict::Proved
    } else {
        Verdict::Refuted
    };
    cert.witness = json!({
        "h": s.render(&h),
        "phi": smi.render(&phi),
        "c": r.render(&c_r),
        "patched": patched.ideal.render(),
    });
    cert.parts.push(patched.invertible);
    Ok(cert)
}

/// Units of a finite algebra, as normal forms.
pub fn units(alg: &FpAlgebra) -> Result<Vec<Polynomial>> {
    let Some(elems) = alg.elements(FINITE_LIMIT)? else {
        return Err(AlgebraError::Unsupported(
            "ring is too large to enumerate".into(),
        ));
    };
    let mut out = Vec::new();
    for e in elems {
        if !e.is_zero() && is_unit(alg, &e)? {
            out.push(e);
        }
    }
    Ok(out)
}

/// Values of an element of `k[t]/(t² - 1)` at `t = 1` and `t = -1`, as
/// residues mod `p`.
pub fn branch_values(x: &Polynomial, p: u64) -> Option<(u64, u64)> {
    let one = BigRational::from_integer(1.into());
    let a = x.evaluate_rational(std::slice::from_ref(&one));
    let b = x.evaluate_rational(&[-one]);
    let m = |q: BigRational| -> Option<u64> {
        let v = CoeffRing::PrimeField(p).normalize(q).ok()?;
        v.to_integer().to_u64()
    };
    Some((m(a)?, m(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::replay;

    fn f(p: u64) -> CoeffRing {
        CoeffRing::PrimeField(p)
    }

    fn node() -> ConductorSquare {
        let r = FpAlgebra::parse(f(5), &["x", "y"], &["y^2 - x^3 - x^2"]).unwrap();
        let s = FpAlgebra::polynomial_ring(f(5), &["t"]);
        let map = RingMap::parse(&r, &s, &["t^2 - 1", "t^3 - t"]).unwrap();
        conductor(&map, None, 4).unwrap()
    }

    fn phi(sq: &ConductorSquare, a: i64, b: i64) -> Polynomial {
        // a·(1 + t)/2 + b·(1 - t)/2
        sq.s_mod_i()
            .element(&format!("3*{a}*(1 + t) + 3*{b}*(1 - t)"))
            .unwrap()
    }

    #[test]
    fn nodal_conductor() {
        let sq = node();
        let s = sq.s();
        assert_eq!(
            sq.ideal_in_s()
                .iter()
                .map(|g| s.render(g))
                .collect::<Vec<_>>(),
            vec!["t^2 + 4"]
        );
        let r_gens = FracIdeal::new(sq.r(), sq.ideal_in_r()).unwrap();
        assert!(r_gens
            .same_ideal(&FracIdeal::parse(sq.r(), &["x", "y"]).unwrap())
            .unwrap());
        assert_eq!(
            sq.r_mod_i().standard_monomials(10).unwrap().unwrap().len(),
            1
        );
        assert_eq!(
            sq.s_mod_i().standard_monomials(10).unwrap().unwrap().len(),
            2
        );
        assert!(sq.certificate.is_proved());
        replay(&sq.certificate).unwrap();
    }

    #[test]
    fn cusp_conductor() {
        let r = FpAlgebra::parse(f(3), &["x", "y"], &["y^2 - x^3"]).unwrap();
        let s = FpAlgebra::polynomial_ring(f(3), &["t"]);
        let map = RingMap::parse(&r, &s, &["t^2", "t^3"]).unwrap();
        let sq = conductor(&map, None, 4).unwrap();
        let got = FracIdeal::new(&s, sq.ideal_in_s()).unwrap();
        assert!(got
            .same_ideal(&FracIdeal::parse(&s, &["t^2", "t^3"]).unwrap())
            .unwrap());
        assert!(sq.certificate.is_proved());
        replay(&sq.certificate).unwrap();
    }

    #[test]
    fn trivial_extension_has_unit_conductor() {
        let s = FpAlgebra::polynomial_ring(f(5), &["t"]);
        let sq = conductor(&RingMap::identity(&s), None, 3).unwrap();
        assert!(FracIdeal::new(&s, sq.ideal_in_s())
            .unwrap()
            .is_unit_ideal()
            .unwrap());
    }

    #[test]
    fn non_reduced_rejected() {
        let r = FpAlgebra::polynomial_ring(f(5), &[]);
        let s = FpAlgebra::parse(f(5), &["t"], &["t^2"]).unwrap();
        let map = RingMap::new(r, s, vec![]).unwrap();
        assert!(matches!(
            conductor(&map, None, 2),
            Err(AlgebraError::NotReduced(_))
        ));
    }

    #[test]
    fn maximal_ideal_of_node_is_not_invertible() {
        let sq = node();
        let m = FracIdeal::parse(sq.r(), &["x", "y"]).unwrap();
        assert!(m.find_inverse().unwrap().is_none());
        let x = FracIdeal::parse(sq.r(), &["x"])
            .unwrap()
            .find_inverse()
            .unwrap()
            .unwrap();
        replay(&x.replay_witness().unwrap()).unwrap();
    }

    #[test]
    fn trivial_gluing_is_free() {
        let sq = node();
        let one = sq.s_mod_i().one().unwrap();
        let out = milnor_patch(
            &sq,
            &FracIdeal::unit(sq.s()).unwrap(),
            &FracIdeal::unit(sq.r_mod_i()).unwrap(),
            &one,
            4,
        )
        .unwrap();
        assert!(out.principal.is_proved());
        assert_eq!(sq.r().render(out.generator.as_ref().unwrap()), "x");
    }

    #[test]
    fn unequal_branch_units_glue_non_principal() {
        let sq = node();
        let ls = FracIdeal::unit(sq.s()).unwrap();
        let lri = FracIdeal::unit(sq.r_mod_i()).unwrap();
        let out = milnor_patch(&sq, &ls, &lri, &phi(&sq, 1, 2), 4).unwrap();
        assert!(out.invertible.is_proved());
        assert!(out.principal.is_refuted());
        replay(&out.invertible).unwrap();
        replay(&out.principal).unwrap();
        let rt = patch_restrict_roundtrip(&sq, &out.ideal, 4).unwrap();
        assert!(rt.is_proved(), "{rt:?}");
        replay(&rt).unwrap();
        let same = milnor_patch(&sq, &ls, &lri, &phi(&sq, 3, 3), 4).unwrap();
        assert!(same.principal.is_proved());
    }

    #[test]
    fn roundtrip_of_free_and_missing_witness() {
        let sq = node();
        let rt = patch_restrict_roundtrip(&sq, &FracIdeal::unit(sq.r()).unwrap(), 4).unwrap();
        assert!(rt.is_proved());
        assert_eq!(rt.witness["phi"], "1");
        let bare = FracIdeal::parse(sq.r(), &["x"]).unwrap();
        assert!(matches!(
            patch_restrict_roundtrip(&sq, &bare, 4),
            Err(AlgebraError::Precondition(_))
        ));
    }

    #[test]
    fn branch_values_of_phi() {
        let sq = node();
        assert_eq!(branch_values(&phi(&sq, 1, 2), 5), Some((1, 2)));
        assert_eq!(units(sq.s_mod_i()).unwrap().len(), 16);
    }

    #[test]
    fn pic_of_nodal_cubic_has_four_classes() {
        let sq = node();
        let ls = FracIdeal::unit(sq.s()).unwrap();
        let lri = FracIdeal::unit(sq.r_mod_i()).unwrap();
        let (mut principal, mut other) = (0, 0);
        for u in units(sq.s_mod_i()).unwrap() {
            let out = milnor_patch(&sq, &ls, &lri, &u, 4).unwrap();
            assert!(out.invertible.is_proved());
            let (a, b) = branch_values(&u, 5).unwrap();
            match out.principal.verdict {
                Verdict::Proved => {
                    assert_eq!(a, b);
                    principal += 1
                }
                Verdict::Refuted => {
                    assert_ne!(a, b);
                    other += 1
                }
                Verdict::Inconclusive => panic!("undecided gluing ({a}, {b})"),
            }
        }
        assert_eq!((principal, other), (4, 12));
    }
}
