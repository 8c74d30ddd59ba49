//! Fiber products `A = B ×_{B_ℚ} A_ℚ` of an algebra B over ℤ₍ₚ₎ with a
//! subalgebra of its generic fiber, virtual fiber rings of pairs, and
//! equalizer subrings.
//!
//! A is never built as a presentation: it is reached through membership,
//! through lattices `A ∩ B_{≤d}` over the valuation ring, and through
//! generator lists certified up to a degree cap.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::algebra::{FpAlgebra, Membership, RingMap, SubalgebraOracle};
use crate::certificate::{Certificate, Obligation, Verdict};
use crate::coeff::{int, is_prime, CoeffRing};
use crate::error::{AlgebraError, Result};
use crate::linalg::{self, primitive_integer_row, CoeffField, Lattice, PAdic, TAdic, ValuedField};
use crate::monomial::Monomial;
use crate::par::{self, Exec};
use crate::poly::Polynomial;
use crate::ratfunc::{RatFunc, UPoly};
use crate::univhomeo::{find_chain, ChainCaps, UhCertificate};

/// How the valuation ring of the fiber product is cut out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uniformizer {
    /// B is defined over ℤ₍ₚ₎.
    Prime(u64),
    /// B is a ℚ-algebra with a distinguished variable t, standing in for
    /// ℚ[t] with ℚ(t) as generic fiber.
    Param(usize),
}

/// `B`, its generic fiber `Bq`, and generators of `Aq ⊆ Bq`.
#[derive(Clone, Debug)]
pub struct FiberProductSpec {
    b: FpAlgebra,
    bq: FpAlgebra,
    aq: Vec<Polynomial>,
    core: Vec<Polynomial>,
    uniformizer: Uniformizer,
    oracle: SubalgebraOracle,
}

impl FiberProductSpec {
    /// B over ℤ₍ₚ₎ (or ℤ with `prime` given); `aq` are elements of `Bq`.
    pub fn new(b: &FpAlgebra, aq: &[Polynomial], prime: Option<u64>) -> Result<FiberProductSpec> {
        let p = match (b.base(), prime) {
            (CoeffRing::IntegerLocalizedAt(p), None) => p,
            (CoeffRing::IntegerLocalizedAt(p), Some(q)) if p == q => p,
            (CoeffRing::Integer, Some(q)) if is_prime(q) => q,
            (CoeffRing::Integer, Some(q)) => return Err(AlgebraError::NotPrime(q)),
            (base, _) => {
                return Err(AlgebraError::Unsupported(format!(
                    "fiber products need B over ZZ with a prime or over ZZ_(p), got {base}"
                )))
            }
        };
        let bq = b.base_change_to_q()?;
        let aq = aq
            .iter()
            .map(|g| bq.reduce(g))
            .collect::<Result<Vec<_>>>()?;
        let oracle = SubalgebraOracle::new(&bq, &aq)?;
        Ok(FiberProductSpec {
            b: b.clone(),
            bq,
            core: aq.clone(),
            aq,
            uniformizer: Uniformizer::Prime(p),
            oracle,
        })
    }

    /// Parses the generators of `Aq` in the variables of B.
    pub fn parse(b: &FpAlgebra, aq: &[&str], prime: Option<u64>) -> Result<FiberProductSpec> {
        let bq = b.base_change_to_q()?;
        let gens = aq
            .iter()
            .map(|s| bq.element(s))
            .collect::<Result<Vec<_>>>()?;
        FiberProductSpec::new(b, &gens, prime)
    }

    /// B = ℚ[t, …] with `param` = t; `aq` are elements of B generating `Aq`
    /// over ℚ(t). The generic fiber is realized as `B[s]/(s·t − 1)`.
    pub fn parametric(b: &FpAlgebra, param: &str, aq: &[Polynomial]) -> Result<FiberProductSpec> {
        if b.base() != CoeffRing::Rational || !b.relations().generators().is_empty() {
            return Err(AlgebraError::Unsupported(
                "parametric fiber products need a polynomial ring over QQ".into(),
            ));
        }
        let tv = b
            .vars()
            .iter()
            .position(|v| v == param)
            .ok_or_else(|| AlgebraError::Invalid(format!("unknown variable {param}")))?;
        let mut s = String::from("s");
        while b.vars().contains(&s) {
            s.push('_');
        }
        let mut vars: Vec<String> = b.vars().to_vec();
        vars.push(s.clone());
        let names: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
        let bq = FpAlgebra::parse(CoeffRing::Rational, &names, &[&format!("{s}*{param} - 1")])?;
        let n = b.nvars();
        let lift: Vec<usize> = (0..n).collect();
        let core = aq.iter().map(|g| b.reduce(g)).collect::<Result<Vec<_>>>()?;
        let mut gens: Vec<Polynomial> = core.iter().map(|g| g.remap_vars(n + 1, &lift)).collect();
        gens.push(Polynomial::var(CoeffRing::Rational, n + 1, tv));
        gens.push(Polynomial::var(CoeffRing::Rational, n + 1, n));
        let oracle = SubalgebraOracle::new(&bq, &gens)?;
        Ok(FiberProductSpec {
            b: b.clone(),
            bq,
            aq: gens,
            core,
            uniformizer: Uniformizer::Param(tv),
            oracle,
        })
    }

    pub fn b(&self) -> &FpAlgebra {
        &self.b
    }

    pub fn bq(&self) -> &FpAlgebra {
        &self.bq
    }

    /// Generators of `Aq` inside `Bq`.
    pub fn aq_generators(&self) -> &[Polynomial] {
        &self.aq
    }

    pub fn uniformizer(&self) -> Uniformizer {
        self.uniformizer
    }

    /// Image of an element of B in the generic fiber.
    pub fn to_bq(&self, b: &Polynomial) -> Result<Polynomial> {
        match self.uniformizer {
            Uniformizer::Prime(_) => self.bq.reduce(&b.reinterpret(CoeffRing::Rational)?),
            Uniformizer::Param(_) => {
                let lift: Vec<usize> = (0..self.b.nvars()).collect();
                self.bq.reduce(&b.remap_vars(self.bq.nvars(), &lift))
            }
        }
    }

    fn describe(&self) -> String {
        let gens: Vec<String> = self.core.iter().map(|g| self.b.render(g)).collect();
        let over = match self.uniformizer {
            Uniformizer::Prime(_) => "QQ".to_string(),
            Uniformizer::Param(t) => format!("QQ({})", self.b.vars()[t]),
        };
        format!(
            "{}[{}] x {over}[{}]",
            self.b.base(),
            self.b.vars().join(", "),
            gens.join(", ")
        )
    }
}

/// Membership of `b` in A, decided by membership of its image in `Aq`.
/// Membership over ℚ is insensitive to scaling, so `p·b ∈ A` implies `b ∈ A`.
pub fn fp_member(spec: &FiberProductSpec, b: &Polynomial) -> Result<Certificate> {
    let img = spec.to_bq(b)?;
    let mut cert = spec.oracle.certify(&img)?;
    cert.claim = format!("{} lies in {}", spec.b.render(b), spec.describe());
    Ok(cert)
}

/// Column layout for lattices in `B_{≤d}`: monomials in the lattice
/// variables (all but the parameter), highest degree first.
#[derive(Clone, Debug)]
struct Coords {
    nvars: usize,
    param: Option<usize>,
    cols: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Coords {
    fn new(nvars: usize, param: Option<usize>, d: u32) -> Coords {
        let nl = nvars - param.is_some() as usize;
        let mut cols = Vec::new();
        for k in (0..=d).rev() {
            for m in Monomial::of_degree(nl, k) {
                let mut e = m.exponents().to_vec();
                if let Some(t) = param {
                    e.insert(t, 0);
                }
                cols.push(Monomial::from_exponents(e));
            }
        }
        Coords::with_cols(nvars, param, cols)
    }

    fn with_cols(nvars: usize, param: Option<usize>, cols: Vec<Monomial>) -> Coords {
        let index = cols
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Coords {
            nvars,
            param,
            cols,
            index,
        }
    }

    /// Splits off the parameter exponent.
    fn strip(&self, m: &Monomial) -> (Monomial, usize) {
        match self.param {
            None => (m.clone(), 0),
            Some(t) => {
                let mut e = m.exponents().to_vec();
                let k = e[t];
                e[t] = 0;
                (Monomial::from_exponents(e), k as usize)
            }
        }
    }

    fn degree(&self, f: &Polynomial) -> u32 {
        f.terms()
            .map(|(m, _)| m.degree() - self.param.map_or(0, |t| m.exponents()[t]))
            .max()
            .unwrap_or(0)
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }
}

/// Valued fields whose lattices model `A ∩ B_{≤d}`.
trait LatticeField: ValuedField + Sync
where
    Self::Elem: Send + Sync,
{
    fn vector(&self, c: &Coords, f: &Polynomial) -> Result<Vec<Self::Elem>>;
    /// A polynomial over ℚ spanning the same `O`-line as `row`.
    fn polynomial(&self, c: &Coords, row: &[Self::Elem]) -> Result<Polynomial>;
}

fn column(c: &Coords, m: &Monomial) -> Result<usize> {
    c.index
        .get(m)
        .copied()
        .ok_or_else(|| AlgebraError::Invalid("monomial outside the degree window".into()))
}

impl LatticeField for PAdic {
    fn vector(&self, c: &Coords, f: &Polynomial) -> Result<Vec<BigRational>> {
        let mut v = vec![BigRational::zero(); c.ncols()];
        for (m, a) in f.terms() {
            v[column(c, m)?] = a.clone();
        }
        Ok(v)
    }

    fn polynomial(&self, c: &Coords, row: &[BigRational]) -> Result<Polynomial> {
        let prim = primitive_integer_row(row, self.0);
        Polynomial::from_terms(
            CoeffRing::Rational,
            c.nvars,
            c.cols
                .iter()
                .cloned()
                .zip(prim)
                .filter(|(_, a)| !a.is_zero()),
        )
    }
}

impl LatticeField for TAdic {
    fn vector(&self, c: &Coords, f: &Polynomial) -> Result<Vec<RatFunc>> {
        let mut acc: Vec<UPoly> = vec![UPoly::zero(); c.ncols()];
        for (m, a) in f.terms() {
            let (m0, k) = c.strip(m);
            let i = column(c, &m0)?;
            acc[i] = acc[i].add(&UPoly::monomial(a.clone(), k));
        }
        Ok(acc.into_iter().map(RatFunc::from_poly).collect())
    }

    fn polynomial(&self, c: &Coords, row: &[RatFunc]) -> Result<Polynomial> {
        let t = c.param.expect("t-adic lattices need a parameter");
        let mut den = UPoly::one();
        for a in row.iter().filter(|a| !a.is_zero()) {
            let g = den.gcd(a.den());
            den = den.mul(&a.den().div_rem(&g).0);
        }
        let nums: Vec<UPoly> = row
            .iter()
            .map(|a| {
                if a.is_zero() {
                    UPoly::zero()
                } else {
                    a.num().mul(&den.div_rem(a.den()).0)
                }
            })
            .collect();
        let all: Vec<BigRational> = nums
            .iter()
            .flat_map(|p| p.coeffs().iter().cloned())
            .filter(|a| !a.is_zero())
            .collect();
        let lcm = all.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let gcd = all.iter().fold(BigInt::zero(), |acc, a| {
            acc.gcd(&(a * BigRational::from_integer(lcm.clone())).to_integer())
        });
        let sign = match all.last() {
            Some(a) if a.is_negative() => -BigInt::one(),
            _ => BigInt::one(),
        };
        let scale = if gcd.is_zero() {
            BigRational::one()
        } else {
            BigRational::new(lcm * sign, gcd)
        };
        let mut terms = Vec::new();
        for (m, p) in c.cols.iter().zip(&nums) {
            for (k, a) in p.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    let mut e = m.exponents().to_vec();
                    e[t] += k as u32;
                    terms.push((Monomial::from_exponents(e), a * &scale));
                }
            }
        }
        Polynomial::from_terms(CoeffRing::Rational, c.nvars, terms)
    }
}

/// All products of `gens` (with their degrees) of total degree ≤ d,
/// starting with 1.
fn products(gens: &[(Polynomial, u32)], one: &Polynomial, d: u32) -> Result<Vec<Polynomial>> {
    fn rec(
        gens: &[(Polynomial, u32)],
        start: usize,
        rem: u32,
        cur: &Polynomial,
        out: &mut Vec<Polynomial>,
    ) -> Result<()> {
        out.push(cur.clone());
        for i in start..gens.len() {
            let (g, dg) = &gens[i];
            if *dg > 0 && *dg <= rem {
                rec(gens, i, rem - dg, &cur.checked_mul(g)?, out)?;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(gens, 0, d, one, &mut out)?;
    Ok(out)
}

fn with_degrees(c: &Coords, gens: &[Polynomial]) -> Vec<(Polynomial, u32)> {
    gens.iter()
        .map(|g| (g.clone(), c.degree(g)))
        .filter(|(_, d)| *d > 0)
        .collect()
}

/// `A ∩ B_{≤d}` as a lattice: saturation of the span of `Aq`-products.
fn fiber_lattice<F: LatticeField>(
    f: &F,
    c: &Coords,
    aq: &[Polynomial],
    d: u32,
) -> Result<Lattice<F>>
where
    F::Elem: Send + Sync,
{
    let one = Polynomial::one(CoeffRing::Rational, c.nvars);
    let prods = products(&with_degrees(c, aq), &one, d)?;
    let rows = prods
        .iter()
        .map(|p| f.vector(c, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Lattice::saturation(f, c.ncols(), rows))
}

struct Discovery {
    generators: Vec<Polynomial>,
    ranks: Vec<usize>,
    spanning: Vec<Polynomial>,
}

fn discover<F: LatticeField>(
    f: &F,
    nvars: usize,
    param: Option<usize>,
    aq: &[Polynomial],
    cap: u32,
    exec: Exec,
) -> Result<Discovery>
where
    F::Elem: Send + Sync,
{
    let one = Polynomial::one(CoeffRing::Rational, nvars);
    let mut gens: Vec<Polynomial> = Vec::new();
    let mut ranks = Vec::new();
    let mut spanning = Vec::new();
    for d in 1..=cap {
        let c = Coords::new(nvars, param, d);
        let l = fiber_lattice(f, &c, aq, d)?;
        ranks.push(l.rank());
        let module = |gens: &[Polynomial]| -> Result<Lattice<F>> {
            let rows = products(&with_degrees(&c, gens), &one, d)?
                .iter()
                .map(|p| f.vector(&c, p))
                .collect::<Result<Vec<_>>>()?;
            Ok(Lattice::span(f, c.ncols(), rows))
        };
        let mut m = module(&gens)?;
        let rows = l.rows();
        let mut i = 0;
        while i < rows.len() {
            let inside = par::map(exec, &rows[i..], |r| m.contains(f, r));
            match inside.iter().position(|b| !b) {
                None => break,
                Some(j) => {
                    gens.push(f.polynomial(&c, &rows[i + j])?);
                    m = module(&gens)?;
                    i += j + 1;
                }
            }
        }
        if d == cap {
            spanning = rows
                .iter()
                .map(|r| f.polynomial(&c, r))
                .collect::<Result<Vec<_>>>()?;
        }
    }
    Ok(Discovery {
        generators: gens,
        ranks,
        spanning,
    })
}

/// Generators of A found up to a degree cap, with the completeness
/// certificate.
#[derive(Clone, Debug)]
pub struct FpGenerators {
    /// Elements of B.
    pub generators: Vec<Polynomial>,
    /// Rank of `A ∩ B_{≤d}` for `d = 1..=cap`.
    pub lattice_ranks: Vec<usize>,
    pub certificate: Certificate,
}

fn polynomial_b(spec: &FiberProductSpec) -> Result<()> {
    if !spec.b.relations().generators().is_empty() {
        return Err(AlgebraError::Unsupported(
            "generator discovery needs B to be a polynomial ring".into(),
        ));
    }
    Ok(())
}

/// Discovers generators of A degree by degree: the lattice `A ∩ B_{≤d}`
/// is compared with the span of products of the generators found so far,
/// and each missing lattice row becomes a generator.
pub fn fp_generators(spec: &FiberProductSpec, cap: u32) -> Result<FpGenerators> {
    fp_generators_with(spec, cap, Exec::default())
}

pub fn fp_generators_with(spec: &FiberProductSpec, cap: u32, exec: Exec) -> Result<FpGenerators> {
    polynomial_b(spec)?;
    let n = spec.b.nvars();
    let (disc, local) = match spec.uniformizer {
        Uniformizer::Prime(p) => {
            let aq: Vec<Polynomial> = spec.core.clone();
            let local = if spec.b.base() == CoeffRing::Integer {
                spec.b.localize_at(p)?
            } else {
                spec.b.clone()
            };
            (discover(&PAdic(p), n, None, &aq, cap, exec)?, Some(local))
        }
        Uniformizer::Param(t) => (discover(&TAdic, n, Some(t), &spec.core, cap, exec)?, None),
    };
    let base = spec.b.base();
    let generators = disc
        .generators
        .iter()
        .map(|g| g.reinterpret(base))
        .collect::<Result<Vec<_>>>()?;
    let rendered: Vec<String> = generators.iter().map(|g| spec.b.render(g)).collect();
    let mut cert = Certificate::new(format!(
        "every element of {} of degree <= {cap} is generated by the listed elements",
        spec.describe()
    ))
    .with_cap("degree_cap", cap as u64);
    cert.witness = json!({
        "generators": rendered,
        "lattice_ranks": disc.ranks,
        "spanning_set": disc.spanning.len(),
    });
    for g in &generators {
        cert.parts.push(fp_member(spec, g)?);
    }
    match local {
        Some(local) => {
            let gl = generators.iter().map(|g| g.reinterpret(local.base())).collect::<Result<Vec<_>>>()?;
            let oracle = SubalgebraOracle::new(&local, &gl)?;
            let mut complete = true;
            for s in &disc.spanning {
                let c = oracle.certify(&s.reinterpret(local.base())?)?;
                if c.is_proved() {
                    cert.obligations.extend(c.obligations);
                } else {
                    complete = false;
                    cert.notes.push(format!("{} not reached by the generators", local.render(s)));
                }
            }
            if complete {
                cert.verdict = Verdict::Proved;
            }
        }
        None => cert.notes.push(
            "completeness over the local ring at the parameter was checked by lattice membership only".into(),
        ),
    }
    Ok(FpGenerators {
        generators,
        lattice_ranks: disc.ranks,
        certificate: cert,
    })
}

/// Per-layer data of the ladder `A / (xB ∩ A)` in degree k.
#[derive(Clone, Debug)]
struct Layer {
    /// Minimal valuation of the `yᵏ`-coefficient over `A ∩ B_{≤k}`.
    valuation: Option<i64>,
    /// An element of A whose image modulo x is `π^v·yᵏ` (when found).
    clean: Option<Polynomial>,
    /// An element of A realizing the minimal valuation.
    witness: Option<Polynomial>,
}

fn ladder_layer<F: LatticeField>(
    f: &F,
    nvars: usize,
    param: Option<usize>,
    aq: &[Polynomial],
    k: u32,
    x: usize,
    y: usize,
) -> Result<Layer>
where
    F::Elem: Send + Sync,
{
    let base = Coords::new(nvars, param, k);
    let yk = Monomial::from_exponents((0..nvars).map(|i| if i == y { k } else { 0 }).collect());
    let (mut front, mut back): (Vec<Monomial>, Vec<Monomial>) = base
        .cols
        .iter()
        .filter(|&m| *m != yk)
        .cloned()
        .partition(|m| m.exponents()[x] == 0);
    front.push(yk.clone());
    front.append(&mut back);
    let c = Coords::with_cols(nvars, param, front);
    let col = c.index[&yk];
    let l = fiber_lattice(f, &c, aq, k)?;
    let valuation = l.column_valuation(f, col);
    let witness = match valuation {
        Some(v) => {
            let r = l
                .rows()
                .iter()
                .find(|r| !f.is_zero(&r[col]) && f.valuation(&r[col]) == v)
                .expect("row with minimal valuation");
            Some(f.polynomial(&c, r)?)
        }
        None => None,
    };
    let clean = match l.pivots().iter().position(|&p| p == col) {
        Some(i) => Some(f.polynomial(&c, &l.rows()[i])?),
        None => None,
    };
    Ok(Layer {
        valuation,
        clean,
        witness,
    })
}

/// Certifies the generator ladder of `A / (xB ∩ A)`: for every `k ≤ depth`
/// the `yᵏ`-coefficients of A have minimal valuation exactly 1, realized by
/// `π·yᵏ`, which is not generated by `π` and the earlier `π·yʲ`. A layer
/// where `yᵏ` itself is reached refutes the ladder.
pub fn fp_nonfg_witness(
    spec: &FiberProductSpec,
    depth: u32,
    x: &str,
    y: &str,
) -> Result<Certificate> {
    polynomial_b(spec)?;
    let b = &spec.b;
    let pos = |v: &str| {
        b.vars()
            .iter()
            .position(|w| w == v)
            .ok_or_else(|| AlgebraError::Invalid(format!("unknown variable {v}")))
    };
    let (xi, yi) = (pos(x)?, pos(y)?);
    let n = b.nvars();
    let (pi_text, quotient) = match spec.uniformizer {
        Uniformizer::Prime(p) => (
            p.to_string(),
            FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(p), &[y]),
        ),
        Uniformizer::Param(t) => {
            let tn = b.vars()[t].clone();
            (
                tn.clone(),
                FpAlgebra::polynomial_ring(CoeffRing::Rational, &[tn.as_str(), y]),
            )
        }
    };
    let mod_x = {
        let names: Vec<&str> = b.vars().iter().map(|v| v.as_str()).collect();
        FpAlgebra::parse(b.base(), &names, &[x])?
    };
    let mut cert = Certificate::new(format!(
        "{}: the layers {pi_text}*{y}^k of A modulo {x} are new for k <= {depth}",
        spec.describe()
    ))
    .with_cap("depth", depth as u64);
    let mut valuations = Vec::new();
    let mut ladder: Vec<String> = Vec::new();
    let mut verdict = Verdict::Proved;
    for k in 1..=depth {
        let layer = match spec.uniformizer {
            Uniformizer::Prime(p) => ladder_layer(&PAdic(p), n, None, &spec.core, k, xi, yi)?,
            Uniformizer::Param(t) => ladder_layer(&TAdic, n, Some(t), &spec.core, k, xi, yi)?,
        };
        valuations.push(layer.valuation);
        let mut part = Certificate::new(format!(
            "layer {k}: {pi_text}*{y}^{k} is a new generator modulo {x}"
        ));
        match (layer.valuation, layer.clean, layer.witness) {
            (Some(1), Some(clean), _) => {
                let clean = clean.reinterpret(b.base())?;
                let image = mod_x.reduce(&clean.reinterpret(mod_x.base())?)?;
                let member = fp_member(spec, &clean)?;
                let image_q = quotient.element(&mod_x.render(&image))?;
                let lower: Vec<String> = std::iter::once(pi_text.clone())
                    .chain(ladder.iter().cloned())
                    .collect();
                let lower_p = lower
                    .iter()
                    .map(|s| quotient.element(s))
                    .collect::<Result<Vec<_>>>()?;
                let fresh = SubalgebraOracle::new(&quotient, &lower_p)?.certify(&image_q)?;
                part.witness = json!({ "k": k, "lift": b.render(&clean), "image": mod_x.render(&image), "valuation": 1 });
                part.obligations.push(Obligation::Zero {
                    ring: mod_x.spec(),
                    expr: format!("({}) - ({})", b.render(&clean), mod_x.render(&image)),
                });
                part.obligations.extend(member.obligations.iter().cloned());
                part.obligations.extend(fresh.obligations.iter().cloned());
                part.notes.push(format!(
                    "no element of A of degree <= {k} has a {y}^{k}-coefficient of valuation 0 (lattice computation)"
                ));
                part.verdict = if member.is_proved() && fresh.is_refuted() {
                    Verdict::Proved
                } else {
                    Verdict::Inconclusive
                };
                ladder.push(quotient.render(&image_q));
            }
            (Some(v), _, Some(w)) if v <= 0 => {
                let w = w.reinterpret(b.base())?;
                let image = mod_x.reduce(&w.reinterpret(mod_x.base())?)?;
                let member = fp_member(spec, &w)?;
                part.witness = json!({ "k": k, "lift": b.render(&w), "image": mod_x.render(&image), "valuation": v });
                part.notes.push(format!(
                    "{y}^{k} has a unit coefficient in the image of A, so the ladder collapses"
                ));
                part.obligations.extend(member.obligations.iter().cloned());
                part.obligations.push(Obligation::Zero {
                    ring: mod_x.spec(),
                    expr: format!("({}) - ({})", b.render(&w), mod_x.render(&image)),
                });
                part.verdict = if member.is_proved() {
                    Verdict::Refuted
                } else {
                    Verdict::Inconclusive
                };
            }
            (v, _, _) => {
                part.notes.push(format!(
                    "minimal valuation {v:?} of the {y}^{k}-coefficient"
                ));
            }
        }
        let pv = part.verdict;
        cert.parts.push(part);
        match pv {
            Verdict::Proved => {}
            Verdict::Refuted => {
                verdict = Verdict::Refuted;
                break;
            }
            Verdict::Inconclusive => {
                verdict = Verdict::Inconclusive;
                break;
            }
        }
    }
    cert.verdict = verdict;
    cert.witness = json!({ "ladder": ladder, "valuations": valuations });
    Ok(cert)
}

/// Chain search for `A ⊆ B` with A truncated to the generators found up to
/// `cap`. A chain proves the claim; since A is truncated, a point
/// obstruction for the truncation says nothing about A and is kept as a
/// note only.
pub fn fp_verify_uh(spec: &FiberProductSpec, cap: u32, caps: &ChainCaps) -> Result<UhCertificate> {
    let gens = fp_generators(spec, cap)?;
    let (ambient, subring, caps) = match spec.uniformizer {
        Uniformizer::Prime(p) => {
            let local = if spec.b.base() == CoeffRing::Integer {
                spec.b.localize_at(p)?
            } else {
                spec.b.clone()
            };
            let sub = gens
                .generators
                .iter()
                .map(|g| g.reinterpret(local.base()))
                .collect::<Result<Vec<_>>>()?;
            (local, sub, caps.clone().with_primes(&[p]))
        }
        Uniformizer::Param(t) => {
            let mut sub = vec![Polynomial::var(CoeffRing::Rational, spec.b.nvars(), t)];
            sub.extend(gens.generators.iter().cloned());
            (spec.b.clone(), sub, caps.clone())
        }
    };
    let mut uh = find_chain(&ambient, &subring, &[], &caps)?;
    uh.certificate.claim = format!(
        "{} -> B is a universal homeomorphism (A cut at degree {cap})",
        spec.describe()
    );
    uh.certificate
        .caps
        .insert("generator_cap".into(), cap as u64);
    if uh.verdict() == Verdict::Refuted {
        uh.certificate.verdict = Verdict::Inconclusive;
        uh.certificate.notes.push(format!(
            "the truncation of A at degree {cap} is separated by points; this does not bound A itself"
        ));
    }
    Ok(uh)
}

/// An element `(a, c)` of `A ×_B C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pair {
    pub a: Polynomial,
    pub c: Polynomial,
}

/// The fiber product of `f: A → B` and `g: C → B`, accessed pairwise.
#[derive(Clone, Debug)]
pub struct FiberRing {
    f: RingMap,
    g: RingMap,
}

/// Multiplication table of a finite fiber ring.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicationTable {
    pub elements: Vec<String>,
    /// `table[i][j]` is the index of `elements[i] * elements[j]`.
    pub table: Vec<Vec<usize>>,
}

impl FiberRing {
    pub fn new(f: RingMap, g: RingMap) -> Result<FiberRing> {
        if f.target() != g.target() {
            return Err(AlgebraError::Invalid("maps must share their target".into()));
        }
        Ok(FiberRing { f, g })
    }

    pub fn a(&self) -> &FpAlgebra {
        self.f.source()
    }

    pub fn c(&self) -> &FpAlgebra {
        self.g.source()
    }

    pub fn is_compatible(&self, a: &Polynomial, c: &Polynomial) -> Result<bool> {
        Ok(self.f.apply(a)? == self.g.apply(c)?)
    }

    /// The pair `(a, c)`; fails unless `f(a) = g(c)`.
    pub fn pair(&self, a: &Polynomial, c: &Polynomial) -> Result<Pair> {
        let a = self.a().reduce(a)?;
        let c = self.c().reduce(c)?;
        if !self.is_compatible(&a, &c)? {
            return Err(AlgebraError::Precondition(format!(
                "({}, {}) is not a compatible pair",
                self.a().render(&a),
                self.c().render(&c)
            )));
        }
        Ok(Pair { a, c })
    }

    pub fn parse_pair(&self, a: &str, c: &str) -> Result<Pair> {
        self.pair(&self.a().element(a)?, &self.c().element(c)?)
    }

    pub fn zero(&self) -> Pair {
        Pair {
            a: self.a().zero(),
            c: self.c().zero(),
        }
    }

    pub fn one(&self) -> Result<Pair> {
        Ok(Pair {
            a: self.a().one()?,
            c: self.c().one()?,
        })
    }

    pub fn add(&self, x: &Pair, y: &Pair) -> Result<Pair> {
        Ok(Pair {
            a: self.a().add(&x.a, &y.a)?,
            c: self.c().add(&x.c, &y.c)?,
        })
    }

    pub fn sub(&self, x: &Pair, y: &Pair) -> Result<Pair> {
        Ok(Pair {
            a: self.a().sub(&x.a, &y.a)?,
            c: self.c().sub(&x.c, &y.c)?,
        })
    }

    pub fn mul(&self, x: &Pair, y: &Pair) -> Result<Pair> {
        Ok(Pair {
            a: self.a().mul(&x.a, &y.a)?,
            c: self.c().mul(&x.c, &y.c)?,
        })
    }

    pub fn neg(&self, x: &Pair) -> Result<Pair> {
        self.sub(&self.zero(), x)
    }

    pub fn render(&self, x: &Pair) -> String {
        format!("({}, {})", self.a().render(&x.a), self.c().render(&x.c))
    }

    /// All compatible pairs when A and C are finite with at most `limit`
    /// elements each.
    pub fn elements(&self, limit: usize) -> Result<Option<Vec<Pair>>> {
        let (Some(aa), Some(cc)) = (self.a().elements(limit)?, self.c().elements(limit)?) else {
            return Ok(None);
        };
        let fa = aa
            .iter()
            .map(|a| self.f.apply(a))
            .collect::<Result<Vec<_>>>()?;
        let gc = cc
            .iter()
            .map(|c| self.g.apply(c))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for (a, ia) in aa.iter().zip(&fa) {
            for (c, ic) in cc.iter().zip(&gc) {
                if ia == ic {
                    out.push(Pair {
                        a: a.clone(),
                        c: c.clone(),
                    });
                }
            }
        }
        Ok(Some(out))
    }

    pub fn multiplication_table(&self, limit: usize) -> Result<Option<MultiplicationTable>> {
        let Some(els) = self.elements(limit)? else {
            return Ok(None);
        };
        let index: HashMap<&Pair, usize> = els.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut table = Vec::with_capacity(els.len());
        for x in &els {
            let mut row = Vec::with_capacity(els.len());
            for y in &els {
                let z = self.mul(x, y)?;
                row.push(
                    *index.get(&z).ok_or_else(|| {
                        AlgebraError::Invalid("product left the fiber ring".into())
                    })?,
                );
            }
            table.push(row);
        }
        Ok(Some(MultiplicationTable {
            elements: els.iter().map(|p| self.render(p)).collect(),
            table,
        }))
    }

    /// Exhaustive check of closure and the commutative ring axioms.
    pub fn check_ring_axioms(&self, limit: usize) -> Result<Certificate> {
        let mut cert = Certificate::new(format!(
            "{} x {} is a commutative ring under pairwise operations",
            self.a().spec().base,
            self.c().spec().base
        ));
        let Some(els) = self.elements(limit)? else {
            cert.notes
                .push(format!("not finite within {limit} elements"));
            return Ok(cert);
        };
        let one = self.one()?;
        let zero = self.zero();
        let mut ok = els.contains(&one) && els.contains(&zero);
        'outer: for x in &els {
            ok &= els.contains(&self.neg(x)?)
                && self.add(x, &zero)? == *x
                && self.mul(x, &one)? == *x;
            for y in &els {
                let s = self.add(x, y)?;
                let p = self.mul(x, y)?;
                ok &= els.contains(&s) && els.contains(&p);
                ok &= s == self.add(y, x)? && p == self.mul(y, x)?;
                for z in &els {
                    ok &= self.mul(&p, z)? == self.mul(x, &self.mul(y, z)?)?;
                    ok &= self.add(&s, z)? == self.add(x, &self.add(y, z)?)?;
                    ok &= self.mul(x, &self.add(y, z)?)? == self.add(&p, &self.mul(x, z)?)?;
                }
                if !ok {
                    break 'outer;
                }
            }
        }
        cert.witness = json!({ "size": els.len() });
        cert.verdict = if ok {
            Verdict::Proved
        } else {
            Verdict::Refuted
        };
        for x in &els {
            cert.obligations.push(Obligation::Zero {
                ring: self.f.target().spec(),
                expr: format!("({}) - ({})", self.f.expand(&x.a), self.g.expand(&x.c)),
            });
        }
        cert.notes
            .push("closure and axioms checked on all element triples".into());
        Ok(cert)
    }

    /// A pair `m` with `m·generator = target`, or `None` if none exists.
    /// Decided by enumeration for finite rings, and by linear algebra when A
    /// is ℤ and both B and C are finite-dimensional over ℚ.
    pub fn principal_multiplier(
        &self,
        generator: &Pair,
        target: &Pair,
        limit: usize,
    ) -> Result<Option<Pair>> {
        if let Some(els) = self.elements(limit)? {
            for m in els {
                if self.mul(&m, generator)? == *target {
                    return Ok(Some(m));
                }
            }
            return Ok(None);
        }
        let a = self.a();
        let b = self.f.target();
        let c = self.c();
        if a.nvars() != 0
            || a.base() != CoeffRing::Integer
            || !a.relations().generators().is_empty()
        {
            return Err(AlgebraError::Unsupported(
                "principal ideals need A = ZZ or finite rings".into(),
            ));
        }
        let (Some(bb), Some(cb)) = (b.standard_monomials(limit)?, c.standard_monomials(limit)?)
        else {
            return Err(AlgebraError::Unsupported(
                "B and C must be finite-dimensional".into(),
            ));
        };
        let coords = |basis: &[Monomial], f: &Polynomial| -> Vec<BigRational> {
            basis.iter().map(|m| f.coeff(m)).collect()
        };
        let n = cb.len();
        // Unknowns: coordinates of c, then α = a.
        let mut eqs: Vec<Vec<BigRational>> = Vec::new();
        let mono = |m: &Monomial| Polynomial::one(c.base(), c.nvars()).mul_term(m, &int(1));
        let cols_c: Vec<Vec<BigRational>> = cb
            .iter()
            .map(|m| Ok(coords(&cb, &c.mul(&mono(m), &generator.c)?)))
            .collect::<Result<_>>()?;
        let rhs_c = coords(&cb, &target.c);
        for r in 0..cb.len() {
            let mut row: Vec<BigRational> = cols_c.iter().map(|col| col[r].clone()).collect();
            row.push(BigRational::zero());
            row.push(rhs_c[r].clone());
            eqs.push(row);
        }
        let cols_b: Vec<Vec<BigRational>> = cb
            .iter()
            .map(|m| Ok(coords(&bb, &self.g.apply(&mono(m))?)))
            .collect::<Result<_>>()?;
        let one_b = coords(&bb, &b.one()?);
        for r in 0..bb.len() {
            let mut row: Vec<BigRational> = cols_b.iter().map(|col| col[r].clone()).collect();
            row.push(-one_b[r].clone());
            row.push(BigRational::zero());
            eqs.push(row);
        }
        let mut row = vec![BigRational::zero(); n];
        row.push(generator.a.constant_term());
        row.push(target.a.constant_term());
        eqs.push(row);
        let f = CoeffField(CoeffRing::Rational);
        let (red, pivots) = linalg::rref(&f, eqs);
        if pivots.last() == Some(&(n + 1)) {
            return Ok(None);
        }
        let mut sol = vec![BigRational::zero(); n + 1];
        let free: Vec<usize> = (0..=n).filter(|j| !pivots.contains(j)).collect();
        if let Some(ri) = pivots.iter().position(|&p| p == n) {
            let r = &red[ri];
            if let Some(&j) = free.iter().find(|&&j| !r[j].is_zero()) {
                sol[j] = &r[n + 1] / &r[j];
            } else if !r[n + 1].is_integer() {
                return Ok(None);
            }
        }
        for (r, &p) in red.iter().zip(&pivots) {
            let mut v = r[n + 1].clone();
            for &j in &free {
                v -= &r[j] * &sol[j];
            }
            sol[p] = v;
        }
        let cm = Polynomial::from_terms(
            c.base(),
            c.nvars(),
            cb.iter().cloned().zip(sol[..n].iter().cloned()),
        )?;
        let m = self.pair(&Polynomial::constant(a.base(), 0, sol[n].clone())?, &cm)?;
        debug_assert_eq!(self.mul(&m, generator)?, *target);
        Ok(Some(m))
    }

    /// Certifies `(gens[0]) ⊊ (gens[1]) ⊊ …` as principal ideals.
    pub fn ideal_chain(&self, gens: &[Pair], limit: usize) -> Result<Certificate> {
        let rendered: Vec<String> = gens.iter().map(|g| self.render(g)).collect();
        let mut cert = Certificate::new(format!(
            "strictly increasing chain of principal ideals {}",
            rendered.join(" < ")
        ))
        .with_cap("length", gens.len() as u64);
        let mut ok = true;
        for w in gens.windows(2) {
            match self.principal_multiplier(&w[1], &w[0], limit)? {
                Some(m) => {
                    for (alg, x, y, z) in [
                        (self.a(), &m.a, &w[1].a, &w[0].a),
                        (self.c(), &m.c, &w[1].c, &w[0].c),
                    ] {
                        cert.obligations.push(Obligation::Zero {
                            ring: alg.spec(),
                            expr: format!(
                                "({})*({}) - ({})",
                                alg.render(x),
                                alg.render(y),
                                alg.render(z)
                            ),
                        });
                    }
                    cert.obligations.push(Obligation::Zero {
                        ring: self.f.target().spec(),
                        expr: format!("({}) - ({})", self.f.expand(&m.a), self.g.expand(&m.c)),
                    });
                }
                None => ok = false,
            }
            if self.principal_multiplier(&w[0], &w[1], limit)?.is_some() {
                ok = false;
            }
        }
        cert.verdict = if ok {
            Verdict::Proved
        } else {
            Verdict::Refuted
        };
        cert.notes
            .push("strictness decided by linear algebra over the rationals".into());
        Ok(cert)
    }
}

/// The chain `((0, c/p)) ⊂ ((0, c/p²)) ⊂ …` of `length` ideals, for `c` in
/// the kernel of `g`.
pub fn nilpotent_chain_probe(
    ring: &FiberRing,
    c: &Polynomial,
    p: u64,
    length: u32,
    limit: usize,
) -> Result<Certificate> {
    let mut gens = Vec::new();
    let mut scale = BigRational::one();
    let pb = BigRational::from_integer(BigInt::from(p));
    for _ in 0..length {
        scale /= &pb;
        gens.push(ring.pair(&ring.a().zero(), &c.scale(&scale)?)?);
    }
    ring.ideal_chain(&gens, limit)
}

/// Generators of the equalizer `{a : p*(a) = q*(a)}` and the UH verdict
/// for its inclusion.
#[derive(Clone, Debug)]
pub struct Equalizer {
    pub generators: Vec<Polynomial>,
    /// Dimension of the equalizer in degrees `≤ d` for `d = 0..=cap`.
    pub kernel_dims: Vec<usize>,
    pub uh: UhCertificate,
}

/// Per-degree kernel of `p* − q*` on a polynomial ring over a field.
pub fn equalizer_kernel(p: &RingMap, q: &RingMap, d: u32) -> Result<Vec<Polynomial>> {
    let x = p.source();
    if x != q.source() || p.target() != q.target() {
        return Err(AlgebraError::Invalid(
            "maps must share source and target".into(),
        ));
    }
    if !x.base().is_field() || !x.relations().generators().is_empty() {
        return Err(AlgebraError::Unsupported(
            "equalizers need a polynomial ring over a field".into(),
        ));
    }
    let mut mons = Monomial::up_to_degree(x.nvars(), d);
    mons.reverse();
    let one = Polynomial::one(x.base(), x.nvars());
    let images = mons
        .iter()
        .map(|m| {
            let f = one.mul_term(m, &int(1));
            p.apply(&f)?.checked_sub(&q.apply(&f)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for im in &images {
        for (m, _) in im.terms() {
            let k = index.len();
            index.entry(m.clone()).or_insert(k);
        }
    }
    let rows: Vec<Vec<BigRational>> = images
        .iter()
        .map(|im| {
            let mut v = vec![BigRational::zero(); index.len().max(1)];
            for (m, c) in im.terms() {
                v[index[m]] = c.clone();
            }
            v
        })
        .collect();
    let f = CoeffField(x.base());
    linalg::left_kernel(&f, &rows)
        .into_iter()
        .map(|k| {
            Polynomial::from_terms(
                x.base(),
                x.nvars(),
                mons.iter().cloned().zip(k).filter(|(_, c)| !c.is_zero()),
            )
        })
        .collect()
}

pub fn equalizer_subring(
    p: &RingMap,
    q: &RingMap,
    cap: u32,
    caps: &ChainCaps,
) -> Result<Equalizer> {
    let x = p.source().clone();
    let mut gens: Vec<Polynomial> = Vec::new();
    let mut dims = Vec::new();
    for d in 0..=cap {
        let kernel = equalizer_kernel(p, q, d)?;
        dims.push(kernel.len());
        let mut oracle = SubalgebraOracle::new(&x, &gens)?;
        for k in kernel {
            if k.is_constant() {
                continue;
            }
            if oracle.member(&k)? == Membership::NotMember {
                gens.push(k);
                oracle = SubalgebraOracle::new(&x, &gens)?;
            }
        }
    }
    let mut uh = find_chain(&x, &gens, &[], caps)?;
    uh.certificate.claim = format!(
        "equalizer subring -> {}: {}",
        x.spec().base,
        uh.certificate.claim
    );
    uh.certificate
        .caps
        .insert("equalizer_degree_cap".into(), cap as u64);
    for g in &gens {
        uh.certificate.obligations.push(Obligation::Zero {
            ring: p.target().spec(),
            expr: format!("({}) - ({})", p.expand(g), q.expand(g)),
        });
    }
    Ok(Equalizer {
        generators: gens,
        kernel_dims: dims,
        uh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::replay;

    fn z2xy() -> FpAlgebra {
        FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(2), &["x", "y"])
    }

    fn spec2() -> FiberProductSpec {
        FiberProductSpec::parse(&z2xy(), &["x^2", "x^3", "x + 2*y"], None).unwrap()
    }

    fn same_algebra(b: &FpAlgebra, g: &[Polynomial], h: &[Polynomial]) -> bool {
        let og = SubalgebraOracle::new(b, g).unwrap();
        let oh = SubalgebraOracle::new(b, h).unwrap();
        h.iter()
            .all(|e| og.member(e).unwrap() != Membership::NotMember)
            && g.iter()
                .all(|e| oh.member(e).unwrap() != Membership::NotMember)
    }

    #[test]
    fn membership_in_the_fiber_product() {
        let s = spec2();
        let b = s.b().clone();
        for (e, v) in [
            ("x + 2*y", Verdict::Proved),
            ("x*y + y^2", Verdict::Proved),
            ("y", Verdict::Refuted),
        ] {
            let c = fp_member(&s, &b.element(e).unwrap()).unwrap();
            assert_eq!(c.verdict, v, "{e}");
            replay(&c).unwrap();
        }
    }

    #[test]
    fn generators_at_two() {
        let s = spec2();
        let g = fp_generators(&s, 6).unwrap();
        let b = s.b();
        let r: Vec<String> = g.generators.iter().map(|p| b.render(p)).collect();
        assert_eq!(r, vec!["x + 2*y", "x^2", "x*y + y^2", "x^3", "x^2*y"]);
        assert_eq!(g.certificate.verdict, Verdict::Proved);
        replay(&g.certificate).unwrap();
        let listed: Vec<Polynomial> = ["x^2", "x^2*y", "x^3", "x^3*y", "x + 2*y", "x*y + y^2"]
            .iter()
            .map(|e| b.element(e).unwrap())
            .collect();
        assert!(same_algebra(b, &g.generators, &listed));
    }

    #[test]
    fn generators_at_three() {
        let b = FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(3), &["x", "y"]);
        let s = FiberProductSpec::parse(&b, &["x^2", "x^3", "x + 3*y"], None).unwrap();
        let g = fp_generators(&s, 8).unwrap();
        assert_eq!(g.certificate.verdict, Verdict::Proved);
        replay(&g.certificate).unwrap();
        let listed: Vec<Polynomial> = [
            "x^2",
            "x^2*y",
            "x^2*y^2",
            "x^3",
            "x^3*y",
            "x^3*y^2",
            "x + 3*y",
            "2*x*y + 3*y^2",
            "x*y^2 + y^3",
        ]
        .iter()
        .map(|e| b.element(e).unwrap())
        .collect();
        assert!(same_algebra(&b, &g.generators, &listed));
    }

    fn surrogate() -> FiberProductSpec {
        let b = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t", "x", "y"]);
        let gens: Vec<Polynomial> = ["x^2", "x^3", "x + t*y"]
            .iter()
            .map(|e| b.element(e).unwrap())
            .collect();
        FiberProductSpec::parametric(&b, "t", &gens).unwrap()
    }

    #[test]
    fn surrogate_is_never_proved() {
        for cap in [4, 6] {
            let u = fp_verify_uh(&surrogate(), cap, &ChainCaps::default()).unwrap();
            assert_eq!(u.verdict(), Verdict::Inconclusive, "cap {cap}");
        }
    }

    #[test]
    fn first_rung_over_a_parameter() {
        let c = fp_nonfg_witness(&surrogate(), 1, "x", "y").unwrap();
        assert_eq!(c.verdict, Verdict::Proved);
        assert_eq!(c.witness["ladder"], json!(["t*y"]));
    }

    #[test]
    fn degenerate_spec_is_trivially_uh() {
        let b = FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(2), &[]);
        let s = FiberProductSpec::parse(&b, &[], None).unwrap();
        let u = fp_verify_uh(&s, 3, &ChainCaps::default()).unwrap();
        assert!(u.is_proved());
    }

    #[test]
    fn trivial_subalgebra_gives_the_variables() {
        let s = FiberProductSpec::parse(&z2xy(), &["x", "y"], None).unwrap();
        let g = fp_generators(&s, 3).unwrap();
        let r: Vec<String> = g.generators.iter().map(|p| s.b().render(p)).collect();
        assert_eq!(r, vec!["x", "y"]);
    }

    #[test]
    fn ladder_over_a_parameter() {
        let b = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t", "x", "y"]);
        let gens: Vec<Polynomial> = ["x^2", "x^3", "x + t*y"]
            .iter()
            .map(|e| b.element(e).unwrap())
            .collect();
        let s = FiberProductSpec::parametric(&b, "t", &gens).unwrap();
        let c = fp_nonfg_witness(&s, 3, "x", "y").unwrap();
        assert_eq!(c.verdict, Verdict::Proved, "{c:#?}");
        assert_eq!(c.witness["ladder"], json!(["t*y", "t*y^2", "t*y^3"]));
        replay(&c).unwrap();
    }

    #[test]
    fn ladder_collapses_two_adically() {
        let c = fp_nonfg_witness(&spec2(), 2, "x", "y").unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        assert_eq!(c.parts.len(), 2);
        assert_eq!(c.parts[0].verdict, Verdict::Proved);
        replay(&c).unwrap();
    }

    #[test]
    fn uh_at_two() {
        let u = fp_verify_uh(&spec2(), 4, &ChainCaps::default()).unwrap();
        assert!(u.is_proved(), "{:#?}", u.certificate);
        replay(&u.certificate).unwrap();
    }

    #[test]
    fn rational_square_chain() {
        let z = FpAlgebra::polynomial_ring(CoeffRing::Integer, &[]);
        let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &[]);
        let qx = FpAlgebra::parse(CoeffRing::Rational, &["x"], &["x^2"]).unwrap();
        let f = RingMap::parse(&z, &q, &[]).unwrap();
        let g = RingMap::parse(&qx, &q, &["0"]).unwrap();
        let r = FiberRing::new(f, g).unwrap();
        let c = nilpotent_chain_probe(&r, &qx.element("x").unwrap(), 2, 5, 1000).unwrap();
        assert_eq!(c.verdict, Verdict::Proved);
        replay(&c).unwrap();
        let m = r
            .principal_multiplier(
                &r.parse_pair("0", "x").unwrap(),
                &r.parse_pair("0", "x/2").unwrap(),
                100,
            )
            .unwrap();
        assert!(m.is_none());
    }

    #[test]
    fn finite_fiber_ring() {
        let z4 = FpAlgebra::polynomial_ring(CoeffRing::mod_prime_power(2, 2).unwrap(), &[]);
        let f2 = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &[]);
        let d = FpAlgebra::parse(CoeffRing::PrimeField(2), &["x"], &["x^2"]).unwrap();
        let f = RingMap::parse(&z4, &f2, &[]).unwrap();
        let g = RingMap::parse(&d, &f2, &["0"]).unwrap();
        let r = FiberRing::new(f, g).unwrap();
        let t = r.multiplication_table(100).unwrap().unwrap();
        assert_eq!(t.elements.len(), 8);
        let c = r.check_ring_axioms(100).unwrap();
        assert_eq!(c.verdict, Verdict::Proved);
        replay(&c).unwrap();
    }

    #[test]
    fn equalizer_in_characteristic_two() {
        let x = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &["t"]);
        let e = FpAlgebra::parse(CoeffRing::PrimeField(2), &["t", "e"], &["e^2"]).unwrap();
        let p = RingMap::parse(&x, &e, &["t"]).unwrap();
        let q = RingMap::parse(&x, &e, &["t + e"]).unwrap();
        let eq = equalizer_subring(&p, &q, 4, &ChainCaps::default()).unwrap();
        let r: Vec<String> = eq.generators.iter().map(|g| x.render(g)).collect();
        assert_eq!(r, vec!["t^2"]);
        assert_eq!(eq.kernel_dims, vec![1, 1, 2, 2, 3]);
        assert!(eq.uh.is_proved());
        replay(&eq.uh.certificate).unwrap();
    }

    #[test]
    fn equalizer_over_the_rationals() {
        let x = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t"]);
        let e = FpAlgebra::parse(CoeffRing::Rational, &["t", "e"], &["e^2"]).unwrap();
        let p = RingMap::parse(&x, &e, &["t"]).unwrap();
        let q = RingMap::parse(&x, &e, &["t + e"]).unwrap();
        let eq = equalizer_subring(&p, &q, 4, &ChainCaps::default()).unwrap();
        assert!(eq.generators.is_empty());
        assert_eq!(eq.kernel_dims, vec![1; 5]);
        assert_eq!(eq.uh.verdict(), Verdict::Refuted);
        replay(&eq.uh.certificate).unwrap();
    }
}
