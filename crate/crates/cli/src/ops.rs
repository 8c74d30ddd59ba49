//! Operation table: argument signatures and dispatch into the library.

use std::collections::BTreeMap;

use mcalg::algebra::{subalgebra_member, FpAlgebra, RingMap};
use mcalg::certificate::{Certificate, Obligation, Verdict};
use mcalg::groebner::Ideal;
use mcalg::patching::{self, FracIdeal};
use mcalg::perfection;
use mcalg::pushout::{self, FiberProductSpec, FiberRing};
use mcalg::univhomeo::{self, ChainCaps, UhCertificate};
use mcalg::{AlgebraError, CoeffRing, Polynomial, Result};
use serde_json::{json, Value as Json};

use crate::taskfile::{Task, TaskFile, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Ring,
    Map,
    Ideal,
    /// A quoted element.
    Elem,
    /// A list of quoted elements.
    Elems,
    Int,
    Ints,
    /// A quoted word such as a variable name.
    Text,
}

#[derive(Clone, Copy, Debug)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    pub required: bool,
}

#[derive(Debug)]
pub struct Signature {
    pub name: &'static str,
    pub params: &'static [Param],
    pub summary: &'static str,
}

const fn req(name: &'static str, kind: Kind) -> Param {
    Param {
        name,
        kind,
        required: true,
    }
}

const fn opt(name: &'static str, kind: Kind) -> Param {
    Param {
        name,
        kind,
        required: false,
    }
}

use Kind::*;

pub const OPS: &[Signature] = &[
    Signature {
        name: "groebner_basis",
        params: &[req("ring", Ring), req("gens", Elems)],
        summary: "reduced Gröbner basis of an ideal",
    },
    Signature {
        name: "ideal_member",
        params: &[req("ring", Ring), req("gens", Elems), req("element", Elem)],
        summary: "ideal membership by normal form",
    },
    Signature {
        name: "power",
        params: &[
            req("ring", Ring),
            req("element", Elem),
            req("exponent", Int),
        ],
        summary: "normal form of a power",
    },
    Signature {
        name: "p_valuation",
        params: &[req("n", Int), req("prime", Int)],
        summary: "exponent of a prime in an integer",
    },
    Signature {
        name: "eliminate",
        params: &[req("ring", Ring), req("gens", Elems), req("keep", Elems)],
        summary: "intersection of an ideal with a subring of variables",
    },
    Signature {
        name: "saturate",
        params: &[
            req("ring", Ring),
            req("gens", Elems),
            req("element", Elem),
            opt("cap", Int),
        ],
        summary: "saturation of an ideal by an element",
    },
    Signature {
        name: "generic_fiber",
        params: &[req("ring", Ring)],
        summary: "base change of a presentation to QQ",
    },
    Signature {
        name: "reduce_mod",
        params: &[req("ring", Ring), req("prime", Int), opt("power", Int)],
        summary: "reduction of a presentation modulo a prime power",
    },
    Signature {
        name: "kernel",
        params: &[req("map", Map)],
        summary: "kernel of a ring map",
    },
    Signature {
        name: "subalgebra_member",
        params: &[req("ring", Ring), req("gens", Elems), req("element", Elem)],
        summary: "subalgebra membership with a tag expression",
    },
    Signature {
        name: "nilpotency",
        params: &[req("ring", Ring), req("element", Elem), opt("cap", Int)],
        summary: "nilpotency index up to a cap",
    },
    Signature {
        name: "exponent_bound",
        params: &[req("p", Int), req("m", Int), req("r", Int)],
        summary: "least n with p^m dividing C(p^n, i) for 1 <= i <= r",
    },
    Signature {
        name: "perf_eq",
        params: &[
            req("ring", Ring),
            req("a", Elem),
            req("b", Elem),
            opt("prime", Int),
            opt("cap", Int),
        ],
        summary: "equality in the perfection",
    },
    Signature {
        name: "perf_surj",
        params: &[
            req("map", Map),
            req("element", Elem),
            opt("prime", Int),
            opt("cap", Int),
        ],
        summary: "p-power preimage of a target element",
    },
    Signature {
        name: "perf_inj",
        params: &[
            req("map", Map),
            req("a", Elem),
            req("b", Elem),
            opt("prime", Int),
            opt("cap", Int),
        ],
        summary: "p-power equality of two elements with equal images",
    },
    Signature {
        name: "perf_iso",
        params: &[
            req("map", Map),
            opt("sample", Elems),
            opt("prime", Int),
            opt("cap", Int),
        ],
        summary: "bijectivity on perfections over a sample",
    },
    Signature {
        name: "descend_section",
        params: &[
            req("map", Map),
            req("a", Elem),
            req("bq", Elem),
            opt("candidate", Elem),
            opt("cap", Int),
        ],
        summary: "descent of a section from the generic fiber",
    },
    Signature {
        name: "fiber_perfection",
        params: &[
            req("f", Map),
            req("g", Map),
            req("prime", Int),
            opt("limit", Int),
        ],
        summary: "perfection of a finite fiber product",
    },
    Signature {
        name: "uh_chain",
        params: &[
            req("ring", Ring),
            req("subring", Elems),
            opt("targets", Elems),
            opt("primes", Ints),
            opt("cap", Int),
            opt("max_steps", Int),
        ],
        summary: "chain of elementary and p-type steps",
    },
    Signature {
        name: "uh_local",
        params: &[
            req("ring", Ring),
            req("subring", Elems),
            req("primes", Ints),
            opt("cap", Int),
        ],
        summary: "universal homeomorphism after localizing at primes",
    },
    Signature {
        name: "fp_member",
        params: &[
            req("b", Ring),
            req("aq", Elems),
            req("element", Elem),
            opt("prime", Int),
            opt("param", Text),
        ],
        summary: "membership in a fiber product",
    },
    Signature {
        name: "fp_generators",
        params: &[
            req("b", Ring),
            req("aq", Elems),
            opt("prime", Int),
            opt("param", Text),
            opt("cap", Int),
        ],
        summary: "generators of a fiber product up to a degree cap",
    },
    Signature {
        name: "fp_nonfg",
        params: &[
            req("b", Ring),
            req("aq", Elems),
            req("x", Text),
            req("y", Text),
            opt("depth", Int),
            opt("prime", Int),
            opt("param", Text),
        ],
        summary: "ladder witnessing infinite generation",
    },
    Signature {
        name: "fp_verify_uh",
        params: &[
            req("b", Ring),
            req("aq", Elems),
            opt("prime", Int),
            opt("param", Text),
            opt("cap", Int),
        ],
        summary: "universal homeomorphism of a fiber product into B",
    },
    Signature {
        name: "fiber_ring_axioms",
        params: &[req("f", Map), req("g", Map), opt("limit", Int)],
        summary: "ring axioms of a finite fiber product",
    },
    Signature {
        name: "nilpotent_chain",
        params: &[
            req("f", Map),
            req("g", Map),
            req("element", Elem),
            req("prime", Int),
            req("length", Int),
            opt("limit", Int),
        ],
        summary: "strict chain of ideals generated by (0, c/p^k)",
    },
    Signature {
        name: "equalizer",
        params: &[req("p", Map), req("q", Map), opt("cap", Int)],
        summary: "equalizer subring and its universal homeomorphism",
    },
    Signature {
        name: "conductor",
        params: &[req("map", Map), opt("module", Elems), opt("cap", Int)],
        summary: "conductor square of a finite extension",
    },
    Signature {
        name: "milnor_patch",
        params: &[
            req("map", Map),
            req("phi", Elem),
            opt("l_s", Elems),
            opt("l_ri", Elems),
            opt("cap", Int),
        ],
        summary: "Milnor patching of rank-1 data",
    },
    Signature {
        name: "patch_roundtrip",
        params: &[req("map", Map), req("ideal", Ideal), opt("cap", Int)],
        summary: "restriction and re-patching of an invertible ideal",
    },
    Signature {
        name: "milnor_census",
        params: &[req("map", Map), opt("cap", Int)],
        summary: "principality of every unit gluing",
    },
];

pub fn signature(name: &str) -> Option<&'static Signature> {
    OPS.iter().find(|s| s.name == name)
}

/// Checks argument names, kinds and references; errors carry a column.
pub fn check_args(
    sig: &Signature,
    task: &Task,
    file: &TaskFile,
) -> std::result::Result<(), (usize, String)> {
    for (key, arg) in &task.args {
        let Some(p) = sig.params.iter().find(|p| p.name == key) else {
            return Err((
                arg.column,
                format!("`{}` takes no argument `{key}`", sig.name),
            ));
        };
        let bad = |want: &str| {
            Err((
                arg.column,
                format!("`{key}` must be {want}, got {}", arg.value.describe()),
            ))
        };
        match (p.kind, &arg.value) {
            (Ring, Value::Ident(n)) if !file.rings.contains_key(n) => {
                return Err((arg.column, format!("unknown ring `{n}`")))
            }
            (Map, Value::Ident(n)) if !file.maps.contains_key(n) => {
                return Err((arg.column, format!("unknown map `{n}`")))
            }
            (Ideal, Value::Ident(n)) if !file.ideals.contains_key(n) => {
                return Err((arg.column, format!("unknown ideal `{n}`")))
            }
            (Ring | Map | Ideal, Value::Ident(_)) => {}
            (Ring, _) => return bad("a ring name"),
            (Map, _) => return bad("a map name"),
            (Ideal, _) => return bad("an ideal name"),
            (Elem | Text, Value::Str(_)) => {}
            (Elem, _) => return bad("a quoted element"),
            (Text, _) => return bad("a quoted word"),
            (Elems, Value::List(v)) if v.iter().all(|x| matches!(x, Value::Str(_))) => {}
            (Elems, _) => return bad("a list of quoted elements"),
            (Int, Value::Int(_)) => {}
            (Int, _) => return bad("an integer"),
            (Ints, Value::List(v)) if v.iter().all(|x| matches!(x, Value::Int(_))) => {}
            (Ints, _) => return bad("a list of integers"),
        }
    }
    for p in sig.params.iter().filter(|p| p.required) {
        if !task.args.contains_key(p.name) {
            return Err((1, format!("`{}` needs argument `{}`", sig.name, p.name)));
        }
    }
    Ok(())
}

/// Caps in force for a task: command-line flags overridden by `set` lines,
/// overridden in turn by task arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub degree_bound: u32,
    pub exponent_cap: u32,
    pub prime: Option<u64>,
    pub limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            degree_bound: 4,
            exponent_cap: 8,
            prime: None,
            limit: 4096,
        }
    }
}

/// What a task produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub certificate: Certificate,
    pub result: Json,
    pub caps: BTreeMap<String, u64>,
}

struct Args<'a> {
    task: &'a Task,
    file: &'a TaskFile,
    cfg: &'a Config,
    caps: BTreeMap<String, u64>,
}

impl<'a> Args<'a> {
    fn value(&self, key: &str) -> Option<&'a Value> {
        self.task.args.get(key).map(|a| &a.value)
    }

    fn name(&self, key: &str) -> &'a str {
        match self.value(key) {
            Some(Value::Ident(n)) => n,
            _ => unreachable!("checked at parse time"),
        }
    }

    fn ring(&self, key: &str) -> &'a FpAlgebra {
        &self.file.rings[self.name(key)]
    }

    fn map(&self, key: &str) -> &'a RingMap {
        &self.file.maps[self.name(key)]
    }

    fn text(&self, key: &str) -> Option<&'a str> {
        match self.value(key) {
            Some(Value::Str(s)) => Some(s),
            _ => None,
        }
    }

    fn texts(&self, key: &str) -> Vec<&'a str> {
        match self.value(key) {
            Some(Value::List(v)) => v
                .iter()
                .filter_map(|x| match x {
                    Value::Str(s) => Some(s.as_str()),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn elem(&self, key: &str, alg: &FpAlgebra) -> Result<Polynomial> {
        let t = self
            .text(key)
            .ok_or_else(|| AlgebraError::Invalid(format!("missing `{key}`")))?;
        alg.element(t)
    }

    fn elems(&self, key: &str, alg: &FpAlgebra) -> Result<Vec<Polynomial>> {
        self.texts(key)
            .into_iter()
            .map(|t| alg.element(t))
            .collect()
    }

    fn int(&self, key: &str) -> Option<i64> {
        match self.value(key) {
            Some(Value::Int(v)) => Some(*v),
            _ => None,
        }
    }

    fn ints(&self, key: &str) -> Vec<u64> {
        match self.value(key) {
            Some(Value::List(v)) => v
                .iter()
                .filter_map(|x| match x {
                    Value::Int(i) => Some(*i as u64),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn positive(&mut self, key: &str, cap_name: &str, default: u64) -> Result<u64> {
        let v = match self.int(key) {
            Some(v) if v <= 0 => {
                return Err(AlgebraError::Invalid(format!("`{key}` must be positive")))
            }
            Some(v) => v as u64,
            None => default,
        };
        self.caps.insert(cap_name.into(), v);
        Ok(v)
    }

    fn degree_cap(&mut self) -> Result<u32> {
        let d = self.cfg.degree_bound as u64;
        Ok(self.positive("cap", "degree_bound", d)? as u32)
    }

    fn exponent_cap(&mut self) -> Result<u32> {
        let e = self.cfg.exponent_cap as u64;
        Ok(self.positive("cap", "exponent_cap", e)? as u32)
    }

    fn limit(&mut self) -> Result<usize> {
        let l = self.cfg.limit as u64;
        Ok(self.positive("limit", "limit", l)? as usize)
    }

    fn prime(&mut self) -> Option<u64> {
        let p = self.int("prime").map(|p| p as u64).or(self.cfg.prime);
        if let Some(p) = p {
            self.caps.insert("prime".into(), p);
        }
        p
    }

    fn chain_caps(&mut self) -> Result<ChainCaps> {
        let mut caps = ChainCaps::default().with_degree_cap(self.degree_cap()?);
        if let Some(m) = self.int("max_steps") {
            caps.max_steps = m.max(0) as usize;
            self.caps.insert("max_steps".into(), caps.max_steps as u64);
        }
        Ok(caps)
    }

    fn fp_spec(&mut self) -> Result<FiberProductSpec> {
        let b = self.ring("b");
        if let Some(t) = self.text("param") {
            let aq = self.elems("aq", b)?;
            return FiberProductSpec::parametric(b, t, &aq);
        }
        let bq = b.base_change_to_q()?;
        let aq = self.elems("aq", &bq)?;
        let prime = match b.base() {
            CoeffRing::IntegerLocalizedAt(p) => self.int("prime").map(|q| q as u64).or(Some(p)),
            _ => self.prime(),
        };
        FiberProductSpec::new(b, &aq, prime)
    }
}

fn render(alg: &FpAlgebra, v: &[Polynomial]) -> Vec<String> {
    v.iter().map(|g| alg.render(g)).collect()
}

fn spec_plus(alg: &FpAlgebra, extra: &[Polynomial]) -> mcalg::certificate::RingSpec {
    let mut s = alg.spec();
    s.relations
        .extend(extra.iter().map(|p| p.render(alg.vars())));
    s
}

fn ideal_of(alg: &FpAlgebra, gens: &[Polynomial]) -> Result<Ideal> {
    let mut all = alg.relations().generators().to_vec();
    all.extend(gens.iter().cloned());
    Ideal::new(alg.base(), alg.nvars(), all)
}

fn uh_result(uh: &UhCertificate) -> Json {
    json!({
        "chain": uh.chain.iter().map(|s| uh.ambient.render(&s.generator)).collect::<Vec<_>>(),
        "covers": render(&uh.ambient, &uh.covers),
    })
}

/// Runs one task.
pub fn run(task: &Task, file: &TaskFile, cfg: &Config) -> Result<Outcome> {
    let mut a = Args {
        task,
        file,
        cfg,
        caps: BTreeMap::new(),
    };
    let (certificate, result) = dispatch(&mut a)?;
    Ok(Outcome {
        certificate,
        result,
        caps: a.caps,
    })
}

fn dispatch(a: &mut Args) -> Result<(Certificate, Json)> {
    Ok(match a.task.op.as_str() {
        "groebner_basis" => {
            let r = a.ring("ring");
            let gens = a.elems("gens", r)?;
            let basis = ideal_of(r, &gens)?.reduced_generators()?;
            let mut c = Certificate::new(format!(
                "reduced basis of ({})",
                render(r, &gens).join(", ")
            ));
            for (xs, ys) in [(&gens, &basis), (&basis, &gens)] {
                let spec = spec_plus(r, ys);
                for x in xs {
                    c.obligations.push(Obligation::Zero {
                        ring: spec.clone(),
                        expr: x.render(r.vars()),
                    });
                }
            }
            c.verdict = Verdict::Proved;
            let rendered: Vec<String> = basis.iter().map(|g| g.render(r.vars())).collect();
            (c, json!({ "basis": rendered }))
        }
        "ideal_member" => {
            let r = a.ring("ring");
            let gens = a.elems("gens", r)?;
            let e = a.elem("element", r)?;
            let nf = ideal_of(r, &gens)?.normal_form(&e)?;
            let mut c = Certificate::new(format!(
                "{} in ({})",
                r.render(&e),
                render(r, &gens).join(", ")
            ));
            let ring = spec_plus(r, &gens);
            let expr = e.render(r.vars());
            if nf.is_zero() {
                c.verdict = Verdict::Proved;
                c.obligations.push(Obligation::Zero { ring, expr });
            } else {
                c.verdict = Verdict::Refuted;
                c.obligations.push(Obligation::NonZero { ring, expr });
            }
            (c, json!({ "normal_form": nf.render(r.vars()) }))
        }
        "power" => {
            let r = a.ring("ring");
            let e = a.elem("element", r)?;
            let n = a.int("exponent").unwrap_or(-1);
            if n < 0 {
                return Err(AlgebraError::Invalid(
                    "`exponent` must be non-negative".into(),
                ));
            }
            let v = r.pow_u64(&e, n as u64)?;
            let text = r.render(&v);
            let mut c = Certificate::new(format!("({})^{n}", r.render(&e)));
            c.obligations.push(Obligation::Zero {
                ring: r.spec(),
                expr: format!("({})^{n} - ({text})", r.render(&e)),
            });
            c.verdict = Verdict::Proved;
            (c, json!({ "value": text }))
        }
        "p_valuation" => {
            let (n, p) = (a.int("n").unwrap_or(0), a.int("prime").unwrap_or(0));
            if p <= 1 {
                return Err(AlgebraError::Invalid("`prime` must be at least 2".into()));
            }
            let v = mcalg::coeff::p_valuation(&n.into(), p as u64)?
                .ok_or_else(|| AlgebraError::Invalid("the valuation of 0 is infinite".into()))?;
            let modulo = |k: u32| mcalg::certificate::RingSpec {
                base: "ZZ".into(),
                vars: Vec::new(),
                relations: vec![format!("{p}^{k}")],
            };
            let mut c = Certificate::new(format!("{p}-adic valuation of {n}"));
            c.obligations.push(Obligation::Zero {
                ring: modulo(v),
                expr: n.to_string(),
            });
            c.obligations.push(Obligation::NonZero {
                ring: modulo(v + 1),
                expr: n.to_string(),
            });
            c.verdict = Verdict::Proved;
            (c, json!({ "valuation": v }))
        }
        "eliminate" => {
            let r = a.ring("ring");
            let gens = a.elems("gens", r)?;
            let names = a.texts("keep");
            if let Some(bad) = names.iter().find(|n| !r.vars().iter().any(|v| v == *n)) {
                return Err(AlgebraError::Invalid(format!("unknown variable `{bad}`")));
            }
            let keep: Vec<bool> = r
                .vars()
                .iter()
                .map(|v| names.contains(&v.as_str()))
                .collect();
            let out = ideal_of(r, &gens)?.eliminate(&keep)?.reduced_generators()?;
            let mut c = Certificate::new(format!(
                "elimination ideal of ({})",
                render(r, &gens).join(", ")
            ));
            let spec = spec_plus(r, &gens);
            for g in &out {
                c.obligations.push(Obligation::Zero {
                    ring: spec.clone(),
                    expr: r.render(g),
                });
            }
            c.verdict = if out.is_empty() {
                Verdict::Inconclusive
            } else {
                Verdict::Proved
            };
            c.notes
                .push("replay checks that each generator lies in the ideal".into());
            (c, json!({ "generators": render(r, &out) }))
        }
        "saturate" => {
            let r = a.ring("ring");
            let gens = a.elems("gens", r)?;
            let f = a.elem("element", r)?;
            let cap = a.exponent_cap()?;
            let ideal = ideal_of(r, &gens)?;
            let out = ideal.saturate(&f, 10_000)?.reduced_generators()?;
            let mut c = Certificate::new(format!(
                "({}) : ({})^oo",
                render(r, &gens).join(", "),
                r.render(&f)
            ));
            let spec = spec_plus(r, &gens);
            let mut complete = true;
            for g in &out {
                let mut h = g.clone();
                let found = (0..=cap).find_map(|k| {
                    if k > 0 {
                        h = &h * &f;
                    }
                    match ideal.contains(&h) {
                        Ok(true) => Some(Ok(k)),
                        Ok(false) => None,
                        Err(e) => Some(Err(e)),
                    }
                });
                match found.transpose()? {
                    Some(k) => c.obligations.push(Obligation::Zero {
                        ring: spec.clone(),
                        expr: format!("({})^{k} * ({})", r.render(&f), r.render(g)),
                    }),
                    None => complete = false,
                }
            }
            c.verdict = if complete && !out.is_empty() {
                Verdict::Proved
            } else {
                Verdict::Inconclusive
            };
            (c, json!({ "generators": render(r, &out) }))
        }
        "generic_fiber" | "reduce_mod" => {
            let r = a.ring("ring");
            let t = if a.task.op == "generic_fiber" {
                r.base_change_to_q()?
            } else {
                let p = a.int("prime").unwrap_or(0);
                if p <= 1 {
                    return Err(AlgebraError::Invalid("`prime` must be at least 2".into()));
                }
                let m = a.positive("power", "power", 1)? as u32;
                r.reduce_mod(p as u64, m)?
            };
            let rels = t.relations().reduced_generators()?;
            let mut c = Certificate::new(format!("presentation over {}", t.base()));
            for g in &rels {
                c.obligations.push(Obligation::Zero {
                    ring: t.spec(),
                    expr: t.render(g),
                });
            }
            c.verdict = if rels.is_empty() {
                Verdict::Inconclusive
            } else {
                Verdict::Proved
            };
            (
                c,
                json!({ "base": t.base().to_string(), "relations": render(&t, &rels) }),
            )
        }
        "kernel" => {
            let m = a.map("map");
            let gens = m.kernel()?.reduced_generators()?;
            let mut c = Certificate::new(format!(
                "kernel of the map {} -> {}",
                m.source().vars().join(", "),
                m.target().vars().join(", ")
            ));
            for g in &gens {
                c.obligations.push(Obligation::Zero {
                    ring: m.target().spec(),
                    expr: m.expand(g),
                });
            }
            c.verdict = if c.obligations.is_empty() {
                Verdict::Inconclusive
            } else {
                Verdict::Proved
            };
            c.notes
                .push("replay checks that each generator maps to zero".into());
            let rendered: Vec<String> = gens.iter().map(|g| g.render(m.source().vars())).collect();
            (c, json!({ "kernel": rendered }))
        }
        "subalgebra_member" => {
            let r = a.ring("ring");
            let gens = a.elems("gens", r)?;
            let e = a.elem("element", r)?;
            (subalgebra_member(r, &gens, &e)?, Json::Null)
        }
        "nilpotency" => {
            let r = a.ring("ring");
            let e = a.elem("element", r)?;
            let cap = a.exponent_cap()?;
            (r.nilpotency_index(&e, cap)?, Json::Null)
        }
        "exponent_bound" => {
            let (p, m, r) = (
                a.int("p").unwrap_or(0),
                a.int("m").unwrap_or(0),
                a.int("r").unwrap_or(0),
            );
            if p <= 1 || m <= 0 || r <= 0 {
                return Err(AlgebraError::Invalid("need p > 1, m > 0 and r > 0".into()));
            }
            let c = perfection::exponent_bound_certificate(p as u64, m as u32, r as u64)?;
            let n = c.witness.get("n").cloned().unwrap_or(Json::Null);
            (c, json!({ "n": n }))
        }
        "perf_eq" => {
            let r = a.ring("ring");
            let (x, y) = (a.elem("a", r)?, a.elem("b", r)?);
            let (p, cap) = (a.prime(), a.exponent_cap()?);
            (perfection::perf_eq(r, &x, &y, p, cap)?, Json::Null)
        }
        "perf_surj" => {
            let m = a.map("map");
            let e = a.elem("element", m.target())?;
            let (p, cap) = (a.prime(), a.exponent_cap()?);
            (perfection::perf_surj_witness(m, &e, p, cap)?, Json::Null)
        }
        "perf_inj" => {
            let m = a.map("map");
            let (x, y) = (a.elem("a", m.source())?, a.elem("b", m.source())?);
            let (p, cap) = (a.prime(), a.exponent_cap()?);
            (perfection::perf_inj_witness(m, &x, &y, p, cap)?, Json::Null)
        }
        "perf_iso" => {
            let m = a.map("map");
            let sample = a.elems("sample", m.target())?;
            let (p, cap) = (a.prime(), a.exponent_cap()?);
            (perfection::perf_iso_check(m, &sample, p, cap)?, Json::Null)
        }
        "descend_section" => {
            let m = a.map("map");
            let x = a.elem("a", m.target())?;
            let bq = a.elem("bq", &m.source().base_change_to_q()?)?;
            let cand = match a.text("candidate") {
                Some(t) => Some(m.source().element(t)?),
                None => None,
            };
            let cap = a.exponent_cap()?;
            (
                perfection::descend_section(m, &x, &bq, cand.as_ref(), cap)?,
                Json::Null,
            )
        }
        "fiber_perfection" => {
            let (f, g) = (a.map("f"), a.map("g"));
            let p = a.prime().unwrap_or(0);
            let limit = a.limit()?;
            (
                perfection::fiber_product_perfection_check(f, g, p, limit)?,
                Json::Null,
            )
        }
        "uh_chain" => {
            let r = a.ring("ring");
            let sub = a.elems("subring", r)?;
            let targets = a.elems("targets", r)?;
            let mut caps = a.chain_caps()?;
            caps.primes = a.ints("primes");
            let uh = univhomeo::find_chain(r, &sub, &targets, &caps)?;
            let res = uh_result(&uh);
            (uh.certificate, res)
        }
        "uh_local" => {
            let r = a.ring("ring");
            let sub = a.elems("subring", r)?;
            let caps = a.chain_caps()?;
            (
                univhomeo::uh_local_at_primes(r, &sub, &a.ints("primes"), &caps)?,
                Json::Null,
            )
        }
        "fp_member" => {
            let spec = a.fp_spec()?;
            let e = a.elem("element", spec.b())?;
            (pushout::fp_member(&spec, &e)?, Json::Null)
        }
        "fp_generators" => {
            let spec = a.fp_spec()?;
            let cap = a.degree_cap()?;
            let g = pushout::fp_generators(&spec, cap)?;
            let res = json!({ "generators": render(spec.b(), &g.generators), "lattice_ranks": g.lattice_ranks });
            (g.certificate, res)
        }
        "fp_nonfg" => {
            let spec = a.fp_spec()?;
            let depth = a.positive("depth", "depth", 3)? as u32;
            let (x, y) = (
                a.text("x").unwrap_or_default(),
                a.text("y").unwrap_or_default(),
            );
            (pushout::fp_nonfg_witness(&spec, depth, x, y)?, Json::Null)
        }
        "fp_verify_uh" => {
            let spec = a.fp_spec()?;
            let cap = a.degree_cap()?;
            let caps = ChainCaps::default().with_degree_cap(cap);
            let uh = pushout::fp_verify_uh(&spec, cap, &caps)?;
            let res = uh_result(&uh);
            (uh.certificate, res)
        }
        "fiber_ring_axioms" => {
            let ring = FiberRing::new(a.map("f").clone(), a.map("g").clone())?;
            let limit = a.limit()?;
            (ring.check_ring_axioms(limit)?, Json::Null)
        }
        "nilpotent_chain" => {
            let ring = FiberRing::new(a.map("f").clone(), a.map("g").clone())?;
            let e = a.elem("element", ring.c())?;
            let p = a.int("prime").unwrap_or(0);
            let len = a.positive("length", "length", 1)? as u32;
            let limit = a.limit()?;
            if p <= 1 {
                return Err(AlgebraError::Invalid("`prime` must be at least 2".into()));
            }
            (
                pushout::nilpotent_chain_probe(&ring, &e, p as u64, len, limit)?,
                Json::Null,
            )
        }
        "equalizer" => {
            let (p, q) = (a.map("p"), a.map("q"));
            let cap = a.degree_cap()?;
            let caps = ChainCaps::default().with_degree_cap(cap);
            let eq = pushout::equalizer_subring(p, q, cap, &caps)?;
            let res = json!({ "generators": render(p.source(), &eq.generators), "kernel_dims": eq.kernel_dims });
            (eq.uh.certificate, res)
        }
        "conductor" => {
            let m = a.map("map");
            let module = a.elems("module", m.target())?;
            let cap = a.degree_cap()?;
            let sq = patching::conductor(m, (!module.is_empty()).then_some(&module[..]), cap)?;
            let res = json!({
                "ideal_in_s": render(sq.s(), sq.ideal_in_s()),
                "ideal_in_r": render(sq.r(), sq.ideal_in_r()),
            });
            (sq.certificate, res)
        }
        "milnor_patch" => {
            let m = a.map("map");
            let cap = a.degree_cap()?;
            let sq = patching::conductor(m, None, cap)?;
            let phi = a.elem("phi", sq.s_mod_i())?;
            let l_s = invertible(sq.s(), &a.elems("l_s", sq.s())?)?;
            let l_ri = invertible(sq.r_mod_i(), &a.elems("l_ri", sq.r_mod_i())?)?;
            let out = patching::milnor_patch(&sq, &l_s, &l_ri, &phi, cap)?;
            let mut c = Certificate::new(format!("gluing by {}", sq.s_mod_i().render(&out.phi)));
            c.verdict = out.invertible.verdict;
            let res = json!({
                "ideal": out.ideal.render(),
                "invertible": out.invertible.verdict,
                "principal": out.principal.verdict,
                "generator": out.generator.as_ref().map(|g| sq.r().render(g)),
            });
            c.parts = vec![out.invertible, out.principal];
            (c, res)
        }
        "patch_roundtrip" => {
            let m = a.map("map");
            let cap = a.degree_cap()?;
            let sq = patching::conductor(m, None, cap)?;
            let decl = &a.file.ideals[a.name("ideal")];
            if a.file.rings.get(&decl.ring) != Some(sq.r()) {
                return Err(AlgebraError::Precondition(
                    "ideal must live in the source of the map".into(),
                ));
            }
            let gens = decl
                .generators
                .iter()
                .map(|t| sq.r().element(t))
                .collect::<Result<Vec<_>>>()?;
            let l = FracIdeal::new(sq.r(), &gens)?
                .find_inverse()?
                .ok_or_else(|| {
                    AlgebraError::Precondition("ideal has no invertibility witness".into())
                })?;
            (
                patching::patch_restrict_roundtrip(&sq, &l, cap)?,
                Json::Null,
            )
        }
        "milnor_census" => {
            let m = a.map("map");
            let cap = a.degree_cap()?;
            let sq = patching::conductor(m, None, cap)?;
            let (ls, lri) = (FracIdeal::unit(sq.s())?, FracIdeal::unit(sq.r_mod_i())?);
            let mut c = Certificate::new("principality of all unit gluings");
            let mut counts = BTreeMap::new();
            for u in patching::units(sq.s_mod_i())? {
                let out = patching::milnor_patch(&sq, &ls, &lri, &u, cap)?;
                *counts
                    .entry(out.principal.verdict.to_string())
                    .or_insert(0usize) += 1;
                c.parts.push(out.principal);
            }
            c.verdict = if counts.contains_key("inconclusive") {
                Verdict::Inconclusive
            } else {
                Verdict::Proved
            };
            let res = json!({
                "units": c.parts.len(),
                "principal": counts.get("proved").copied().unwrap_or(0),
                "non_principal": counts.get("refuted").copied().unwrap_or(0),
                "undecided": counts.get("inconclusive").copied().unwrap_or(0),
            });
            (c, res)
        }
        other => {
            return Err(AlgebraError::Invalid(format!(
                "unknown operation `{other}`"
            )))
        }
    })
}

/// `(gens)` with an inverse witness; the unit ideal when `gens` is empty.
fn invertible(alg: &FpAlgebra, gens: &[Polynomial]) -> Result<FracIdeal> {
    if gens.is_empty() {
        return FracIdeal::unit(alg);
    }
    FracIdeal::new(alg, gens)?
        .find_inverse()?
        .ok_or_else(|| AlgebraError::Precondition("no invertibility witness found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_op_dispatches() {
        for sig in OPS {
            let names: Vec<&str> = sig.params.iter().map(|p| p.name).collect();
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), names.len(), "{}", sig.name);
        }
        assert!(signature("conductor").is_some());
        assert!(signature("frobnicate").is_none());
    }
}
