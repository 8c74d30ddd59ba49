//! Acceptance criteria, one line each.
//!
//! Run with `cargo test --release -p mcalg-cli --test acceptance -- --nocapture`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mcalg::algebra::{subalgebra_member, FpAlgebra, RingMap};
use mcalg::certificate::{replay, Verdict};
use mcalg::par::Exec;
use mcalg::patching::{self, FracIdeal};
use mcalg::perfection::{fiber_product_perfection_check, perf_exponent_bound, perf_iso_check};
use mcalg::pushout::{
    equalizer_subring, fp_generators, fp_member, fp_nonfg_witness, fp_verify_uh,
    nilpotent_chain_probe, FiberProductSpec, FiberRing,
};
use mcalg::univhomeo::{find_chain, inclusion_map, ChainCaps};
use mcalg::{CoeffRing, Polynomial};
use mcalg_cli::taskfile::Value;
use mcalg_cli::{Config, RunOptions, TaskFile};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn elems(alg: &FpAlgebra, texts: &[&str]) -> Result<Vec<Polynomial>, String> {
    texts.iter().map(|t| alg.element(t).map_err(e)).collect()
}

/// Each of `xs` lies in the subalgebra generated by `ys`.
fn generated_by(alg: &FpAlgebra, xs: &[Polynomial], ys: &[Polynomial]) -> Result<(), String> {
    for x in xs {
        let c = subalgebra_member(alg, ys, x).map_err(e)?;
        ensure(c.is_proved(), format!("{} not generated", alg.render(x)))?;
        replay(&c).map_err(e)?;
    }
    Ok(())
}

fn expected_generators(p: u64, cap: u32, listed: &[&str]) -> Result<String, String> {
    let b = FpAlgebra::polynomial_ring(CoeffRing::IntegerLocalizedAt(p), &["x", "y"]);
    let aq = ["x^2".to_string(), "x^3".to_string(), format!("x + {p}*y")];
    let aq: Vec<&str> = aq.iter().map(String::as_str).collect();
    let spec = FiberProductSpec::parse(&b, &aq, None).map_err(e)?;
    let got = fp_generators(&spec, cap).map_err(e)?;
    ensure(
        got.certificate.is_proved(),
        format!("p = {p}: completeness not proved at cap {cap}"),
    )?;
    replay(&got.certificate).map_err(e)?;
    let want = elems(&b, listed)?;
    for w in &want {
        ensure(
            fp_member(&spec, w).map_err(e)?.is_proved(),
            format!("{} not in A", b.render(w)),
        )?;
    }
    generated_by(&b, &want, &got.generators)?;
    generated_by(&b, &got.generators, &want)?;
    Ok(format!("p={p}: {} generators", got.generators.len()))
}

fn c1() -> Check {
    let two = expected_generators(
        2,
        6,
        &["x^2", "x^2*y", "x^3", "x^3*y", "x + 2*y", "x*y + y^2"],
    )?;
    let three = expected_generators(
        3,
        8,
        &[
            "x^2",
            "x^2*y",
            "x^2*y^2",
            "x^3",
            "x^3*y",
            "x^3*y^2",
            "x + 3*y",
            "2*x*y + 3*y^2",
            "x*y^2 + y^3",
        ],
    )?;
    Ok(format!("{two}; {three}; same algebra as the closed-form lists"))
}

fn c2() -> Check {
    let r = FpAlgebra::parse(CoeffRing::Integer, &["x", "y"], &["x^2"]).map_err(e)?;
    for p in [2u64, 3, 5] {
        let lhs = r.element(&format!("(x + {p}*y)^{p}")).map_err(e)?;
        let rhs = r
            .element(&format!("{p}^{p}*(x*y^{} + y^{p})", p - 1))
            .map_err(e)?;
        ensure(
            (&lhs - &rhs).is_zero(),
            format!("p = {p}: normal forms differ"),
        )?;
    }
    Ok("p in {2, 3, 5}".into())
}

fn surrogate() -> Result<FiberProductSpec, String> {
    let b = FpAlgebra::polynomial_ring(CoeffRing::Rational, &["t", "x", "y"]);
    let gens = elems(&b, &["x^2", "x^3", "x + t*y"])?;
    FiberProductSpec::parametric(&b, "t", &gens).map_err(e)
}

fn c3() -> Check {
    let spec = surrogate()?;
    let w = fp_nonfg_witness(&spec, 4, "x", "y").map_err(e)?;
    ensure(
        w.verdict == Verdict::Proved,
        format!("ladder verdict {}", w.verdict),
    )?;
    ensure(
        w.witness["ladder"] == json!(["t*y", "t*y^2", "t*y^3", "t*y^4"]),
        format!("ladder {}", w.witness["ladder"]),
    )?;
    replay(&w).map_err(e)?;
    for cap in [4, 6, 8] {
        let u = fp_verify_uh(&spec, cap, &ChainCaps::default()).map_err(e)?;
        ensure(
            u.verdict() == Verdict::Inconclusive,
            format!("cap {cap}: {}", u.verdict()),
        )?;
    }
    Ok("ladder of depth 4 proved; UH inconclusive at caps 4, 6, 8".into())
}

/// Least `n` with `pᵐ | C(pⁿ, i)` for all `1 ≤ i ≤ r`, from the binomials.
fn brute_force(p: u64, m: u32, r: u64) -> u32 {
    let pm = BigUint::from(p).pow(m);
    (0..)
        .find(|&n| {
            let top = BigUint::from(p).pow(n);
            let mut c = BigUint::one();
            (1..=r).all(|i| {
                if BigUint::from(i) > top {
                    return true;
                }
                c = &c * (&top - BigUint::from(i - 1)) / BigUint::from(i);
                (&c % &pm).is_zero()
            })
        })
        .unwrap()
}

fn c4() -> Check {
    let mut cases = 0;
    for p in [2u64, 3, 5] {
        for m in 1..=4 {
            for r in 1..=30 {
                let got = perf_exponent_bound(p, m, r).map_err(e)?;
                let want = brute_force(p, m, r);
                ensure(
                    got == want,
                    format!("(p={p}, m={m}, r={r}): {got} vs {want}"),
                )?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases agree with brute force"))
}

fn c5() -> Check {
    let z4 = CoeffRing::mod_prime_power(2, 2).map_err(e)?;
    let z2 = CoeffRing::IntegerLocalizedAt(2);
    let f2 = CoeffRing::PrimeField(2);
    let a1 = FpAlgebra::polynomial_ring(z4, &[]);
    let b1 = FpAlgebra::parse(z4, &["x"], &["x^2 - 2", "2*x"]).map_err(e)?;
    let a2 = FpAlgebra::parse(z2, &["x"], &["x^2", "2*x"]).map_err(e)?;
    let b2 = FpAlgebra::polynomial_ring(z2, &[]);
    let a3 = FpAlgebra::polynomial_ring(f2, &["s"]);
    let b3 = FpAlgebra::polynomial_ring(f2, &["t"]);
    let cases = [
        (
            RingMap::parse(&a1, &b1, &[]).map_err(e)?,
            vec!["x", "1 + x"],
        ),
        (RingMap::parse(&a2, &b2, &["0"]).map_err(e)?, vec!["1", "3"]),
        (RingMap::parse(&a3, &b3, &["t^2"]).map_err(e)?, vec!["t"]),
    ];
    let mut witnesses = 0;
    for (map, sample) in &cases {
        let sample = elems(map.target(), sample)?;
        let c = perf_iso_check(map, &sample, Some(2), 8).map_err(e)?;
        ensure(c.is_proved(), format!("{}: {}", c.claim, c.verdict))?;
        replay(&c).map_err(e)?;
        witnesses += c.obligation_count();
    }
    Ok(format!("3 maps proved, {witnesses} obligations replayed"))
}

fn c6() -> Check {
    let f2 = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(2), &[]);
    let z4 = FpAlgebra::polynomial_ring(CoeffRing::mod_prime_power(2, 2).map_err(e)?, &[]);
    let z8 = FpAlgebra::polynomial_ring(CoeffRing::mod_prime_power(2, 3).map_err(e)?, &[]);
    let dual = FpAlgebra::parse(CoeffRing::PrimeField(2), &["x"], &["x^2"]).map_err(e)?;
    let to_f2 = |a: &FpAlgebra| RingMap::parse(a, &f2, &[]).map_err(e);
    let dual_f2 = RingMap::parse(&dual, &f2, &["0"]).map_err(e)?;
    let squares = [
        (to_f2(&z4)?, dual_f2.clone()),
        (to_f2(&z8)?, dual_f2),
        (to_f2(&z4)?, to_f2(&z8)?),
    ];
    let mut sizes = Vec::new();
    for (f, g) in &squares {
        let c = fiber_product_perfection_check(f, g, 2, 64).map_err(e)?;
        ensure(c.is_proved(), format!("{}: {}", c.claim, c.verdict))?;
        replay(&c).map_err(e)?;
        sizes.push(c.witness["size_fiber_product"].as_u64().unwrap_or(0));
    }
    ensure(
        sizes.iter().all(|&s| s > 0 && s <= 64),
        format!("sizes {sizes:?}"),
    )?;
    Ok(format!("bijection on squares of sizes {sizes:?}"))
}

fn c7() -> Check {
    let z = FpAlgebra::polynomial_ring(CoeffRing::Integer, &[]);
    let q = FpAlgebra::polynomial_ring(CoeffRing::Rational, &[]);
    let qx = FpAlgebra::parse(CoeffRing::Rational, &["x"], &["x^2"]).map_err(e)?;
    let ring = FiberRing::new(
        RingMap::parse(&z, &q, &[]).map_err(e)?,
        RingMap::parse(&qx, &q, &["0"]).map_err(e)?,
    )
    .map_err(e)?;
    let c = nilpotent_chain_probe(&ring, &qx.element("x").map_err(e)?, 2, 5, 1000).map_err(e)?;
    ensure(c.is_proved(), format!("chain verdict {}", c.verdict))?;
    replay(&c).map_err(e)?;
    Ok("strict chain of length 5".into())
}

fn c8() -> Check {
    let r =
        FpAlgebra::parse(CoeffRing::PrimeField(5), &["x", "y"], &["y^2 - x^3 - x^2"]).map_err(e)?;
    let s = FpAlgebra::polynomial_ring(CoeffRing::PrimeField(5), &["t"]);
    let map = RingMap::parse(&r, &s, &["t^2 - 1", "t^3 - t"]).map_err(e)?;
    let sq = patching::conductor(&map, None, 4).map_err(e)?;
    replay(&sq.certificate).map_err(e)?;
    let ls = FracIdeal::unit(sq.s()).map_err(e)?;
    let lri = FracIdeal::unit(sq.r_mod_i()).map_err(e)?;
    let (mut principal, mut other) = (0, 0);
    let mut ratios = std::collections::BTreeSet::new();
    for u in patching::units(sq.s_mod_i()).map_err(e)? {
        let out = patching::milnor_patch(&sq, &ls, &lri, &u, 4).map_err(e)?;
        ensure(out.invertible.is_proved(), "gluing not invertible")?;
        replay(&out.invertible).map_err(e)?;
        replay(&out.principal).map_err(e)?;
        let rt = patching::patch_restrict_roundtrip(&sq, &out.ideal, 4).map_err(e)?;
        ensure(rt.is_proved(), "roundtrip failed")?;
        replay(&rt).map_err(e)?;
        let (a, b) = patching::branch_values(&u, 5).ok_or("unit without branch values")?;
        ratios.insert(a * (1..5).find(|c| b * c % 5 == 1).unwrap_or(0) % 5);
        match out.principal.verdict {
            Verdict::Proved => principal += 1,
            Verdict::Refuted => other += 1,
            Verdict::Inconclusive => return Err(format!("gluing ({a}, {b}) undecided")),
        }
    }
    ensure(
        (principal, other) == (4, 12),
        format!("{principal} principal, {other} non-principal"),
    )?;
    ensure(ratios.len() == 4, format!("{} branch ratios", ratios.len()))?;
    Ok("16 gluings: 4 principal, 12 non-principal, 4 classes".into())
}

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map(|d| d.filter_map(|x| x.ok()).map(|x| x.path()).collect())
        .unwrap_or_default();
    files.retain(|p| p.extension().is_some_and(|x| x == "task"));
    files.sort();
    files
}

fn load(path: &Path) -> Result<TaskFile, String> {
    let src = fs::read_to_string(path).map_err(e)?;
    TaskFile::parse(&src).map_err(|err| format!("{}:{err}", path.display()))
}

fn c9() -> Check {
    let mut checked = 0;
    for path in corpus() {
        let tf = load(&path)?;
        for task in tf.tasks.iter().filter(|t| t.op == "uh_chain") {
            let Some(Value::Ident(ring)) = task.args.get("ring").map(|a| &a.value) else {
                continue;
            };
            let ring = &tf.rings[ring];
            if !matches!(ring.base(), CoeffRing::PrimeField(_)) {
                continue;
            }
            let Some(Value::List(sub)) = task.args.get("subring").map(|a| &a.value) else {
                continue;
            };
            let sub: Vec<&str> = sub
                .iter()
                .filter_map(|v| {
                    if let Value::Str(s) = v {
                        Some(s.as_str())
                    } else {
                        None
                    }
                })
                .collect();
            let gens = elems(ring, &sub)?;
            let uh = find_chain(ring, &gens, &[], &ChainCaps::default()).map_err(e)?;
            if !uh.is_proved() {
                continue;
            }
            let map = inclusion_map(ring, &gens).map_err(e)?;
            let sample: Vec<Polynomial> = (0..ring.nvars())
                .map(|i| Polynomial::var(ring.base(), ring.nvars(), i))
                .collect();
            let c = perf_iso_check(&map, &sample, None, 8).map_err(e)?;
            ensure(
                c.is_proved(),
                format!("{}: perf_iso {}", task.name, c.verdict),
            )?;
            replay(&c).map_err(e)?;
            checked += 1;
        }
    }
    ensure(
        checked > 0,
        "no UH extension over a prime field in the corpus",
    )?;
    Ok(format!("{checked} corpus extensions agree"))
}

fn c10() -> Check {
    let mut out = Vec::new();
    for (base, want_gens, want) in [
        (CoeffRing::PrimeField(2), vec!["t^2"], Verdict::Proved),
        (CoeffRing::Rational, vec![], Verdict::Refuted),
    ] {
        let x = FpAlgebra::polynomial_ring(base, &["t"]);
        let ee = FpAlgebra::parse(base, &["t", "e"], &["e^2"]).map_err(e)?;
        let p = RingMap::parse(&x, &ee, &["t"]).map_err(e)?;
        let q = RingMap::parse(&x, &ee, &["t + e"]).map_err(e)?;
        let eq = equalizer_subring(&p, &q, 4, &ChainCaps::default()).map_err(e)?;
        let got: Vec<String> = eq.generators.iter().map(|g| x.render(g)).collect();
        ensure(got == want_gens, format!("{base}: generators {got:?}"))?;
        ensure(
            eq.uh.verdict() == want,
            format!("{base}: UH {}", eq.uh.verdict()),
        )?;
        replay(&eq.uh.certificate).map_err(e)?;
        out.push(format!("{base}: {}", eq.uh.verdict()));
    }
    Ok(out.join(", "))
}

fn c11() -> Check {
    let files = corpus();
    ensure(!files.is_empty(), "empty corpus")?;
    let mut tasks = 0;
    for path in &files {
        let tf = load(path)?;
        let opts = RunOptions {
            exec: Exec::Parallel,
            timings: false,
        };
        let first = mcalg_cli::run(&tf, &Config::default(), opts);
        let second = mcalg_cli::run(&tf, &Config::default(), opts);
        ensure(
            !first.has_errors(),
            format!("{}: task error", path.display()),
        )?;
        ensure(
            first.to_json() == second.to_json(),
            format!("{}: reports differ", path.display()),
        )?;
        for line in mcalg_cli::replay(&first, Exec::Parallel)? {
            line.outcome
                .map_err(|err| format!("{}: {err}", line.task))?;
        }
        tasks += first.tasks.len();
    }
    Ok(format!(
        "{} files, {tasks} tasks, byte-identical and replayed",
        files.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        (
            "fiber-product generators at p = 2 and 3",
            Duration::from_secs(120),
            c1,
        ),
        ("(x + py)^p identity mod x^2", Duration::from_secs(1), c2),
        (
            "non-finite generation over QQ[t]",
            Duration::from_secs(120),
            c3,
        ),
        ("perfection exponent bound", Duration::from_secs(1), c4),
        (
            "perfection isomorphism witnesses",
            Duration::from_secs(5),
            c5,
        ),
        ("fiber product of perfections", Duration::from_secs(5), c6),
        ("non-Noetherian fiber ring", Duration::from_secs(1), c7),
        (
            "Milnor patching on the nodal cubic",
            Duration::from_secs(120),
            c8,
        ),
        ("UH chains versus perfections", Duration::from_secs(10), c9),
        ("equalizer subrings", Duration::from_secs(5), c10),
        (
            "end-to-end determinism and replay",
            Duration::from_secs(300),
            c11,
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => {
                Err(format!("{detail}; took {took:.2?}, budget {budget:?}"))
            }
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({took:.2?})", i + 1),
            Err(msg) => {
                println!("FAIL {:>2} {name}: {msg} ({took:.2?})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
