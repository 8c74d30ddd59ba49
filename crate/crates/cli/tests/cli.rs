use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mcalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcalg"))
        .args(args)
        .output()
        .expect("spawn mcalg")
}

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "task"))
        .collect();
    files.sort();
    files
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run_to(task: &Path, out: &Path) -> Output {
    mcalg(&[
        "run",
        task.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

#[test]
fn corpus_runs_and_replays() {
    let files = corpus();
    assert!(files.len() >= 5);
    for f in files {
        let stem = f.file_stem().unwrap().to_str().unwrap().to_string();
        let out = scratch(&format!("{stem}.json"));
        let r = run_to(&f, &out);
        assert!(r.status.success(), "{stem}: {}", text(&r));
        let rp = mcalg(&["replay", out.to_str().unwrap()]);
        assert!(rp.status.success(), "{stem}: {}", text(&rp));
        assert!(!String::from_utf8_lossy(&rp.stdout).contains("FAILED"));
    }
}

#[test]
fn runs_are_byte_identical() {
    for f in corpus() {
        let a = mcalg(&["run", f.to_str().unwrap()]);
        let b = mcalg(&["run", f.to_str().unwrap(), "--sequential"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{}", f.display());
    }
}

#[test]
fn empty_file_gives_empty_report() {
    let f = scratch("empty.task");
    fs::write(&f, "# nothing here\n").unwrap();
    let r = mcalg(&["run", f.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["tasks"], serde_json::json!([]));
    assert_eq!(v["schema"], "mcalg.report");
}

#[test]
fn unknown_operation_is_a_parse_error() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/unknown_op.task");
    let r = mcalg(&["run", f.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(
        err.contains(":3:10:") && err.contains("frobnicate"),
        "{err}"
    );
    assert_eq!(
        mcalg(&["check", f.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn bad_flags_are_config_errors() {
    let f = scratch("one.task");
    fs::write(
        &f,
        "ring A = QQ[x]\ntask g = groebner_basis(ring = A, gens = [\"x\"])\n",
    )
    .unwrap();
    assert_eq!(
        mcalg(&["run", f.to_str().unwrap(), "--prime", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mcalg(&["run", f.to_str().unwrap(), "--degree-bound", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failing_task_exits_one() {
    let f = scratch("fails.task");
    fs::write(
        &f,
        "ring A = ZZ_(2)[x] / (x^2, 2*x)\nring B = ZZ_(2)[]\nmap pi : A -> B = [0]\n\
         task bad = descend_section(map = pi, a = \"1\", bq = \"2\")\n",
    )
    .unwrap();
    let r = mcalg(&["run", f.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1), "{}", text(&r));
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["tasks"][0]["status"], "error");
}

#[test]
fn tampered_coefficient_fails_at_that_task() {
    let f = scratch("tamper.task");
    fs::write(
        &f,
        "ring A = ZZ/4[x] / (x^2, 2*x)\n\
         task first = power(ring = A, element = \"1 + x\", exponent = 2)\n\
         task second = power(ring = A, element = \"x\", exponent = 3)\n",
    )
    .unwrap();
    let out = scratch("tamper.json");
    assert!(run_to(&f, &out).status.success());
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let expr = &mut v["tasks"][0]["certificate"]["obligations"][0]["expr"];
    let altered = expr.as_str().unwrap().replace("- (1)", "- (3)");
    assert_ne!(expr.as_str().unwrap(), altered);
    *expr = Value::String(altered);
    fs::write(&out, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let r = mcalg(&["replay", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let s = String::from_utf8_lossy(&r.stdout);
    assert!(s.contains("first: FAILED"), "{s}");
    assert!(s.contains("second: ok"), "{s}");
}

#[test]
fn inconclusive_report_replays() {
    let f = scratch("inconclusive.task");
    fs::write(
        &f,
        "ring B = QQ[t, x, y]\n\
         task s = fp_verify_uh(b = B, aq = [\"x^2\", \"x^3\", \"x + t*y\"], param = \"t\", cap = 3)\n",
    )
    .unwrap();
    let out = scratch("inconclusive.json");
    assert!(run_to(&f, &out).status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["tasks"][0]["verdict"], "inconclusive");
    assert!(mcalg(&["replay", out.to_str().unwrap()]).status.success());
}

#[test]
fn verdict_mismatch_is_rejected() {
    let f = scratch("flip.task");
    fs::write(&f, "ring A = ZZ[x]\ntask m = ideal_member(ring = A, gens = [\"x^2\", \"2*x\"], element = \"x\")\n").unwrap();
    let out = scratch("flip.json");
    assert!(run_to(&f, &out).status.success());
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    v["tasks"][0]["verdict"] = Value::String("proved".into());
    fs::write(&out, v.to_string()).unwrap();
    assert_eq!(
        mcalg(&["replay", out.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn generator_list_in_text_report() {
    let f = scratch("gens.task");
    fs::write(
        &f,
        "ring B = ZZ_(2)[x, y]\ntask g = fp_generators(b = B, aq = [\"x^2\", \"x^3\", \"x + 2*y\"], cap = 6)\n",
    )
    .unwrap();
    let r = mcalg(&["run", f.to_str().unwrap(), "--format", "text"]);
    assert!(r.status.success());
    let s = String::from_utf8_lossy(&r.stdout);
    for g in ["x + 2*y", "x^2", "x*y + y^2", "x^3", "x^2*y"] {
        assert!(s.contains(&format!("\"{g}\"")), "{g} missing from {s}");
    }
}
