use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use epsilon_core::document::{parse_certificate, parse_formula_doc, parse_proof};
use epsilon_core::kernel::{check, Calculus};
use epsilon_core::lowerbound::make_ek;
use epsilon_core::parser::parse_expr;
use epsilon_core::print::print_expr;
use epsilon_core::syntax::alpha_eq;
use epsilon_core::Expr;

fn epsilon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epsilon"))
        .args(args)
        .output()
        .expect("run epsilon")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `P(c) -> P(εx P(x))` weakened to `P(εx P(x)) ∨ ¬P(c)`.
const EC_EPS_PROOF: &str = "\
calculus EC_eps
1: P(c) -> P(eps x. P(x))            [critical]
2: (P(c) -> P(eps x. P(x))) -> (P(eps x. P(x)) | ~P(c))   [taut]
3: P(eps x. P(x)) | ~P(c)            [mp 1 2]
";

/// `∃y (P(y) -> P(y))` through a critical formula.
const PC_EPS_PROOF: &str = "\
calculus PC_eps
1: (P(c) -> P(c)) -> (P(eps x. (P(x) -> P(x))) -> P(eps x. (P(x) -> P(x))))   [critical]
2: P(c) -> P(c)   [taut]
3: P(eps x. (P(x) -> P(x))) -> P(eps x. (P(x) -> P(x)))   [mp 2 1]
4: (P(eps x. (P(x) -> P(x))) -> P(eps x. (P(x) -> P(x)))) -> exists y. (P(y) -> P(y))   [exists-ax]
5: exists y. (P(y) -> P(y))   [mp 3 4]
";

#[test]
fn translate_prints_the_translation() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.fml", "# nested\nexists x. (P(x) | forall y. Q(y))\n");
    let o = epsilon(&["translate", s(&f)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = stdout(&o).lines().next().unwrap().to_string();
    let got = parse_expr(&first).unwrap();
    let e1 = parse_expr("eps y. ~Q(y)").unwrap();
    let e2 = parse_expr("eps x. (P(x) | Q(eps y. ~Q(y)))").unwrap();
    let want = Expr::or(Expr::pred("P", vec![e2]), Expr::pred("Q", vec![e1]));
    assert!(alpha_eq(&got, &want), "{first}");
}

#[test]
fn check_accepts_a_valid_proof() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "ok.prf", EC_EPS_PROOF);
    let o = epsilon(&["check", s(&p)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdicts.checks: true"));
    assert!(stdout(&o).contains("metrics_before.cc: 2"));
}

#[test]
fn check_reports_the_failing_step() {
    let dir = tempfile::tempdir().unwrap();
    // premise index points at the wrong earlier step
    let bad = EC_EPS_PROOF.replace("[mp 1 2]", "[mp 2 1]");
    let p = write(dir.path(), "bad.prf", &bad);
    let o = epsilon(&["check", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step 3"), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdicts.checks: false"));

    // premise index beyond the proof
    let bad = EC_EPS_PROOF.replace("[mp 1 2]", "[mp 1 7]");
    let p = write(dir.path(), "bad2.prf", &bad);
    let o = epsilon(&["check", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step 3"), "{}", stderr(&o));
    assert!(stderr(&o).contains("bad2.prf:4:"), "{}", stderr(&o));
}

#[test]
fn embed_writes_a_checking_proof() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "in.prf", PC_EPS_PROOF);
    let out = dir.path().join("out.prf");
    let o = epsilon(&["embed", s(&p), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let q = parse_proof(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(check(&q).is_ok());
    assert_eq!(q.calculus, Calculus::EcEps);
}

#[test]
fn eliminate_writes_trace_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "in.prf", EC_EPS_PROOF);
    let m = write(dir.path(), "m.fml", "P(a) | ~P(c)\n");
    let (trace, cert) = (dir.path().join("t.json"), dir.path().join("c.hbd"));
    let o = epsilon(&[
        "--json", "eliminate", "--proof", s(&p), "--matrix", s(&m), "--params", "a", "--trace", s(&trace),
        "--cert", s(&cert),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["values"]["length"], 2);
    assert_eq!(rep["verdicts"]["tautology"], true);
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["rounds"].as_array().unwrap().len(), 1);
    let c = parse_certificate(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c.length(), 2);
    assert_eq!(c.params.len(), 1);
}

#[test]
fn second_eps_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "in.prf", PC_EPS_PROOF);
    let (o1, o2) = (dir.path().join("1.prf"), dir.path().join("2.prf"));
    for out in [&o1, &o2] {
        let o = epsilon(&["second-eps", "--proof", s(&p), "--out", s(out)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (fs::read(&o1).unwrap(), fs::read(&o2).unwrap());
    assert_eq!(a, b);
    let q = parse_proof(&String::from_utf8(a).unwrap()).unwrap();
    assert_eq!(q.calculus, Calculus::Pc);
    assert!(check(&q).is_ok());
    assert!(alpha_eq(q.end().unwrap(), &parse_expr("exists y. (P(y) -> P(y))").unwrap()));
}

#[test]
fn demo_ek_and_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("e1.hbd");
    let o = epsilon(&["--json", "demo-ek", "1", "--cert", s(&cert)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let len = rep["values"]["herbrand_length"].as_u64().unwrap();
    assert!(len >= 2);
    assert_eq!(rep["values"]["lower_bound"], 2);
    assert!(rep["verdicts"].as_object().unwrap().values().all(|v| v == true));

    let goal = write(dir.path(), "e1.fml", &format!("{}\n", print_expr(&make_ek(1))));
    assert!(alpha_eq(&parse_formula_doc(&fs::read_to_string(&goal).unwrap()).unwrap(), &make_ek(1)));
    let out = dir.path().join("e1.prf");
    let o = epsilon(&["reconstruct", "--cert", s(&cert), "--goal", s(&goal), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let q = parse_proof(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(check(&q).is_ok());
    assert!(alpha_eq(q.end().unwrap(), &make_ek(1)));
}

#[test]
fn lowerbound_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let o = epsilon(&["lowerbound", "--k", "2", "--depth", "8", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(c["bound"], 4);
    assert_eq!(c["certified"], true);
    let req = c["required"].as_array().unwrap();
    assert_eq!(req.len(), 4);
    assert!(req.iter().all(|r| r["necessary"] == true && r["countermodel_atoms"].as_u64().is_some()));

    let o = epsilon(&["lowerbound", "--k", "2", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("depth bound 3"), "{}", stderr(&o));
}

#[test]
fn max_bits_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "in.prf", EC_EPS_PROOF);
    let run = |bits: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_epsilon"))
            .args(["--json", "eliminate", "--proof", s(&p)])
            .env("EPSILON_MAX_BITS", bits)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        rep["values"]["bound"].as_str().unwrap().to_string()
    };
    assert_eq!(run("100"), "2_2^(2^64)");
    assert_eq!(run("4"), "2_4^6");
}
