use std::process::{Command, Output};

use serde_json::Value;
use sharelab_core::classifier::SolutionFamily;
use sharelab_core::diophantine::DescentCertificate;
use sharelab_core::function::Jet;
use sharelab_core::numeric::{Scalar, DEFAULT_TOL};
use sharelab_core::verifier::{Implication, VerificationReport};

fn sharelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharelab")).args(args).env_remove("SHARELAB_PRECISION").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--output", "structured"];
    all.extend_from_slice(args);
    let o = sharelab(&all);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("not structured: {e}\n{}", stdout(&o)));
    (code(&o), v)
}

const COUNTEREXAMPLE: [&str; 9] = ["verify", "--exppoly", "--lambda", "1", "--coeffs", "0,1,1", "--a", "1", "--b"];

#[test]
fn family_iv_holds() {
    let o = sharelab(&["verify", "--family", "iv", "--a", "8", "--C", "1"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("g estimate: -2/9"));
}

#[test]
fn every_family_holds_at_8_minus_1() {
    for fam in ["i", "ii", "iii", "iv"] {
        let o = sharelab(&["verify", "--family", fam, "--a", "8", "--b", "-1", "--C", "1"]);
        assert_eq!(code(&o), 0, "family {fam}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn closed_form_example_is_region_local() {
    let o = sharelab(&["verify", "--expr", "exp(z^3)-1", "--a", "-1", "--b", "0", "--relaxed", "--region", "-5,5,-5,5"]);
    assert_eq!(code(&o), 2, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("region"));
}

#[test]
fn zero_b_needs_relaxed_mode() {
    let o = sharelab(&["verify", "--expr", "exp(z^3)-1", "--a", "-1", "--b", "0"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn counterexample_is_violated_with_large_defect() {
    let mut args = COUNTEREXAMPLE.to_vec();
    args.push("3");
    let (c, v) = structured(&args);
    assert_eq!(c, 1);
    let report: VerificationReport = serde_json::from_value(v).unwrap();
    assert!(!report.holds_b_implies);
    let w = report.witnesses.iter().find(|w| w.implication == Implication::BImpliesB && w.location == Scalar::int(1)).unwrap();
    assert_eq!(w.lhs, Scalar::int(2));
    assert!(w.defect >= 1e6 * DEFAULT_TOL);
}

#[test]
fn exit_code_is_stable_across_regimes() {
    let mut bad = COUNTEREXAMPLE.to_vec();
    bad.push("3");
    let good = ["verify", "--family", "iv", "--a", "8"];
    for regime in ["exact", "float", "auto"] {
        let mut b = vec!["--regime", regime];
        b.extend_from_slice(&bad);
        assert_eq!(code(&sharelab(&b)), 1, "{regime}");
        let mut g = vec!["--regime", regime];
        g.extend_from_slice(&good);
        assert_eq!(code(&sharelab(&g)), 0, "{regime}");
    }
}

#[test]
fn exact_regime_refuses_floats() {
    let o = sharelab(&["--regime", "exact", "verify", "--family", "iv", "--a", "8.5@128"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("exact regime refused"), "{}", stderr(&o));
    let o = sharelab(&["verify", "--family", "iv", "--a", "8.5@128"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn verification_report_round_trips() {
    let (_, v) = structured(&["verify", "--family", "iv", "--a", "8"]);
    let report: VerificationReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v);
    assert_eq!(report.g_constant_estimate, Some(Scalar::ratio(-2, 9)));
}

#[test]
fn candidate_file_and_out() {
    let dir = std::env::temp_dir().join(format!("sharelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cand = dir.join("iv.json");
    std::fs::write(&cand, r#"{"kind": "exppoly", "lambda": "1/6", "coeffs": ["8", "-48", "48"], "a": "8", "b": "-1"}"#).unwrap();
    let out = dir.join("report.json");
    let o = sharelab(&["verify", cand.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.holds() && report.witnesses.is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_lists_families() {
    let (c, v) = structured(&["classify", "--a", "8", "--b", "-1"]);
    assert_eq!(c, 0);
    let fams: Vec<SolutionFamily> = serde_json::from_value(v["families"].clone()).unwrap();
    let labels: Vec<&str> = fams.iter().map(|f| f.kind.label()).collect();
    assert_eq!(labels, ["i", "ii", "iii", "iv"]);
    assert_eq!(serde_json::to_value(&fams).unwrap(), v["families"]);
    assert_eq!(v["iv_condition"], Value::Bool(true));

    let (_, v) = structured(&["classify", "--a", "1", "--b", "2"]);
    let fams: Vec<SolutionFamily> = serde_json::from_value(v["families"].clone()).unwrap();
    assert_eq!(fams.len(), 3);
    assert_eq!(v["iv_condition"], Value::Bool(false));

    assert_eq!(code(&sharelab(&["classify", "--a", "1", "--b", "1"])), 3);
}

#[test]
fn diophantine_certificates() {
    let o = sharelab(&["diophantine", "pell", "--D", "3", "--N", "13", "--xmod", "1:6", "--y", "even", "--bound", "51"]);
    assert_eq!(code(&o), 0);
    let (_, v) = structured(&["diophantine", "pell", "--D", "3", "--N", "13", "--xmod", "1:6", "--y", "even", "--bound", "51"]);
    let cert: DescentCertificate = serde_json::from_value(v.clone()).unwrap();
    assert!(cert.complete() && cert.solutions.is_empty());
    let mut back = serde_json::to_value(&cert).unwrap();
    back["subcommand"] = Value::String("pell".into());
    assert_eq!(back, v);

    let o = sharelab(&["diophantine", "squares", "--k", "2", "--nmax", "1000000"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("result: empty"));

    let o = sharelab(&["diophantine", "diffsq"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("x = 9, y = 8, n = 0"));

    assert_eq!(code(&sharelab(&["diophantine", "mod9"])), 0);
    assert_eq!(code(&sharelab(&["diophantine", "mnk", "--nmax", "30", "--kmax", "30", "--mmax", "31"])), 0);
    assert_eq!(code(&sharelab(&["diophantine", "djeq", "--nmax", "500"])), 0);
}

#[test]
fn square_hits_exit_nonzero() {
    // k = 1: 2(n+1)^2 + n = 9 at n = 1
    let o = sharelab(&["diophantine", "squares", "--k", "1", "--nmax", "10"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn jet_matches_closed_form() {
    let (c, v) = structured(&["jet", "--family", "iv", "--a", "8", "--C", "1", "--anchor", "a-point", "--order", "12"]);
    assert_eq!(c, 0);
    let closed: Jet = serde_json::from_value(v["closed_form"].clone()).unwrap();
    let rec: Jet = serde_json::from_value(v["branches"][0]["jet"].clone()).unwrap();
    assert_eq!(rec.order(), 12);
    assert_eq!(closed.derivs, rec.derivs);
    assert_eq!(rec.derivs[3], Scalar::ratio(14, 9));
}

#[test]
fn jet_order_two_echoes_seed() {
    let o = sharelab(&["jet", "--a", "8", "--b", "-1", "--order", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("f^(2) = 4") && !text.contains("f^(3)"), "{text}");
}

#[test]
fn jet_reports_vanishing_pivot() {
    let o = sharelab(&["jet", "--a", "-9", "--b", "1", "--k", "1", "--order", "6"]);
    assert_eq!(code(&o), 4);
    let err = stderr(&o);
    assert!(err.contains("pivot vanished at n = 2") && err.contains("diophantine squares"), "{err}");
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&sharelab(&["verify", "--bogus"])), 3);
    assert_eq!(code(&sharelab(&["--tol", "-1", "classify", "--a", "1", "--b", "2"])), 3);
    assert_eq!(code(&sharelab(&["verify", "--family", "iv"])), 3);
    assert_eq!(code(&sharelab(&["diophantine", "pell", "--D", "3", "--N", "13", "--bound", "51", "--unit", "2,2"])), 3);
    assert_eq!(code(&sharelab(&["--help"])), 0);
}

#[test]
fn precision_from_environment() {
    let run = |p: &str| {
        Command::new(env!("CARGO_BIN_EXE_sharelab"))
            .args(["classify", "--a", "8", "--b", "-1"])
            .env("SHARELAB_PRECISION", p)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("20")), 3);
    assert_eq!(code(&run("256")), 0);
}
