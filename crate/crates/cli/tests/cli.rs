use std::io::Write;
use std::process::{Command, Output};

use rtcheck::amplitude::AmplitudeReport;
use rtcheck::report::VerificationReport;
use tempfile::NamedTempFile;

const DELTA: &str = "bulk = \"identity\"\ndefect = \"delta:eta=1\"\nsamples = 10\nseed = 3\n";

fn config(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn rtcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtcheck")).args(args).env_remove("RTCHECK_TOLERANCE").output().unwrap()
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn verify_passing_model_exits_zero() {
    let f = config(DELTA);
    let out = rtcheck(&["verify", "--config", path(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS  ybe"));
    assert!(text.lines().last().unwrap().starts_with("PASS:"));
}

#[test]
fn verify_failing_model_exits_one() {
    let f = config(
        "bulk = \"identity\"\ndefect = \"custom\"\nsamples = 5\nchecks = [\"defect-unitarity\"]\n\
         [custom_defect]\ndim = 1\ntransmission = [[\"k/(k+1i)\"]]\nreflection = [[\"-1.1i/(k+1i)\"]]\n",
    );
    assert_eq!(rtcheck(&["verify", "--config", path(&f)]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_two() {
    for bad in ["bulk = \"identity\"\ndefect = \"delta:eta=1\"\ncolour = 3\n", "bulk = \"nope\"\ndefect = \"delta\"\n"]
    {
        let f = config(bad);
        let out = rtcheck(&["verify", "--config", path(&f)]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(rtcheck(&["verify", "--config", "/nonexistent/rtcheck.toml"]).status.code(), Some(2));
    let f = config("bulk = \"identity\"\ndefect = \"delta:eta=1\"\nchecks = [\"ybe\", \"bogus\"]\n");
    let out = rtcheck(&["verify", "--config", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn json_reports_are_deterministic_and_round_trip() {
    let f = config(DELTA);
    let a = rtcheck(&["verify", "--config", path(&f), "--format", "json"]).stdout;
    let b = rtcheck(&["verify", "--config", path(&f), "--format", "json"]).stdout;
    assert_eq!(a, b);
    let report: VerificationReport = serde_json::from_slice(&a).unwrap();
    assert_eq!(report.schema, "rtcheck-report/1");
    assert!(report.pass);
    assert_eq!(report.config.seed, 3);
    let reseeded = rtcheck(&["verify", "--config", path(&f), "--format", "json", "--seed", "4"]).stdout;
    let other: VerificationReport = serde_json::from_slice(&reseeded).unwrap();
    assert_eq!(other.config.seed, 4);
    assert_ne!(other.checks[0].worst_momenta, report.checks[0].worst_momenta);
}

#[test]
fn tolerance_from_environment() {
    let f = config(DELTA);
    let out = Command::new(env!("CARGO_BIN_EXE_rtcheck"))
        .args(["verify", "--config", path(&f), "--format", "json"])
        .env("RTCHECK_TOLERANCE", "1e-7")
        .output()
        .unwrap();
    let report: VerificationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.tolerance, 1e-7);
}

fn amplitude(args: &[&str]) -> (Option<i32>, Option<AmplitudeReport>) {
    let f = config(DELTA);
    let mut full = vec!["amplitude", "--config", path(&f)];
    full.extend_from_slice(args);
    let out = rtcheck(&full);
    (out.status.code(), serde_json::from_slice(&out.stdout).ok())
}

#[test]
fn amplitude_queries() {
    let (code, r) = amplitude(&["--n", "0"]);
    assert_eq!(code, Some(0));
    let r = r.unwrap();
    assert_eq!(r.terms.len(), 1);
    assert_eq!(r.terms[0].value, [1.0, 0.0]);

    let (code, r) = amplitude(&["--n", "1", "--in", "2", "--out", "-2"]);
    assert_eq!(code, Some(0));
    let r = r.unwrap();
    assert_eq!(r.terms.len(), 2);
    let reflected = r.terms.iter().find(|t| t.supported).unwrap();
    assert_eq!(reflected.pairing[0].sign, -1);
    // 2π·R(2) with R(2) = -0.2 - 0.4i
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((reflected.value[0] + 0.2 * two_pi).abs() < 1e-13);
    assert!((reflected.value[1] + 0.4 * two_pi).abs() < 1e-13);

    let (code, r) = amplitude(&["--n", "2", "--in", "-1,2", "--out", "2,1"]);
    assert_eq!(code, Some(0));
    assert_eq!(r.unwrap().terms.iter().filter(|t| t.supported).count(), 1);
}

#[test]
fn amplitude_ordering_violation() {
    assert_eq!(amplitude(&["--n", "2", "--in", "2,-1", "--out", "2,1"]).0, Some(2));
    let (code, r) = amplitude(&["--n", "2", "--in", "2,-1", "--out", "2,1", "--allow-nonphysical"]);
    assert_eq!(code, Some(0));
    assert!(!r.unwrap().physical);
    assert_eq!(amplitude(&["--n", "2", "--in", "1", "--out", "1"]).0, Some(2));
}

#[test]
fn catalog_lists_builtins() {
    let out = rtcheck(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "identity",
        "permutation",
        "rational",
        "delta",
        "pure-transmission",
        "pure-reflection",
        "TSRS+",
        "factorization(n)",
    ] {
        assert!(text.contains(name), "{name}");
    }
}
