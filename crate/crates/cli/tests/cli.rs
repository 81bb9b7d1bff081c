use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn opertone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opertone")).args(args).output().expect("spawn opertone")
}

fn opertone_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opertone"))
        .args(args)
        .env(key, value)
        .output()
        .expect("spawn opertone")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn entries(v: &Value, field: &str) -> Vec<Vec<f64>> {
    v[field]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

const BRANCH: &[&str] = &[
    "verify", "--spec", "ktone 2 atoms [(1, 0.5), (0.5, -0.25)]", "--check", "branch", "--k", "2",
    "--dims", "2,3", "--trials", "40", "--seed", "3", "--no-timestamp",
];

#[test]
fn passing_campaign_exits_zero() {
    let out = opertone(BRANCH);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for (r, n) in reports.iter().zip([2, 3]) {
        assert_eq!(r["verdict"], "pass");
        assert_eq!(r["n"], n);
        assert_eq!(r["margins"].as_array().unwrap().len(), 40);
        assert!(r.get("timestamp").is_none());
    }
}

#[test]
fn timestamp_is_present_by_default() {
    let args: Vec<&str> = BRANCH.iter().copied().filter(|a| *a != "--no-timestamp").collect();
    let out = opertone(&args);
    assert_eq!(code(&out), 0);
    assert!(json(&out)[0]["timestamp"].as_u64().is_some());
}

#[test]
fn mis_tagged_exp_is_refuted() {
    let out = opertone(&[
        "verify", "--spec", "exp on (-1, 1)", "--claim", "ktone:1", "--check", "derivative-sign", "--k", "1",
        "--dims", "3", "--trials", "20", "--no-timestamp",
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)[0]["verdict"], "refuted");
    assert!(String::from_utf8_lossy(&out.stderr).contains("refuted at n = 3"));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(code(&opertone(&["verify", "--check", "nonsense"])), 1);
    assert_eq!(code(&opertone(&["frobnicate"])), 1);
    let out = opertone(&["verify", "--spec", "ktone 2 atoms [(1, 0.5)", "--check", "branch", "--k", "2"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_certificate_exits_four() {
    let out = opertone(&["verify", "--spec", "exp on (-1, 1)", "--check", "pick", "--dims", "2", "--trials", "5"]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis"));
}

#[test]
fn all_skipped_log_trials_are_inconclusive() {
    // a huge tolerance makes every Re f(X) margin too small to take a logarithm
    let args = [
        "verify", "--spec", "inv", "--check", "half-plane", "--part", "log", "--dims", "2", "--trials", "10",
        "--no-timestamp",
    ];
    assert_eq!(code(&opertone(&args)), 0);
    let out = opertone_env(&args, "OPERTONE_TOL", "1e6");
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let r = &json(&out)[0];
    assert_eq!(r["verdict"], "inconclusive");
    assert_eq!(r["skipped"], 10);
    assert_eq!(r["tau"], 1e6);
}

#[test]
fn bad_tolerance_override_exits_one() {
    let out = opertone_env(BRANCH, "OPERTONE_TOL", "-1");
    assert_eq!(code(&out), 1);
    let out = opertone_env(BRANCH, "OPERTONE_TOL", "tight");
    assert_eq!(code(&out), 1);
}

#[test]
fn csv_has_one_row_per_trial() {
    let args: Vec<&str> = BRANCH.iter().copied().chain(["--csv"]).collect();
    let out = opertone(&args);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,n,trial,seed,margin"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 80);
    assert!(rows.iter().all(|r| r.len() == 5 && r[0] == "branch k=2"));
    assert!(rows.iter().all(|r| r[4].parse::<f64>().is_ok()));
}

#[test]
fn config_file_matches_flags_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "campaign.json",
        r#"{
            "check": {"name": "branch", "k": 2},
            "spec": "ktone 2 atoms [(1, 0.5), (0.5, -0.25)]",
            "dims": [2, 3],
            "trials": 40,
            "seed": 3
        }"#,
    );
    let from_file = opertone(&["verify", "--config", &cfg, "--no-timestamp"]);
    assert_eq!(code(&from_file), 0, "{}", String::from_utf8_lossy(&from_file.stderr));
    assert_eq!(from_file.stdout, opertone(BRANCH).stdout);

    let report = dir.path().join("out.json");
    let overridden = opertone(&[
        "verify", "--config", &cfg, "--seed", "4", "--dims", "2", "--no-timestamp", "--output", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&overridden), 0);
    assert!(overridden.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(written[0]["seed"], 4);
    assert_eq!(written.as_array().unwrap().len(), 1);

    let typo = write(dir.path(), "typo.json", r#"{"spec": "inv", "trails": 3}"#);
    assert_eq!(code(&opertone(&["verify", "--config", &typo])), 1);
}

#[test]
fn funcalc_identity_echoes_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "x.json", r#"{"n": 2, "re": [[1.5, -0.25], [0.5, 2.0]], "im": [[0.1, 0.0], [0.0, -0.3]]}"#);
    let out = opertone(&["funcalc", "--spec", "id", "--matrix", &m]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let re = entries(&v["value"], "re");
    let im = entries(&v["value"], "im");
    let expect_re = [[1.5, -0.25], [0.5, 2.0]];
    let expect_im = [[0.1, 0.0], [0.0, -0.3]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((re[i][j] - expect_re[i][j]).abs() < 1e-12);
            assert!((im[i][j] - expect_im[i][j]).abs() < 1e-12);
        }
    }
}

#[test]
fn funcalc_compare_reports_path_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "x.json", r#"{"n": 2, "re": [[2.0, 0.5], [0.5, 1.0]], "im": [[0.5, 0.0], [0.0, 0.25]]}"#);
    let out = opertone(&["funcalc", "--spec", "log", "--matrix", &m, "--compare"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["difference"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["eigen"]["path"], "eigen");
    assert_eq!(v["contour"]["path"], "contour");
}

#[test]
fn funcalc_outside_the_domain_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "x.json", r#"{"n": 1, "re": [[-2.0]]}"#);
    assert_eq!(code(&opertone(&["funcalc", "--spec", "log", "--matrix", &m])), 4);
}

#[test]
fn frechet_order_zero_is_the_function_value() {
    let dir = tempfile::tempdir().unwrap();
    // upper triangle only; the lower part follows by symmetry
    let a = write(dir.path(), "a.json", r#"{"n": 2, "re": [[0.5, 0.1], [-0.2]], "im": [[0.0, 0.05], [0.0]]}"#);
    let b = write(dir.path(), "b.json", r#"{"n": 2, "re": [[1.0, 0.0], [1.0]]}"#);
    let full = write(dir.path(), "af.json", r#"{"n": 2, "re": [[0.5, 0.1], [0.1, -0.2]], "im": [[0.0, 0.05], [-0.05, 0.0]]}"#);
    let spec = "ktone 1 poly [0.25] atoms [(1, 0.5)]";
    let d = opertone(&["frechet", "--spec", spec, "--a", &a, "--b", &b, "-m", "0"]);
    assert_eq!(code(&d), 0, "{}", String::from_utf8_lossy(&d.stderr));
    let f = opertone(&["funcalc", "--spec", spec, "--matrix", &full]);
    assert_eq!(code(&f), 0);
    let (d, f) = (json(&d), json(&f));
    assert_eq!(d["order"], 0);
    for field in ["re", "im"] {
        let (x, y) = (entries(&d["value"], field), entries(&f["value"], field));
        for (rx, ry) in x.iter().zip(&y) {
            for (p, q) in rx.iter().zip(ry) {
                assert!((p - q).abs() < 1e-12, "{field}: {p} vs {q}");
            }
        }
    }
}

#[test]
fn frechet_of_identity_is_the_direction() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"n": 2, "re": [[0.3, 0.0], [0.7]]}"#);
    let b = write(dir.path(), "b.json", r#"{"n": 2, "re": [[1.0, 2.0], [-1.0]]}"#);
    for engine in ["contour", "divided", "fd", "closed"] {
        let out = opertone(&["frechet", "--spec", "id", "--a", &a, "--b", &b, "--engine", engine]);
        assert_eq!(code(&out), 0, "{engine}: {}", String::from_utf8_lossy(&out.stderr));
        let re = entries(&json(&out)["value"], "re");
        let expect = [[1.0, 2.0], [2.0, -1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((re[i][j] - expect[i][j]).abs() < 1e-8, "{engine}");
            }
        }
    }
}

#[test]
fn counterexample_searches_meet_expectations() {
    // below the threshold nothing is found, and that is the expected outcome
    let out = opertone(&["counterexample", "--kind", "power-im", "--p", "1.5", "--budget", "2000", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["found"], false);
    assert_eq!(v["expected_found"], false);
    assert!(v["witness"].is_null());

    let out = opertone(&["counterexample", "--kind", "power-im", "--p", "2.5", "--budget", "2000"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["found"], true);
    assert_eq!(v["witness"]["reverified"], true);

    let out = opertone(&["counterexample", "--kind", "power-re", "--p", "2", "--budget", "2000"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["found"], false);

    let out = opertone(&["counterexample", "--kind", "anticommutator", "--budget", "2000"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["found"], true);

    assert_eq!(code(&opertone(&["counterexample", "--kind", "power-re"])), 1);
}
