use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use sfrac_core::scenarios::Report;

fn sfrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfrac"))
        .args(args)
        .output()
        .expect("run sfrac")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn reports(o: &Output) -> Vec<Report> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("report record"))
        .collect()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sfrac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn near(z: Option<Complex64>, re: f64) -> bool {
    z.is_some_and(|z| (z - Complex64::new(re, 0.0)).norm() < 1e-10)
}

#[test]
fn cohomology_counts() {
    for (g, q, want) in [
        ("Z2", "Z2", "2 classes, 2 orbits"),
        ("Z2", "Z2xZ2", "8 classes, 4 orbits"),
        ("Z3", "Z3", "3 classes, 2 orbits"),
    ] {
        let o = sfrac(&["cohomology", "--group", g, "--symmetry", q]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).lines().next().unwrap(), want);
    }
}

#[test]
fn tc_all_backends_agree() {
    let o = sfrac(&["order-param", "tc-z2", "--class", "nontrivial", "--backend", "all", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let r = reports(&o);
    assert_eq!(r.len(), 1);
    assert!(near(r[0].analytic, -1.0) && near(r[0].loop_value, -1.0) && near(r[0].oracle, -1.0));
    assert!(r[0].agree);
    assert_eq!(r[0].extension, "Z4");
}

#[test]
fn q8_and_trivial_zp() {
    let o = sfrac(&["order-param", "q8", "--class", "z2xq8", "--format", "structured"]);
    let r = reports(&o);
    // character sum −1 over the 2-dim irrep, i.e. Λ̂ = −1/2
    assert!(near(r[0].loop_value, -0.5), "{:?}", r[0]);
    let o = sfrac(&["order-param", "zp", "--p", "3", "--class", "0", "--format", "structured"]);
    assert!(reports(&o).iter().all(|r| near(r.loop_value, 1.0)));
}

#[test]
fn human_and_structured_values_match() {
    let human = stdout(&sfrac(&["order-param", "z4-perm"]));
    let structured = reports(&sfrac(&["order-param", "z4-perm", "--format", "structured"]));
    let lines: Vec<&str> = human.lines().collect();
    assert_eq!(lines.len(), structured.len());
    for (line, r) in lines.iter().zip(&structured) {
        assert!(line.starts_with(&r.scenario));
        let z = r.loop_value.unwrap();
        assert!(line.contains(&format!("loop={}{:+}i", z.re, z.im)), "{line}");
    }
}

#[test]
fn records_are_sorted_and_round_trip() {
    let o = sfrac(&["order-param", "tc-z2z2", "--format", "structured"]);
    let r = reports(&o);
    assert_eq!(r.len(), 12);
    let ids: Vec<&str> = r.iter().map(|x| x.scenario.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for rec in &r {
        let again: Report = serde_json::from_str(&serde_json::to_string(rec).unwrap()).unwrap();
        assert_eq!(&again, rec);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(sfrac(&["order-param", "no-such"]).status.code(), Some(2));
    assert_eq!(sfrac(&["order-param", "tc-z2", "--class", "odd"]).status.code(), Some(2));
    assert_eq!(sfrac(&["order-param", "tc-z2", "--tol", "0"]).status.code(), Some(2));
    // a tolerance below rounding noise turns agreement into a failure
    assert_eq!(sfrac(&["order-param", "zp", "--p", "5", "--tol", "1e-300"]).status.code(), Some(3));
}

#[test]
fn group_files() {
    let good = temp_file("z2.json", r#"{"order": 2, "table": [[0, 1], [1, 0]]}"#);
    let o = sfrac(&["cohomology", "--group", good.to_str().unwrap(), "--symmetry", "Z2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("2 classes"));

    let named = temp_file("q8.json", r#"{"preset": "Q8"}"#);
    let o = sfrac(&["braiding", "--group", named.to_str().unwrap()]);
    assert!(o.status.success());

    let broken = temp_file("broken.json", "{\"order\": 2,\n \"table\": [[0, 1], [1 0]]}");
    let o = sfrac(&["braiding", "--group", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("broken.json:2:"), "{err}");
    assert!(err.contains("[1 0]"), "{err}");

    let not_group = temp_file("bad.json", r#"{"order": 2, "table": [[0, 1], [1, 1]]}"#);
    assert_eq!(sfrac(&["braiding", "--group", not_group.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn braiding_z2() {
    let o = sfrac(&["braiding", "--group", "Z2", "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["values"], serde_json::json!([[[1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [-1.0, 0.0]]]));
    assert_eq!(v["agree"], true);
}

#[test]
fn reproductions_succeed() {
    for cmd in ["table1", "fig2", "appendix-c", "trs-tc"] {
        let o = sfrac(&[cmd]);
        assert!(o.status.success(), "{cmd}");
    }
    let t = stdout(&sfrac(&["table1", "--format", "structured"]));
    let v: serde_json::Value = serde_json::from_str(t.trim()).unwrap();
    assert_eq!(v["columns"][3]["triple"], serde_json::json!([-1, -1, -1]));
}

#[test]
fn verify_is_deterministic_and_catches_bad_cocycles() {
    let a = sfrac(&["verify", "--seed", "7"]);
    let b = sfrac(&["verify", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let bad = sfrac(&["verify", "--inject-bad-cocycle"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stdout(&bad).contains("FAIL cocycle condition"));
}
