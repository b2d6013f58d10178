use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_estimate-lab"));
    c.env("ESTIMATE_LAB_THREADS", "2");
    c
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

const SMALL: &str = r#"{
  "scenario": {
    "domain": {"kind": "segment", "R": 1.0, "h": 0.1},
    "window": {"t0": 1.0, "T": 1.0},
    "dt": 0.1,
    "nonlinearity": {"family": "power", "p": 0.75, "M": 1.0},
    "solution": {"source": "manufactured",
                 "target": {"family": "wave", "base": 0.5, "amp": 0.25}}
  },
  "partition": {"C_cal": CCAL},
  "checks": ["hypotheses", "lemma21", "theorem", "corollary", "regimes"],
  "refinement_levels": 3
}"#;

fn small(dir: &Path, c_cal: &str) -> PathBuf {
    let p = dir.join(format!("small_{}.json", c_cal.replace('"', "")));
    fs::write(&p, SMALL.replace("CCAL", c_cal)).unwrap();
    p
}

#[test]
fn report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "\"auto\"");
    let out = dir.path().join("out");
    let res = run(&["run", cfg.to_str().unwrap()], &out);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rep: Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for key in [
        "mu1", "mu2", "gamma1", "gamma2", "gamma3", "tau_u", "sigma_u", "C_scalar", "T_scalar",
        "S_scalar", "beta1", "beta2", "beta3", "iota", "checks", "pass",
    ] {
        assert!(rep.get(key).is_some(), "missing {key}");
    }
    let checks = &rep["checks"];
    assert!(checks["lemma21"]["convergence_order"].is_number());
    assert!(checks["theorem"]["C_emp"].is_number());
    let pernode = fs::read_to_string(out.join("pernode.csv")).unwrap();
    assert!(pernode.starts_with("check,x,t,lhs,rhs,margin,regime\n"));
    let plot = fs::read_to_string(out.join("plotdata.csv")).unwrap();
    assert!(plot.starts_with("x,t,u,w,Z,theorem_margin,lemma21_margin\n"));
    assert!(plot.lines().count() > 10);
}

#[test]
fn violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "1e-9");
    let res = run(&["run", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(1));
    let rep: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(rep["checks"]["theorem"]["pass"], Value::Bool(false));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_p = dir.path().join("p.json");
    fs::write(
        &bad_p,
        SMALL
            .replace("CCAL", "\"auto\"")
            .replace("\"segment\"", "\"radial\", \"n\": 2")
            .replace("0.75", "0.2"),
    )
    .unwrap();
    let res = run(&["run", bad_p.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("admissible range"));

    let syntax = dir.path().join("s.json");
    fs::write(&syntax, "{\n  \"scenario\": {,\n}").unwrap();
    let res = run(&["run", syntax.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(res.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&res.stderr);
    assert!(msg.contains("line 2") && msg.contains("column"), "{msg}");

    let res = run(&["run", "/nonexistent.json"], &dir.path().join("o"));
    assert_eq!(res.status.code(), Some(2));

    let res = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(res.status.code(), Some(2));

    let res = bin()
        .env("ESTIMATE_LAB_THREADS", "zero")
        .args(["hypotheses"])
        .arg(configs().join("barenblatt.json"))
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn sweep_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "\"auto\"");
    let out = dir.path().join("sw");
    let res = run(
        &[
            "sweep",
            cfg.to_str().unwrap(),
            "--param",
            "rho",
            "--values",
            "0.25,0.5,0.75",
        ],
        &out,
    );
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,value,C_emp,corollary_C_emp,worst_margin,tol,tol_space,C_scalar,T_scalar,S_scalar,pass"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("rho,0.25,"));
    // S depends on rho; C does not
    let col = |r: &str, i: usize| r.split(',').nth(i).unwrap().parse::<f64>().unwrap();
    assert_ne!(col(rows[0], 9), col(rows[2], 9));
    assert_eq!(col(rows[0], 7), col(rows[2], 7));

    let res = run(
        &[
            "sweep",
            cfg.to_str().unwrap(),
            "--param",
            "rho",
            "--values",
            "2",
        ],
        &out,
    );
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn hypotheses_command() {
    let res = bin()
        .arg("hypotheses")
        .arg(configs().join("barenblatt.json"))
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&res.stdout).unwrap();
    let kappa = v["report"]["kappa_min"].as_f64().unwrap();
    assert!((kappa - (1.0 - 2f64.sqrt() / 4.0)).abs() < 1e-9);
    assert!(v["failure"].is_null());
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "\"auto\"");
    let read = |o: &str| {
        let out = dir.path().join(o);
        assert_eq!(
            run(&["run", cfg.to_str().unwrap()], &out).status.code(),
            Some(0)
        );
        ["report.json", "pernode.csv", "plotdata.csv"].map(|f| fs::read(out.join(f)).unwrap())
    };
    let a = read("a");
    let b = read("b");
    assert_eq!(a, b);
}
