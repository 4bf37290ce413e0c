use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn hardylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(args)
        .output()
        .unwrap()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_seconds");
    v
}

const PROBE: &str = r#"{"command": "blowup-probe", "domain": {"kind": "slab", "n": 1, "d": 1},
    "params": {"d": 1, "p": "2", "s": "1/2", "tau": "2"}, "case": "1b" BETA}"#;

#[test]
fn exponents_case_1a() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "exp.json",
        r#"{"command": "exponents", "case": "1a", "params": {"d": 2, "p": "2", "s": "1/2", "tau": "2"}}"#,
    );
    let out = tmp.path().join("out");
    let o = hardylab(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["scalars"]["alpha"], "1");
    assert_eq!(s["scalars"]["beta"], "2");
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["command"], "exponents");
}

#[test]
fn lemma_suite_reruns_identically_across_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "lemmas.json",
        r#"{"command": "lemma-suite", "lemmas": {"elementary_draws": 5000, "average_cases": 50, "power_sum_draws": 500}}"#,
    );
    let mut records = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(format!("out{threads}"));
        let o = hardylab(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
            "--seed",
            "99",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        records.push((
            without_wall_time(summary(&out)),
            fs::read(out.join("asymptotic.csv")).unwrap(),
        ));
    }
    assert_eq!(records[0], records[1]);
    assert_eq!(records[0].0["seed"], 99);
}

#[test]
fn probe_control_and_beta_minus_one() {
    let tmp = tempfile::tempdir().unwrap();
    let mut verdicts = Vec::new();
    for (name, beta) in [("control", ""), ("minus", r#", "beta_prime": 1.0"#)] {
        let cfg = write_config(
            tmp.path(),
            &format!("{name}.json"),
            &PROBE.replace("BETA", beta),
        );
        let out = tmp.path().join(name);
        let o = hardylab(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        let csv = fs::read_to_string(out.join("levels.csv")).unwrap();
        assert!(csv.starts_with("depth,ratio,growth_factor\n8,"), "{csv}");
        verdicts.push(summary(&out)["scalars"]["verdict"].clone());
    }
    assert_eq!(
        verdicts,
        vec![Value::from("bounded"), Value::from("diverging")]
    );
}

#[test]
fn property_violation_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "p.json",
        &PROBE.replace("BETA", r#", "expect": "diverging""#),
    );
    let o = hardylab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let record: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(record["passed"], false);
}

#[test]
fn invalid_configs_exit_two_with_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"command": "exponents", "case": "1a", "params": {"d": 2, "p": "2", "s": "1/2", "tau": "2"}}"#,
    );
    let o = hardylab(&["--config", cfg.to_str().unwrap(), "--resolution", "48"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`resolution`"));

    let missing = tmp.path().join("nope.json");
    let o = hardylab(&["--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.json"));
}

#[test]
fn module_error_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    // Case 2a needs sp = d; on the slab no bounded case applies to sp = 2.
    let cfg = write_config(
        tmp.path(),
        "e.json",
        r#"{"command": "hardy-check", "domain": {"kind": "slab", "n": 1, "d": 2},
            "params": {"d": 2, "p": "4", "s": "1/2", "tau": "4"},
            "function": {"kind": "tensor_bump", "center": [0.0, 0.5], "radius": [0.2, 0.2]}}"#,
    );
    let out = tmp.path().join("out");
    let o = hardylab(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&out)["error"]["kind"], "case_dispatch");
}

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = hardylab::runner::ExperimentConfig::load(&path).unwrap();
        cfg.validate()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = hardylab::runner::ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        n += 1;
    }
    assert!(n >= 7);
}
