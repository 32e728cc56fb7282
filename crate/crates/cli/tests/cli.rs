use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const DUP2: &str = r#"{"schema":1,"p":2,"r":2,"d":2,"n":4,"F":[1,0,1,0,0,1,0,1],"T":[1,1,0,0,0,0,1,1],"label":"dup2"}"#;
const TWO_ROWS: &str = r#"{"schema":1,"p":2,"r":2,"d":2,"n":2,"F":[1,0,0,1],"T":[1,0,0,1],"label":"two-rows"}"#;

fn pasf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pasf"))
        .args(args)
        .env_remove("PASF_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn analyze_standard_builtin() {
    let out = pasf(&["analyze", "--builtin", "standard", "--d", "3", "--p", "2", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["tag"], "p-orthonormal-basis");
    assert_eq!(v["config"]["subcommand"], "analyze");
}

#[test]
fn feichtinger_partition_on_duplicated_file() {
    let dir = TempDir::new().unwrap();
    let frame = write(dir.path(), "dup2.json", DUP2);
    let out = pasf(&[
        "partition",
        "--criterion",
        "feichtinger",
        "--frame",
        frame.to_str().unwrap(),
        "--a-min",
        "0.5",
        "--max-M",
        "4",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let parts = v["result"]["witness"]["certificate"]["parts"].as_array().unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(v["problem"], "feichtinger-pair-partition");
}

#[test]
fn phase_retrieval_counterexample_exits_one() {
    let dir = TempDir::new().unwrap();
    let frame = write(dir.path(), "two_rows.json", TWO_ROWS);
    let out = pasf(&["retrieval", "--frame", frame.to_str().unwrap(), "--kind", "phase"]);
    assert_eq!(code(&out), 1);
    let w = &stdout_json(&out)["result"]["witness"];
    assert_eq!(w["x"], serde_json::json!([1.0, 1.0]));
    assert_eq!(w["y"], serde_json::json!([1.0, -1.0]));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"schema":1,"p":2,"r":2,"d":2,"n":2,"F":[1,0,0],"T":[1,0,0,1]}"#,
    );
    assert_eq!(code(&pasf(&["analyze", "--frame", bad.to_str().unwrap()])), 65);
    let garbage = write(dir.path(), "garbage.json", "{ not json");
    assert_eq!(code(&pasf(&["analyze", "--frame", garbage.to_str().unwrap()])), 65);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&pasf(&["analyze", "--frame", missing.to_str().unwrap()])), 66);
    assert_eq!(code(&pasf(&["no-such-subcommand"])), 64);
    let budget = [
        "partition", "--criterion", "weaver", "--builtin", "duplicated", "--d", "2", "--k", "2", "--b", "2", "--eps",
        "1", "--M", "2",
    ];
    let mut args = budget.to_vec();
    args.extend(["--budget-nodes", "0"]);
    assert_eq!(code(&pasf(&args)), 64);
    let mut args = budget.to_vec();
    args.extend(["--budget-seconds", "-1"]);
    assert_eq!(code(&pasf(&args)), 64);
    let out_file = write(dir.path(), "occupied", "a file, not a directory");
    let mut args = vec!["analyze", "--builtin", "standard", "--d", "2", "--output-dir"];
    args.push(out_file.to_str().unwrap());
    assert_eq!(code(&pasf(&args)), 74);
}

#[test]
fn legacy_frame_warning_is_recorded() {
    let dir = TempDir::new().unwrap();
    let frame = write(dir.path(), "legacy.json", r#"{"p":3,"d":1,"n":1,"F":[1],"T":[1]}"#);
    let out_dir = dir.path().join("out");
    let out = pasf(&["analyze", "--frame", frame.to_str().unwrap(), "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let run = read_json(&out_dir.join("run.json"));
    let warnings: Vec<String> = serde_json::from_value(run["warnings"].clone()).unwrap();
    assert!(warnings.iter().any(|w| w.contains("defaulted to r = p")));
    assert_eq!(stdout_json(&out)["result"]["frame"]["r"], 3.0);
}

fn cached(out_dir: &Path) -> bool {
    read_json(&out_dir.join("run.json"))["cached"].as_bool().unwrap()
}

#[test]
fn cache_hits_and_misses() {
    let dir = TempDir::new().unwrap();
    let frame = write(dir.path(), "dup2.json", DUP2);
    let out_dir = dir.path().join("out");
    let run = |seed: &str| {
        pasf(&[
            "partition",
            "--criterion",
            "weaver",
            "--frame",
            frame.to_str().unwrap(),
            "--b",
            "2",
            "--eps",
            "1",
            "--M",
            "2",
            "--seed",
            seed,
            "--output-dir",
            out_dir.to_str().unwrap(),
        ])
    };
    let first = run("1");
    assert_eq!(code(&first), 0);
    assert!(!cached(&out_dir));
    let report_first = std::fs::read(out_dir.join("report.json")).unwrap();

    let second = run("1");
    assert_eq!(code(&second), 0);
    assert!(cached(&out_dir));
    assert_eq!(std::fs::read(out_dir.join("report.json")).unwrap(), report_first);
    assert_eq!(first.stdout, second.stdout);

    let _ = run("2");
    assert!(!cached(&out_dir), "changed seed must miss");

    // Same path, different bytes.
    write(dir.path(), "dup2.json", &DUP2.replace("\"dup2\"", "\"dup2-renamed\""));
    let _ = run("1");
    assert!(!cached(&out_dir), "changed input bytes must miss");

    // A damaged record is skipped and rewritten.
    for entry in std::fs::read_dir(out_dir.join("cache")).unwrap() {
        std::fs::write(entry.unwrap().path(), "{ truncated").unwrap();
    }
    let after = run("1");
    assert_eq!(code(&after), 0);
    assert!(String::from_utf8_lossy(&after.stderr).contains("corrupted cache record"));
    assert!(!cached(&out_dir));
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let commands: [&[&str]; 2] = [
        &["partition", "--criterion", "weaver", "--builtin", "duplicated", "--d", "3", "--k", "2", "--b", "1", "--eps",
          "0.5", "--M", "2", "--seed", "7"],
        &["continuous", "--task", "norms", "--p", "3", "--nodes", "24", "--samples", "64", "--seed", "7"],
    ];
    for (c, args) in commands.iter().enumerate() {
        let mut reports = Vec::new();
        for (i, threads) in ["1", "4", "1"].iter().enumerate() {
            let out_dir = dir.path().join(format!("out{c}-{i}"));
            let mut full = args.to_vec();
            full.extend(["--threads", threads, "--no-cache", "--output-dir", out_dir.to_str().unwrap()]);
            let out = pasf(&full);
            assert!(matches!(code(&out), 0..=2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
            reports.push(std::fs::read(out_dir.join("report.json")).unwrap());
        }
        assert_eq!(reports[0], reports[1]);
        assert_eq!(reports[0], reports[2]);
    }
}

#[test]
fn config_file_drives_a_run() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "dup2.json", DUP2);
    let cfg = write(
        dir.path(),
        "exp.json",
        r#"{"subcommand": "partition", "input": "dup2.json", "output_dir": "out",
            "params": {"criterion": "feichtinger", "a_min": 0.5, "max-M": 4}}"#,
    );
    let out = pasf(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("out").join("report.json"));
    assert_eq!(report["config"]["params"]["a_min"], 0.5);

    let unknown = write(dir.path(), "bad.json", r#"{"subcommand": "analyze", "colour": 1}"#);
    assert_eq!(code(&pasf(&["--config", unknown.to_str().unwrap()])), 65);
    let bad_param = write(
        dir.path(),
        "bad_param.json",
        r#"{"subcommand": "analyze", "input": "standard", "params": {"d": 2, "flavour": 1}}"#,
    );
    assert_eq!(code(&pasf(&["--config", bad_param.to_str().unwrap()])), 64);
}

#[test]
fn weaver_sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let out = pasf(&[
        "partition",
        "--criterion",
        "weaver",
        "--builtin",
        "duplicated",
        "--d",
        "3",
        "--k",
        "2",
        "--b",
        "1",
        "--eps",
        "0.5",
        "--M",
        "2",
        "--max-M",
        "3",
        "--sweep",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("weaver_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,objective,objective_lower,status");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("2,0.5,"));
}

#[test]
fn continuous_circle_operator_and_sweep() {
    let out = pasf(&["continuous", "--p", "2", "--nodes", "16"]);
    assert_eq!(code(&out), 0);
    let s = &stdout_json(&out)["result"]["frame_operator"];
    let pi = std::f64::consts::PI;
    assert!((s[0][0].as_f64().unwrap() - pi).abs() <= 1e-10);
    assert!(s[0][1].as_f64().unwrap().abs() <= 1e-10);

    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let out = pasf(&["continuous", "--task", "sweep", "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(out_dir.join("quadrature_sweep.csv")).unwrap();
    assert!(csv.starts_with("rule,nodes,error,reference\n"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn continuous_tabulated_family() {
    let dir = TempDir::new().unwrap();
    let table = write(dir.path(), "fam.csv", "alpha,w,f1,t1\n0,1,1,1\n1,1,1,1\n");
    let out = pasf(&["continuous", "--family", "tabulated", "--table", table.to_str().unwrap(), "--nodes", "5"]);
    assert_eq!(code(&out), 0);
    let s = &stdout_json(&out)["result"]["frame_operator"];
    assert!((s[0][0].as_f64().unwrap() - 1.0).abs() <= 1e-14);
}

#[test]
fn verify_accepts_a_written_report() {
    let dir = TempDir::new().unwrap();
    let frame = write(dir.path(), "dup2.json", DUP2);
    let out_dir = dir.path().join("out");
    let out = pasf(&[
        "partition",
        "--criterion",
        "feichtinger",
        "--frame",
        frame.to_str().unwrap(),
        "--a-min",
        "0.5",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = out_dir.join("report.json");
    let ok = pasf(&["verify", "--frame", frame.to_str().unwrap(), "--certificate", report.to_str().unwrap()]);
    assert_eq!(code(&ok), 0);

    // Merge the two parts: no longer a Riesz sequence.
    let mut v = read_json(&report);
    v["result"]["witness"]["certificate"]["parts"] = serde_json::json!([[0, 1, 2, 3]]);
    let cert = &v["result"]["witness"]["certificate"];
    let mut cert = cert.clone();
    cert["per_part"] = serde_json::json!([cert["per_part"][0].clone()]);
    let tampered = write(dir.path(), "tampered.json", &cert.to_string());
    let bad = pasf(&["verify", "--frame", frame.to_str().unwrap(), "--certificate", tampered.to_str().unwrap()]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn every_subcommand_runs() {
    let dir = TempDir::new().unwrap();
    let frame = write(dir.path(), "dup2.json", DUP2);
    let f = frame.to_str().unwrap();
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["certify-riesz", "--builtin", "standard", "--d", "2"], 0),
        (vec!["certify-riesz", "--frame", f], 1),
        (vec!["scale", "--builtin", "standard", "--d", "2"], 0),
        (vec!["reconstruct", "--builtin", "standard", "--d", "2", "--x", "1,-2"], 0),
        (vec!["reconstruct", "--builtin", "random", "--d", "2", "--n", "4", "--x", "1,-2"], 2),
        (
            vec!["dynamics", "--builtin", "standard", "--d", "2", "--u", "0,1,1,0", "--v", "0,1,1,0", "--horizon", "2"],
            0,
        ),
        (vec!["inequality", "--a", "1,1,1", "--d", "2", "--p", "2"], 0),
        (vec!["inequality", "--a", "2,1,1", "--d", "2", "--p", "2"], 1),
        (vec!["decompose", "--builtin", "standard", "--d", "2", "--p", "3"], 0),
        (vec!["continuous", "--task", "norms", "--samples", "16"], 0),
        (vec!["continuous", "--task", "defect", "--nodes", "8"], 0),
        (vec!["continuous", "--task", "discretize", "--nodes", "64"], 0),
        (
            vec!["continuous", "--task", "bridge", "--problem", "weaver", "--rule", "midpoint", "--nodes", "8", "--b", "3.1416",
                 "--eps", "1", "--M", "2"],
            0,
        ),
    ];
    for (args, expected) in cases {
        let out = pasf(&args);
        assert_eq!(code(&out), expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        stdout_json(&out);
    }
}
