//! Binary-level tests: exit codes, JSON round-trips, determinism across
//! thread counts, and the catalog cache.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cherednik-dirac"))
}

#[test]
fn dirac_task_reports_and_exits_zero() {
    let out = bin()
        .args([
            "run",
            "--task",
            "dirac",
            "--group",
            "cyclic:2",
            "--t",
            "1",
            "--c",
            "1/5",
            "--module-kind",
            "standard",
            "--sigma",
            "triv",
            "--output",
            "json",
            "--cache-dir",
        ])
        .arg(std::env::temp_dir().join("cherednik-cli-cache"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{:?}", out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], "report/1");
    assert_eq!(report["results"]["dirac"]["total"]["sign"], 1);
    assert_eq!(report["exit_code"], 0);
}

#[test]
fn malformed_c_exits_two() {
    let out = bin()
        .args([
            "run", "--task", "dirac", "--group", "cyclic:2", "--t", "1", "--c", "banana",
            "--module-kind", "standard",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pbw_cap_exceeded_exits_three() {
    let out = bin()
        .args([
            "run",
            "--task",
            "vogan",
            "--group",
            "cyclic:2",
            "--t",
            "1",
            "--c",
            "1/5",
            "--degree-bound",
            "2",
            "--pbw-cap",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_byte_identical_across_threads() {
    let dir = std::env::temp_dir().join("cherednik-cli-cache2");
    let run = |threads: &str| {
        bin()
            .args([
                "run",
                "--task",
                "verify-all",
                "--group",
                "cyclic:2",
                "--t",
                "1",
                "--c",
                "1/5",
                "--degree-bound",
                "5",
                "--output",
                "json",
                "--threads",
                threads,
                "--cache-dir",
            ])
            .arg(&dir)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports differ across thread counts");
}

#[test]
fn config_file_roundtrip() {
    let dir = std::env::temp_dir().join("cherednik-cli-cache3");
    let config = serde_json::json!({
        "schema": "jobconfig/1",
        "group": {"type": "cyclic", "m": 2},
        "t": "1",
        "c": "1/5",
        "task": "group-info",
        "output": "json",
    });
    let path = std::env::temp_dir().join("cherednik-test-job.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&config).unwrap()).unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&path)
        .args(["--cache-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{:?}", out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["order"], 2);
    // a second run hits the cache
    let out2 = bin()
        .args(["run", "--config"])
        .arg(&path)
        .args(["--cache-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    let report2: serde_json::Value = serde_json::from_slice(&out2.stdout).unwrap();
    assert_eq!(report2["results"]["catalog_cache_hit"], true);
}

#[test]
fn baby_verma_requires_t_zero() {
    let out = bin()
        .args([
            "run",
            "--task",
            "cohomology",
            "--group",
            "cyclic:2",
            "--t",
            "1",
            "--c",
            "1/5",
            "--module-kind",
            "baby-verma",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
