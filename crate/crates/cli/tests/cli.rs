use std::path::Path;
use std::process::{Command, Output};

fn acsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acsim"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: serde_json::Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn lists_every_experiment() {
    let out = acsim(&["list-experiments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "kernel-check",
        "simulate",
        "ns-compare",
        "decay",
        "profile",
        "linear-profile",
        "example3d",
        "picard",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn validate_prints_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", serde_json::json!({"experiment": "kernel-check"}));
    let out = acsim(&["validate", &cfg]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_dims"], 3);
    assert_eq!(v["resolution"], 64);
    assert_eq!(v["epsilon"], 1.0);
}

#[test]
fn bad_configs_exit_with_a_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", serde_json::json!({"experiment": "decay", "resolution": 7}));
    let out = acsim(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["field"], "resolution");

    let cfg = write_config(dir.path(), "d.json", serde_json::json!({"experiment": "warp"}));
    let out = acsim(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment"));
}

#[test]
fn zero_field_decay_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let cfg = write_config(
            dir.path(),
            &format!("{sub}.json"),
            serde_json::json!({
                "experiment": "decay",
                "n_dims": 2,
                "resolution": 16,
                "box_length": 20.0,
                "dt": 0.1,
                "t_end": 2.0,
                "q_list": [1, 2, "inf"],
                "datum": {"kind": "zero"},
                "write_snapshots": true,
                "output_dir": out_dir,
            }),
        );
        let out = acsim(&["run", &cfg]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let a = run("a");
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["skipped"], true);
    assert_eq!(report["fits"][2]["q"], "inf");
    let csv = std::fs::read_to_string(a.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,l1,l2,linf,grad_l2,div_l2,energy,dissipation,mean_1,mean_2\n"));
    assert_eq!(csv.lines().count(), 22);
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    // geometric snapshot times that share a record collapse to one file
    assert!(a.join("snapshots/trajectory_014.bin.json").exists());
    assert!(!a.join("snapshots/trajectory_015.bin").exists());

    // identical configuration (up to the output path) gives identical files
    let b = run("b");
    for f in ["report.json", "trajectory.csv", "snapshots/trajectory_014.bin"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn failed_assertions_exit_nonzero_with_a_failure_list() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "k.json",
        serde_json::json!({
            "experiment": "kernel-check",
            "n_dims": 2,
            "resolution": 16,
            "box_length": 20.0,
            "kernel_check": {
                "samples": 4,
                "scaling_grid": {"n_dims": 2, "resolution": 64, "box_length": 40.0}
            },
            "tolerances": {"kernel_scaling": 1e-300},
            "output_dir": out_dir,
        }),
    );
    let out = acsim(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    let failures = v["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|f| f["name"].as_str().unwrap().starts_with("scaling spread")));
}

#[test]
fn thread_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_acsim"))
        .arg("list-experiments")
        .env("ACSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_acsim"))
        .arg("list-experiments")
        .env("ACSIM_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
