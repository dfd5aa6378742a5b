use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use elsasser_mhd::io::{checkpoint_read, read_timeseries};

fn mhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_conf(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = "grid.n = 8\nparams.re = 20\nparams.rm = 20\ninitial.magnetic_ratio = 0.3\n\
                     initial.magnetic_perturbation = 0.4\nintegrator.dt = 0.01\n\
                     integrator.t_end = 0.1\nintegrator.monitor_every = 5\n";

#[test]
fn simulate_writes_outputs_and_norms_reads_them() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = write_conf(tmp.path(), "run.conf", SMALL);
    let out = tmp.path().join("out");
    let o = mhd(&[
        "simulate",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["status"], "completed");
    assert_eq!(summary["steps_taken"], 10);

    let (state, params) = checkpoint_read(&out.join("final.chk")).unwrap();
    assert!((state.time - 0.1).abs() < 1e-12);
    let series = read_timeseries(&out.join("timeseries.csv"), params).unwrap();
    assert_eq!(series.len(), 3);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(json["config_digest"], summary["config_digest"]);

    let chk = out.join("final.chk");
    let o = mhd(&["norms", "--checkpoint", chk.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let norms: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let csv_last = series.last().unwrap();
    let l3 = norms.pointer("/norms/l3_wp").and_then(|v| v.as_f64());
    assert_eq!(l3, Some(csv_last.l3_wp), "{norms}");
}

#[test]
fn check_prints_four_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = write_conf(tmp.path(), "run.conf", SMALL);
    let o = mhd(&["check", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let heat = write_conf(
        tmp.path(),
        "heat.conf",
        "grid.n = 8\nparams.re = 1\nparams.rm = 1\ninitial.magnetic_ratio = 1\n\
         integrator.dt = 0.001\nintegrator.t_end = 0.05\nverify.checks = heat\n",
    );
    let o = mhd(&["verify", "--config", heat.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    // A coarse step leaves an energy residual far above tolerance.
    let coarse = write_conf(
        tmp.path(),
        "coarse.conf",
        &format!("{SMALL}integrator.monitor_every = 1\nverify.checks = energy\n")
            .replace("integrator.monitor_every = 5\n", ""),
    );
    let o = mhd(&["verify", "--config", coarse.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn blowup_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = write_conf(
        tmp.path(),
        "blow.conf",
        &format!("{SMALL}integrator.blowup_threshold = 1e-6\noutput.formats = json\n"),
    );
    let out = tmp.path().join("out");
    let o = mhd(&[
        "simulate",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "blowup_detected");
}

#[test]
fn usage_and_config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_conf(tmp.path(), "bad.conf", "grid.n = 12\n");
    let o = mhd(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.n"));
    assert_eq!(code(&mhd(&["check", "--config", "/nonexistent/x.conf"])), 1);
    assert_eq!(code(&mhd(&["bogus"])), 1);
    assert_eq!(code(&mhd(&["simulate"])), 1);
}

#[test]
fn sweep_prints_and_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = write_conf(
        tmp.path(),
        "sweep.conf",
        "grid.n = 8\nparams.kappa = 1\ninitial.amplitude = 0.05\ninitial.magnetic_ratio = 0.9\n\
         sweep.axis.params.lambda_ratio = 0, 0.1, 0.5\n",
    );
    let out = tmp.path().join("sw");
    let o = mhd(&[
        "sweep",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("index,params.lambda_ratio,lambda_kappa_ratio"));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        std::fs::read_to_string(out.join("sweep.csv")).unwrap(),
        text
    );
}
