//! End-to-end checks of the installed binary: argument handling, exit
//! codes, file outputs, and run-to-run determinism.

use std::path::Path;
use std::process::{Command, Output};

fn magnonics(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnonics"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).expect("config written");
    path.to_str().expect("utf-8 path").to_string()
}

const SMALL_SWEEP: &str = r#"
[device]
geometry = "forty_five"
wire_width_m = 5e-6
kappa_m_internal_hz = 2e6

[resonator]
z0_ohm = 50.0
mode_freqs_hz = [0.5e9, 19.5e9, 20.5e9]
kappa_internal_hz = [500.0, 20e3, 20e3]

[resonator.kappa_ext_calibration]
kappa_ext_hz = 2e6
freq_hz = 19.5e9

[magnet]
material = "vtcne"

[drive]
power_dbm = -30.0
port = "feedline"
b_field_t = 0.709305
frequency_hz = 19.5e9

[sweep.drive_freq_hz]
min = 19.0e9
max = 21.0e9
count = 41

[sweep.b_field_t]
min = 0.69
max = 0.73
count = 11
"#;

#[test]
fn params_prints_csv_on_stdout() {
    let out = magnonics(&["params"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("parameter,value,unit\n"));
    assert!(text.contains("\ngeometry,top_cpw,\n"));
    assert!(text.contains("\ng_xz1,"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_config(dir.path(), "[device]\nbogus = 1\n");
    let out = magnonics(&["params", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn missing_config_file_exits_1() {
    let out = magnonics(&["params", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn divergent_variance_exits_3() {
    let out = magnonics(&["squeeze", "--n-minus", "0", "--n-th", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_flag_writes_table_and_manifest() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv = dir.path().join("params.csv");
    let out = magnonics(&["params", "--out", csv.to_str().expect("utf-8 path")]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).expect("table written");
    assert!(body.starts_with("parameter,value,unit\n"));
    let manifest_path = dir.path().join("params.csv.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).expect("manifest written"))
            .expect("valid json");
    assert_eq!(manifest["tool"], "magnonics");
    assert_eq!(manifest["config"]["device"]["geometry"], "top_cpw");
}

#[test]
fn json_format_round_trips() {
    let out = magnonics(&["backaction", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let columns = value["columns"].as_array().expect("columns array");
    assert!(columns.iter().any(|c| c == "delta_kappa_r1_hz"));
    assert_eq!(value["rows"].as_array().expect("rows").len(), 1);
}

#[test]
fn sweep_bytes_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), SMALL_SWEEP);
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    for (threads, path) in [("1", &serial), ("8", &parallel)] {
        let out = magnonics(&[
            "sweep",
            "--config",
            &config,
            "--threads",
            threads,
            "--out",
            path.to_str().expect("utf-8 path"),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let serial_bytes = std::fs::read(&serial).expect("serial output");
    let parallel_bytes = std::fs::read(&parallel).expect("parallel output");
    assert_eq!(serial_bytes, parallel_bytes);
    assert_eq!(serial_bytes.iter().filter(|&&b| b == b'\n').count(), 41 * 11 + 1);
}
