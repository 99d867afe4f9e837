use std::path::Path;
use std::process::{Command, Output};

fn zic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zic-dmt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Parses curve CSV into (header, rows).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn curve_endpoints_for_two_antennas() {
    let out = zic(&["curve", "--antennas", "2,2,2,2", "--alphas", "1,1,1"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["r", "d_full", "d_nocsit", "d_O1", "d_O2", "d_Os"]);
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][..3], [0.0, 4.0, 4.0]);
    assert_eq!(rows[20][..3], [2.0, 0.0, 0.0]);
}

#[test]
fn no_csit_loss_vanishes_above_threshold() {
    for (antennas, alphas) in [("3,4,3,3", "1,1,1"), ("2,2,2,2", "1,1.25,1")] {
        let out = zic(&["curve", "--antennas", antennas, "--alphas", alphas]);
        assert_eq!(code(&out), 0);
        let (_, rows) = parse_csv(&stdout(&out));
        for row in rows {
            assert!(
                (row[1] - row[2]).abs() <= 1e-6,
                "{antennas} {alphas}: {row:?}"
            );
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<u8>> = ["a.json", "b.json"]
        .iter()
        .map(|name| {
            let path = dir.path().join(name);
            let p = path.to_str().unwrap();
            let out = zic(&[
                "curve",
                "--antennas",
                "2,3,2,3",
                "--alphas",
                "1,0.7,1.3",
                "--format",
                "json",
                "--out",
                p,
            ]);
            assert_eq!(code(&out), 0);
            assert!(out.stdout.is_empty());
            std::fs::read(&path).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let json: serde_json::Value = serde_json::from_slice(&runs[0]).unwrap();
    assert_eq!(json["columns"][0], "r");
    assert_eq!(json["antennas"]["n1"], 3);
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"antennas": [2, 2, 2, 2], "r_step": 0.5, "gains": [[0.5, 1.0]]}"#,
    );
    let from_file = stdout(&zic(&["curve", "--config", &cfg]));
    assert!(from_file.starts_with("r1,r2,"));
    assert_eq!(from_file.lines().count(), 2);

    let overridden = zic(&[
        "curve",
        "--config",
        &cfg,
        "--gains",
        "0.25,0.25",
        "--gains",
        "1,0.5",
    ]);
    let (_, rows) = parse_csv(&stdout(&overridden));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][..2], [1.0, 0.5]);

    let bad = write_config(dir.path(), r#"{"antenna": [2, 2, 2, 2]}"#);
    assert_eq!(code(&zic(&["curve", "--config", &bad])), 1);
}

#[test]
fn domain_and_usage_errors_exit_with_one() {
    let out = zic(&["curve", "--antennas", "1,1,1,1", "--r-stop", "2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the domain"));
    assert_eq!(code(&zic(&["curve", "--antennas", "0,1,1,1"])), 1);
    assert_eq!(code(&zic(&["curve", "--alphas", "1,-1,1"])), 1);
    assert_eq!(code(&zic(&["frobnicate"])), 1);
    assert_eq!(code(&zic(&["--help"])), 0);
}

#[test]
fn threshold_reports() {
    let out = zic(&["threshold", "--antennas", "3,4,3,3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "kind,threshold,actual,met\nantennas,3.83333333,4,true\n"
    );

    let out = zic(&["threshold", "--antennas", "3,3,3,3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("symmetric,1.27777778,1,false\n"));

    let out = zic(&[
        "threshold",
        "--antennas",
        "2,2,2,2",
        "--alphas",
        "1,1.5,1",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["threshold"], 1.25);
    assert_eq!(json["met"], true);

    // no threshold is known for unequal transmit antennas
    assert_eq!(code(&zic(&["threshold", "--antennas", "1,2,2,2"])), 1);
}

#[test]
fn validate_fails_on_perturbed_weights() {
    let out = zic(&[
        "validate",
        "--no-mc",
        "--instances",
        "20",
        "--perturb-weights",
        "0.05",
    ]);
    assert_eq!(code(&out), 2);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdicts"][0]["status"], "fail");

    let clean = zic(&["validate", "--no-mc", "--instances", "20"]);
    assert_eq!(code(&clean), 0);
}

#[test]
fn small_monte_carlo_runs_are_inconclusive() {
    let out = zic(&["mc", "--gains", "0.25,0.25", "--samples", "2000"]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    assert!(text.starts_with("rho_db,event,outages,samples\n15,1,"));
    assert_eq!(text.lines().count(), 1 + 6 * 4);
}

#[test]
fn monte_carlo_json_carries_the_fit() {
    let out = zic(&[
        "mc",
        "--gains",
        "0.25,0.25",
        "--snr-grid",
        "0,5,10,15",
        "--samples",
        "20000",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["points"].as_array().unwrap().len(), 4);
    assert!(json["estimate"]["composed"]["slope"].as_f64().unwrap() > 0.3);
}
