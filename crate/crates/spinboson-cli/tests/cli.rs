//! End-to-end tests of the command-line interface: exit codes, emitted data
//! files, and the result manifest.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn spinboson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinboson"))
        .args(args)
        .output()
        .expect("failed to launch the binary")
}

fn read_manifest(out: &Path) -> serde_json::Value {
    let bytes = fs::read(out.join("manifest.json")).expect("manifest.json must exist");
    serde_json::from_slice(&bytes).expect("manifest.json must parse")
}

#[test]
fn validate_rejects_an_infrared_divergent_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "[model]\npreset = \"scalar-exp\"\n\n[coupling]\npower = -0.75\n")
        .unwrap();
    let out = dir.path().join("out");
    let result = spinboson(&[
        "validate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2), "inadmissible model is a configuration error");
    let combined = format!(
        "{}{}",
        String::from_utf8_lossy(&result.stdout),
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(combined.contains("infrared"), "diagnostic names the failing check: {combined}");

    // The manifest is written even for failing runs and records the failure.
    let manifest = read_manifest(&out);
    assert_eq!(manifest["status"], "config-error");
    assert!(manifest["error"].is_string());
    assert_eq!(manifest["command"], "validate");
}

#[test]
fn missing_config_and_preset_is_a_usage_error() {
    let result = spinboson(&["energy"]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("--config") && stderr.contains("--preset"), "stderr: {stderr}");
}

#[test]
fn pairings_lists_the_three_pair_partitions_of_four_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = spinboson(&["pairings", "4", "--partitions", "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&result.stdout);
    let records: Vec<serde_json::Value> = stdout
        .lines()
        .filter(|l| l.starts_with('{'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 3);
    assert!(stdout.contains("3 pair partitions"), "stdout: {stdout}");

    let jsonl = fs::read_to_string(out.join("pairings.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(first["pairs"], serde_json::json!([[1, 2], [3, 4]]));
}

#[test]
fn energy_error_bars_cover_the_closed_form_and_checksums_match() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = spinboson(&["energy", "--preset", "scalar-exp", "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));

    // The one-state exponential preset has E2 = -π exactly; the reported
    // refinement error must cover the true error.
    let energy: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("energy.json")).unwrap()).unwrap();
    let orders = energy["orders"].as_array().unwrap();
    let second = orders.iter().find(|o| o["n"] == 2).unwrap();
    let coefficient = second["coefficient"].as_f64().unwrap();
    let reported = second["refinement_error"].as_f64().unwrap();
    assert!(
        (coefficient + PI).abs() <= reported,
        "true error {:.3e} exceeds reported {:.3e}",
        (coefficient + PI).abs(),
        reported
    );
    for o in orders {
        if o["n"].as_u64().unwrap() % 2 == 1 {
            assert!(o["coefficient"].as_f64().unwrap().abs() < 1e-12);
        }
    }

    let csv = fs::read_to_string(out.join("energy.csv")).unwrap();
    assert!(csv.starts_with("n,coefficient,method,pairing_count,quadrature_nodes,refinement_error"));

    // Every file recorded in the manifest hashes to its recorded checksum.
    let manifest = read_manifest(&out);
    assert_eq!(manifest["status"], "ok");
    let files = manifest["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for record in files {
        let name = record["name"].as_str().unwrap();
        assert_ne!(name, "manifest.json", "the manifest must not list itself");
        let bytes = fs::read(out.join(name)).unwrap();
        assert_eq!(bytes.len() as u64, record["bytes"].as_u64().unwrap(), "size of {name}");
        let digest = format!("{:x}", Sha256::digest(&bytes));
        assert_eq!(digest, record["sha256"].as_str().unwrap(), "checksum of {name}");
    }
}
