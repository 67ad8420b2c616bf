//! Acceptance criterion for the command-line tool: repeated runs produce
//! byte-identical data files regardless of the worker count (only the
//! manifest, which records wall times, may differ).

use std::fs;
use std::path::Path;
use std::process::Command;

fn run_energy(config: &Path, out: &Path, workers: usize) {
    let output = Command::new(env!("CARGO_BIN_EXE_spinboson"))
        .arg("energy")
        .arg("--config")
        .arg(config)
        .arg("--workers")
        .arg(workers.to_string())
        .arg("--out")
        .arg(out)
        .output()
        .expect("failed to launch the binary");
    assert!(
        output.status.success(),
        "energy run with {workers} workers failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn energy_outputs_are_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "[model]\npreset = \"scalar-exp\"\n\n[compute]\neta_route = true\n")
        .unwrap();
    let out_serial = dir.path().join("w1");
    let out_parallel = dir.path().join("w8");
    run_energy(&config, &out_serial, 1);
    run_energy(&config, &out_parallel, 8);

    let names = ["energy.csv", "energy_eta.csv", "energy.json", "energy_eta.json"];
    let mut mismatched: Vec<&str> = Vec::new();
    for name in names {
        let a = fs::read(out_serial.join(name)).unwrap();
        let b = fs::read(out_parallel.join(name)).unwrap();
        if a != b {
            mismatched.push(name);
        }
    }
    let passed = mismatched.is_empty();
    let status = if passed { "PASS" } else { "FAIL" };
    println!(
        "criterion 9 [{status}] energy outputs byte-identical between --workers 1 and --workers 8 ({})",
        if passed { format!("{} files compared", names.len()) } else { format!("differ: {mismatched:?}") }
    );
    assert!(passed, "files differ across worker counts: {mismatched:?}");
}
