//! Result emission: every command writes its data files through an
//! [`Emitter`] that records name, size, and SHA-256 of each file, and always
//! finishes by writing `manifest.json` — also when the run failed, so a
//! partial output directory still identifies itself.
//!
//! Data files are deterministic for a fixed configuration and code version:
//! fixed field order, fixed float formatting, order-independent parallel
//! reductions.  The manifest is the one exception — it carries wall times.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTime {
    pub stage: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// `manifest.json`: what ran, what it produced, and whether the built-in
/// consistency checks passed.
#[derive(Debug, Clone, Serialize)]
pub struct ResultManifest {
    pub command: String,
    pub code_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub workers: Option<usize>,
    /// "ok", "config-error", or "numerical-error".
    pub status: String,
    pub error: Option<String>,
    pub stages: Vec<StageTime>,
    pub checks: Vec<CheckRecord>,
    pub files: Vec<FileRecord>,
}

/// Collects emitted files and timings for one command run.
pub struct Emitter {
    dir: PathBuf,
    files: Vec<FileRecord>,
    stages: Vec<StageTime>,
    checks: Vec<CheckRecord>,
    formats: Vec<String>,
}

impl Emitter {
    pub fn new(dir: &Path, formats: &[String]) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            stages: Vec::new(),
            checks: Vec::new(),
            formats: formats.to_vec(),
        })
    }

    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }

    /// Writes a data file and records its checksum.
    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.files.push(FileRecord {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Serializes `value` as pretty JSON with a trailing newline and emits it.
    pub fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(name, text.as_bytes())
    }

    /// Runs a stage, recording its wall time under the given name.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages.push(StageTime {
            stage: name.to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckRecord { name: name.to_string(), passed, detail });
    }

    /// Writes the manifest (always the last file; not listed in itself).
    pub fn finish(
        self,
        command: &str,
        config_hash: &str,
        seed: u64,
        workers: Option<usize>,
        status: &str,
        error: Option<String>,
    ) -> anyhow::Result<PathBuf> {
        let manifest = ResultManifest {
            command: command.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.to_string(),
            seed,
            workers,
            status: status.to_string(),
            error,
            stages: self.stages,
            checks: self.checks,
            files: self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text.as_bytes())?;
        Ok(path)
    }
}
