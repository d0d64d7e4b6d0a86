//! Run manifests and atomic artifact output.
//!
//! A manifest records the configuration hash, every artifact written with
//! its content hash, and the verdict of each embedded check. It carries no
//! timestamps, so identical inputs give byte-identical manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_SCHEMA: &str = "hallscope/manifest/v1";

/// One embedded check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Observed discrepancy, when the check is numeric.
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn exact(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, residual: None, tolerance: None, detail: Some(detail.into()) }
    }

    /// Passes when `residual <= tolerance` (NaN fails).
    pub fn within(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: residual <= tolerance, residual: Some(residual), tolerance: Some(tolerance), detail: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Path as given in the configuration.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub artifacts: Vec<ArtifactRecord>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl RunManifest {
    pub fn new(command: &str, config_sha256: String) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256,
            artifacts: Vec::new(),
            checks: Vec::new(),
            all_passed: true,
        }
    }

    pub fn push_check(&mut self, check: Check) {
        self.all_passed &= check.passed;
        self.checks.push(check);
    }

    /// Records an artifact from its bytes.
    pub fn record(&mut self, path: &str, bytes: &[u8]) {
        self.artifacts.push(ArtifactRecord { path: path.into(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Writes an artifact atomically and records it in the manifest.
pub fn emit(manifest: &mut RunManifest, path: &str, bytes: &[u8]) -> Result<()> {
    write_atomic(Path::new(path), bytes)?;
    manifest.record(path, bytes);
    Ok(())
}

/// Minimal CSV writer: header row, RFC 4180 quoting.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self::default();
        c.row(header);
        c
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<String> = fields.iter().map(|f| quote(f.as_ref())).collect();
        self.out.push_str(&line.join(","));
        self.out.push_str("\r\n");
    }

    pub fn finish(self) -> String {
        self.out
    }
}

fn quote(f: &str) -> String {
    if f.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_verdict_tracks_checks() {
        let mut m = RunManifest::new("count", "00".into());
        m.push_check(Check::within("a", 1e-12, 1e-9));
        assert!(m.all_passed);
        m.push_check(Check::within("b", f64::NAN, 1e-9));
        assert!(!m.all_passed);
        assert_eq!(m.to_json(), m.clone().to_json());
    }

    #[test]
    fn csv_quoting() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(&["1,5", "say \"hi\""]);
        assert_eq!(c.finish(), "a,b\r\n\"1,5\",\"say \"\"hi\"\"\"\r\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
