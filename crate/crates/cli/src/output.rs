use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file. `fault_after` aborts the
/// write after that many bytes, before the rename.
pub fn write_atomic(path: &Path, bytes: &[u8], fault_after: Option<usize>) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".ipsim-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| CliError::io(dir, e))?;
    let io = |e| CliError::io(path, e);
    match fault_after {
        Some(n) if n < bytes.len() => {
            tmp.write_all(&bytes[..n]).map_err(io)?;
            return Err(io(std::io::Error::other("write interrupted")));
        }
        _ => tmp.write_all(bytes).map_err(io)?,
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Output directory that records a checksum for every file it writes.
pub struct ArtifactWriter {
    dir: PathBuf,
    files: BTreeMap<String, String>,
    fault_after: Option<usize>,
}

impl ArtifactWriter {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            dir,
            files: BTreeMap::new(),
            fault_after: None,
        })
    }

    /// Makes every subsequent write fail after `bytes` bytes.
    pub fn inject_fault(&mut self, bytes: usize) {
        self.fault_after = Some(bytes);
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, contents.as_bytes(), self.fault_after)?;
        self.files.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(path)
    }

    pub fn checksums(&self) -> &BTreeMap<String, String> {
        &self.files
    }

    /// Writes `manifest.json`; meant to be the last file of a run.
    pub fn finish(self, mut manifest: Manifest) -> Result<PathBuf, CliError> {
        manifest.files = self.files;
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        let path = self.dir.join("manifest.json");
        write_atomic(&path, text.as_bytes(), self.fault_after)?;
        Ok(path)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub replicas: usize,
    pub threads: Option<usize>,
    pub timestamp: String,
    pub rng: &'static str,
    pub grid: Vec<f64>,
    pub hard_failures: Vec<String>,
    pub files: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interrupted_write_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        assert!(write_atomic(&path, b"x,y\n1,2\n", Some(4)).is_err());
        assert!(!path.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn interrupted_rewrite_keeps_previous_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_atomic(&path, b"old\n", None).unwrap();
        assert!(write_atomic(&path, b"new contents\n", Some(3)).is_err());
        assert_eq!(fs::read(&path).unwrap(), b"old\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
