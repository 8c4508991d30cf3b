//! Single funnel for every file a run produces, so the manifest cannot miss one.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::snapshot::Snapshot;
use crate::error::Result;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub bytes: u64,
    pub sha256: String,
}

/// Writes files below one output directory and records their hashes.
pub struct ArtifactWriter {
    root: PathBuf,
    files: BTreeMap<String, FileEntry>,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(ArtifactWriter { root: root.to_path_buf(), files: BTreeMap::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &BTreeMap<String, FileEntry> {
        &self.files
    }

    /// Writes `name` (a relative path with `/` separators) and records its hash.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        let sha256 = Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect();
        self.files.insert(name.to_string(), FileEntry { bytes: bytes.len() as u64, sha256 });
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        self.write(name, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write_text(name, &s)
    }

    /// Writes `<stem>.llsf` and its `<stem>.json` sidecar; returns the binary's name.
    pub fn write_snapshot(&mut self, stem: &str, snap: &Snapshot) -> Result<String> {
        let bin = format!("{stem}.llsf");
        self.write(&bin, &snap.to_bytes())?;
        let mut side = snap.sidecar_json()?;
        side.push('\n');
        self.write_text(&format!("{stem}.json"), &side)?;
        Ok(bin)
    }

    /// Writes the manifest listing every recorded file; the manifest itself is not listed.
    pub fn finish<C: Serialize>(self, manifest: &Manifest<C>) -> Result<PathBuf> {
        let mut m = serde_json::to_value(manifest)?;
        m["files"] = serde_json::to_value(&self.files)?;
        let path = self.root.join(MANIFEST_NAME);
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        std::fs::write(&path, s)?;
        Ok(path)
    }
}

/// Manifest body; `files` is filled in by [`ArtifactWriter::finish`].
#[derive(Clone, Debug, Serialize)]
pub struct Manifest<C> {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub generator: String,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
    pub config: C,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_every_file_with_its_hash() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path()).unwrap();
        w.write_text("a.txt", "abc").unwrap();
        w.write_text("sub/b.txt", "").unwrap();
        let m = Manifest {
            tool: "t".into(),
            version: "0".into(),
            experiment: "x".into(),
            seed: 1,
            generator: "g".into(),
            status: "ok".into(),
            exit_code: 0,
            error: None,
            config: (),
        };
        let path = w.finish(&m).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(v["files"]["a.txt"]["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(v["files"]["sub/b.txt"]["bytes"], 0);
        assert!(dir.path().join("sub/b.txt").exists());
    }
}
