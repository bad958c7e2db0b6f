use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{open, read_json, write_json};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub inputs: Vec<FileDigest>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<FileDigest>,
}

/// Record of the stages run into one output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineManifest {
    pub tool_version: String,
    pub stages: BTreeMap<String, StageEntry>,
}

impl Default for PipelineManifest {
    fn default() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            stages: BTreeMap::new(),
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Absolute form of `path` used as the manifest key.
fn key(path: &Path) -> String {
    std::fs::canonicalize(path)
        .unwrap_or_else(|_| path.to_path_buf())
        .display()
        .to_string()
}

fn digest(path: &Path) -> Result<FileDigest> {
    Ok(FileDigest {
        path: key(path),
        sha256: sha256_file(path)?,
    })
}

impl PipelineManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        if path.exists() {
            read_json(&path)
        } else {
            Ok(Self::default())
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }

    /// Warnings for inputs of `stage` whose content changed since it last ran.
    pub fn stale_inputs(&self, stage: &str, inputs: &[PathBuf]) -> Vec<String> {
        let Some(entry) = self.stages.get(stage) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for input in inputs {
            let k = key(input);
            let Some(prev) = entry.inputs.iter().find(|d| d.path == k) else {
                continue;
            };
            match sha256_file(input) {
                Ok(now) if now == prev.sha256 => {}
                _ => out.push(format!(
                    "stale manifest: input {} of stage '{}' changed since its last run",
                    input.display(),
                    stage
                )),
            }
        }
        out
    }

    /// Stores `stage`'s entry and returns warnings for other stages that
    /// consumed a previous version of one of its outputs.
    pub fn record(
        &mut self,
        stage: &str,
        inputs: &[PathBuf],
        parameters: serde_json::Value,
        outputs: &[PathBuf],
    ) -> Result<Vec<String>> {
        let inputs = inputs
            .iter()
            .map(|p| digest(p))
            .collect::<Result<Vec<_>>>()?;
        let outputs = outputs
            .iter()
            .map(|p| digest(p))
            .collect::<Result<Vec<_>>>()?;
        let mut warnings = Vec::new();
        for (name, entry) in self.stages.iter_mut() {
            if name == stage {
                continue;
            }
            entry
                .outputs
                .retain(|o| !outputs.iter().any(|n| n.path == o.path));
            for input in &entry.inputs {
                if let Some(new) = outputs.iter().find(|o| o.path == input.path) {
                    if new.sha256 != input.sha256 {
                        warnings.push(format!(
                            "stale manifest: stage '{}' used an older {}; rerun it",
                            name, input.path
                        ));
                    }
                }
            }
        }
        self.stages.insert(
            stage.to_string(),
            StageEntry {
                inputs,
                parameters,
                outputs,
            },
        );
        Ok(warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_changed_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        let output = dir.path().join("out.txt");
        std::fs::write(&input, "a").unwrap();
        std::fs::write(&output, "b").unwrap();
        let mut m = PipelineManifest::default();
        m.record(
            "s",
            &[input.clone()],
            serde_json::json!({}),
            &[output.clone()],
        )
        .unwrap();
        m.save(dir.path()).unwrap();
        let m = PipelineManifest::load(dir.path()).unwrap();
        assert!(m.stale_inputs("s", &[input.clone()]).is_empty());
        std::fs::write(&input, "changed").unwrap();
        let w = m.stale_inputs("s", &[input]);
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("stale manifest"));
    }

    #[test]
    fn downstream_flagged_and_outputs_unique() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        std::fs::write(&a, "1").unwrap();
        std::fs::write(&b, "2").unwrap();
        let mut m = PipelineManifest::default();
        m.record("first", &[], serde_json::json!(null), &[a.clone()])
            .unwrap();
        m.record(
            "second",
            &[a.clone()],
            serde_json::json!(null),
            &[b.clone()],
        )
        .unwrap();
        std::fs::write(&a, "3").unwrap();
        let w = m
            .record("first", &[], serde_json::json!(null), &[a.clone()])
            .unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("'second'"));
        // b rewritten by a different stage moves to that entry
        m.record("other", &[], serde_json::json!(null), &[b.clone()])
            .unwrap();
        assert!(m.stages["second"].outputs.is_empty());
        assert_eq!(m.stages["other"].outputs.len(), 1);
    }

    #[test]
    fn sha256_of_known_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        std::fs::write(&p, "abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
