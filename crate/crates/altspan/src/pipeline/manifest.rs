//! Run manifest: config echo, per-stage derived seeds, artifact digests, and
//! wall-clock timings. Timings are the only non-deterministic content, so a
//! byte-compare of a report directory excludes `manifest.json` and compares
//! digests instead.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

/// FNV-1a over a byte stream; cheap content fingerprint, not cryptographic.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(format!("{:016x}", fnv1a64(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub seed: u64,
    /// (file name, digest) for consumed artifacts.
    pub inputs: Vec<(String, String)>,
    /// (file name, digest) for produced artifacts.
    pub outputs: Vec<(String, String)>,
    pub wall_ms: u64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: RunConfig,
    pub stages: Vec<StageRecord>,
    pub status: String,
}

impl RunManifest {
    pub fn new(config: &RunConfig) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            stages: Vec::new(),
            status: "ok".into(),
        }
    }

    /// Load the manifest in `out_dir`, or start fresh; stage-wise runs keep
    /// appending to the same file.
    pub fn load_or_new(out_dir: &Path, config: &RunConfig) -> Self {
        let path = out_dir.join(MANIFEST_FILE);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(manifest) = serde_json::from_str::<RunManifest>(&text) {
                return manifest;
            }
        }
        RunManifest::new(config)
    }

    /// Insert or replace the record for a stage, keyed by name.
    pub fn upsert_stage(&mut self, record: StageRecord) {
        match self.stages.iter_mut().find(|s| s.name == record.name) {
            Some(existing) => *existing = record,
            None => self.stages.push(record),
        }
        self.status = if self.stages.iter().any(|s| s.status != "ok") {
            "FAILED".into()
        } else {
            "ok".into()
        };
    }

    pub fn save(&self, out_dir: &Path) -> Result<()> {
        let path = out_dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }
}
