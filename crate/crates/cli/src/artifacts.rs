//! Output artifacts: histograms and spectra as CSV, run manifests as JSON.
//! Every file is rendered in memory first; nothing is written until the whole
//! run has succeeded, so error exits leave no partial artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use specfind_core::Histogram;

/// FNV-1a 64 over the canonical document bytes; stable run identifier.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Hash over subcommand, configuration, input hash and seed: identical
    /// runs share it, any knob change moves it.
    pub run_id: String,
    pub config: serde_json::Value,
    pub input_hash: String,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub conventions: String,
    pub wall_time_ms: f64,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        config: serde_json::Value,
        input_hash: String,
        seed: u64,
        outputs: Vec<String>,
        conventions: String,
        wall_time_ms: f64,
    ) -> Self {
        let key = format!("{subcommand}\n{config}\n{input_hash}\n{seed}");
        RunManifest {
            subcommand: subcommand.to_string(),
            run_id: content_hash(key.as_bytes()),
            config,
            input_hash,
            seed,
            outputs,
            conventions,
            wall_time_ms,
        }
    }
}

/// Rendered files, keyed by name relative to the output directory.
#[derive(Debug, Default)]
pub struct ArtifactSet {
    files: BTreeMap<String, String>,
}

impl ArtifactSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, content: String) {
        self.files.insert(name.to_string(), content);
    }

    pub fn names(&self) -> Vec<String> {
        self.files.keys().cloned().collect()
    }

    /// Writes everything under `dir`, creating it if needed.
    pub fn write_all(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, content) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, content)?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("k,count,probability,energy_estimate\n");
    for bin in &hist.bins {
        out.push_str(&format!(
            "{},{},{},{}\n",
            bin.k, bin.count, bin.probability, bin.energy
        ));
    }
    out
}

pub fn spectrum_csv(values: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct GapEntry {
    pub start_energy: f64,
    pub end_energy: f64,
}

#[derive(Debug, Serialize)]
pub struct GapReportFile {
    pub threshold: f64,
    pub gaps: Vec<GapEntry>,
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("artifact serialization cannot fail")
}
