//! Per-subcommand provenance manifests.
//!
//! Every subcommand writes `<name>.manifest.json` next to its artifacts,
//! recording a SHA-256 digest of every input it consumed and every output it
//! produced, the analysis parameters it ran under, and the tool version.
//! Manifests contain no timestamps and no paths (file names only), so a rerun
//! with identical inputs reproduces the manifest byte for byte, in any
//! output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{AnalysisConfig, RunConfig};
use crate::error::CliError;

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool_version: &'a str,
    config: AnalysisConfig,
    config_hash: String,
    inputs: &'a BTreeMap<String, String>,
    outputs: &'a BTreeMap<String, String>,
}

/// Collects input/output digests for one subcommand run.
pub struct ManifestBuilder {
    command: &'static str,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl ManifestBuilder {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    /// Records an input file by name and content digest.
    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        let (name, digest) = digest_entry(path)?;
        self.inputs.insert(name, digest);
        Ok(())
    }

    /// Records an output file by name and content digest. Call after the
    /// file has been fully written.
    pub fn output(&mut self, path: &Path) -> Result<(), CliError> {
        let (name, digest) = digest_entry(path)?;
        self.outputs.insert(name, digest);
        Ok(())
    }

    /// Writes `<command>.manifest.json` into the output directory.
    pub fn write(self, config: &RunConfig) -> Result<PathBuf, CliError> {
        let analysis = config.analysis();
        let manifest = Manifest {
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(config),
            config: analysis,
            inputs: &self.inputs,
            outputs: &self.outputs,
        };
        let path = config.out_dir.join(format!("{}.manifest.json", self.command));
        let mut body = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::internal(format!("manifest serialization failed: {e}")))?;
        body.push('\n');
        std::fs::write(&path, body)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Digest of the path-free analysis parameters; stamped into manifests and
/// the fitted-model file so downstream artifacts can be traced to the
/// configuration that produced them.
pub fn config_hash(config: &RunConfig) -> String {
    let body = serde_json::to_vec(&config.analysis()).expect("analysis config serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(&body)))
}

fn digest_entry(path: &Path) -> Result<(String, String), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::internal(format!("not a file path: {}", path.display())))?
        .to_string_lossy()
        .into_owned();
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::internal(format!("cannot hash {}: {e}", path.display())))?;
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(&bytes)));
    Ok((name, digest))
}
