use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::experiments::execute;
use crate::error::{LabError, Result};
use crate::rng::derive_seed;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub replica_seconds: Vec<f64>,
}

/// Record of one run: enough to rerun it and check every output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: BTreeMap<String, String>,
    pub version: String,
    pub seed: u64,
    pub replica_seeds: Vec<u64>,
    pub timings: Timings,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let pairs: Vec<(String, String)> = self.config.clone().into_iter().collect();
        ExperimentConfig::from_pairs(&pairs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::Parse {
            offset: byte_offset(&text, e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Names of outputs whose digests differ between the two runs, including
    /// files present in only one of them.
    pub fn differing_outputs(&self, other: &RunManifest) -> Vec<String> {
        let theirs: BTreeMap<&str, &str> = other
            .outputs
            .iter()
            .map(|o| (o.name.as_str(), o.sha256.as_str()))
            .collect();
        let ours: BTreeMap<&str, &str> = self
            .outputs
            .iter()
            .map(|o| (o.name.as_str(), o.sha256.as_str()))
            .collect();
        let mut out: Vec<String> = ours
            .iter()
            .filter(|(n, d)| theirs.get(*n) != Some(*d))
            .map(|(n, _)| n.to_string())
            .collect();
        out.extend(theirs.keys().filter(|n| !ours.contains_key(*n)).map(|n| n.to_string()));
        out
    }
}

/// Byte offset of a 1-based line and column in `text`.
pub(crate) fn byte_offset(text: &str, line: usize, column: usize) -> u64 {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len()) as u64
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Validates `config`, runs its replicas on a worker pool of `LAB_THREADS`
/// threads (all cores if unset), then writes the outputs and `manifest.json`
/// into `config.output_dir`.
///
/// Replica `i` uses the seed `derive_seed(seed, i)`. Nothing is written
/// until every replica has finished; if writing fails, the files written so
/// far are removed.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    let seeds: Vec<u64> = (0..config.replicas as u64)
        .map(|i| derive_seed(config.seed, i))
        .collect();
    let (files, replica_seconds) = worker_pool()?.install(|| execute(config, &seeds))?;

    let dir = &config.output_dir;
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        let mut outputs = Vec::with_capacity(files.len());
        for (name, bytes) in &files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| LabError::io(&path, e))?;
            written.push(path);
            outputs.push(OutputFile {
                name: name.clone(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(bytes),
            });
        }
        let manifest = RunManifest {
            config: config.to_pairs().into_iter().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            replica_seeds: seeds.clone(),
            timings: Timings {
                total_seconds: started.elapsed().as_secs_f64(),
                replica_seconds,
            },
            outputs,
        };
        let path = dir.join(MANIFEST_NAME);
        let mut text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        text.push(b'\n');
        fs::write(&path, text).map_err(|e| LabError::io(&path, e))?;
        Ok(manifest)
    })();
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
    }
    result
}

/// Reruns the experiment recorded in a manifest, writing into `output_dir`
/// (the recorded directory if `None`).
pub fn rerun(manifest_path: &Path, output_dir: Option<&Path>) -> Result<RunManifest> {
    let manifest = RunManifest::load(manifest_path)?;
    let mut cfg = manifest.experiment_config()?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir.to_path_buf();
    }
    run(&cfg)
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("LAB_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| LabError::Validation {
                field: "LAB_THREADS".into(),
                message: format!("must be a positive integer, got `{v}`"),
            })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::invalid(format!("cannot start worker pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_bytes_before_the_line() {
        let text = "ab\ncde\nf";
        assert_eq!(byte_offset(text, 1, 1), 0);
        assert_eq!(byte_offset(text, 2, 2), 4);
        assert_eq!(byte_offset(text, 3, 1), 7);
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
