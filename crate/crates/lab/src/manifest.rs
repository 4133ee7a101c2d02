//! Running an experiment to disk, and checking a finished run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments::{execute, ExperimentOutput};
use crate::output::json_bytes;
use crate::LabError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub artifact_version: String,
    pub experiment: ExperimentKind,
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub threads: usize,
    /// Not covered by the determinism contract.
    pub wall_time_seconds: f64,
    /// Not covered by the determinism contract.
    pub finished_unix_seconds: u64,
    pub outputs: Vec<OutputEntry>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub summary: Vec<String>,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.manifest.violations.is_empty()
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, LabError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Usage(format!("threads: {e}")))
}

/// Runs on a dedicated pool of `threads` workers without touching disk.
pub fn run_in_memory(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput, LabError> {
    pool(threads)?.install(|| execute(cfg))
}

/// Runs `cfg`, writing data files and `manifest.json` into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path, threads: usize) -> Result<RunOutcome, LabError> {
    let start = Instant::now();
    let result = run_in_memory(cfg, threads)?;
    fs::create_dir_all(out_dir).map_err(|e| LabError::io(out_dir, e))?;
    let mut outputs = Vec::with_capacity(result.files.len());
    for (name, bytes) in &result.files {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| LabError::io(&path, e))?;
        outputs.push(OutputEntry {
            path: name.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment,
        config_hash: sha256_hex(&cfg.canonical_json()),
        config: cfg.clone(),
        threads,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        outputs,
        violations: result.violations,
    };
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, json_bytes(&manifest)).map_err(|e| LabError::io(&path, e))?;
    Ok(RunOutcome {
        manifest,
        summary: result.summary,
    })
}

/// Where a rerun first departs from the recorded file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffLocator {
    pub file: String,
    pub byte_offset: u64,
    /// 1-based.
    pub line: u64,
    pub recorded: Option<String>,
    pub rerun: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReproduceReport {
    pub matches: bool,
    pub files_checked: usize,
    pub first_diff: Option<DiffLocator>,
    /// Problems that are not byte differences (missing files, hash or
    /// config mismatches).
    pub notes: Vec<String>,
}

fn nth_line(bytes: &[u8], line: u64) -> Option<String> {
    bytes
        .split(|b| *b == b'\n')
        .nth(line as usize - 1)
        .map(|l| String::from_utf8_lossy(l).into_owned())
}

fn locate(file: &str, recorded: &[u8], rerun: &[u8]) -> Option<DiffLocator> {
    let common = recorded.iter().zip(rerun).take_while(|(a, b)| a == b).count();
    if common == recorded.len() && common == rerun.len() {
        return None;
    }
    let line = 1 + recorded[..common].iter().filter(|b| **b == b'\n').count() as u64;
    Some(DiffLocator {
        file: file.into(),
        byte_offset: common as u64,
        line,
        recorded: nth_line(recorded, line),
        rerun: nth_line(rerun, line),
    })
}

/// Reruns the config recorded in the manifest on `threads` workers and
/// compares every data file byte for byte. Timing fields are ignored.
pub fn reproduce(manifest_path: &Path, threads: usize) -> Result<ReproduceReport, LabError> {
    let text = fs::read_to_string(manifest_path).map_err(|e| LabError::io(manifest_path, e))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| LabError::Usage(format!("manifest: {e}")))?;
    let dir: PathBuf = manifest_path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let mut notes = Vec::new();
    if sha256_hex(&manifest.config.canonical_json()) != manifest.config_hash {
        notes.push("config_hash does not match the embedded config".into());
    }
    let rerun = run_in_memory(&manifest.config, threads)?;
    let mut first_diff = None;
    let recorded_names: Vec<&str> = manifest.outputs.iter().map(|o| o.path.as_str()).collect();
    let rerun_names: Vec<&str> = rerun.files.iter().map(|(n, _)| n.as_str()).collect();
    if recorded_names != rerun_names {
        notes.push(format!("output files differ: recorded {recorded_names:?}, rerun {rerun_names:?}"));
    }
    for entry in &manifest.outputs {
        let path = dir.join(&entry.path);
        let recorded = match fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                notes.push(format!("{}: {e}", entry.path));
                continue;
            }
        };
        if sha256_hex(&recorded) != entry.sha256 {
            notes.push(format!("{}: contents do not match the recorded hash", entry.path));
        }
        let Some((_, fresh)) = rerun.files.iter().find(|(n, _)| *n == entry.path) else {
            continue;
        };
        if first_diff.is_none() {
            first_diff = locate(&entry.path, &recorded, fresh);
        }
    }
    Ok(ReproduceReport {
        matches: notes.is_empty() && first_diff.is_none(),
        files_checked: manifest.outputs.len(),
        first_diff,
        notes,
    })
}
