//! Reproducible experiment runner on top of `folnerlab-core`.
//!
//! One JSON config describes one experiment. Running it writes CSV/JSON data
//! files plus a `manifest.json`; rerunning the same config reproduces the
//! data files byte for byte at any worker count.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, ExperimentKind};
pub use manifest::{reproduce, run, run_in_memory, DiffLocator, ReproduceReport, RunManifest, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Bad config or arguments. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Filesystem failure. Exit code 1.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A kernel rejected its input mid-run. Exit code 2: every such input
    /// comes from the config.
    #[error("{0}")]
    Compute(#[from] folnerlab_core::Error),
}

impl LabError {
    pub(crate) fn field(name: &str, e: folnerlab_core::Error) -> Self {
        LabError::Usage(format!("{name}: {e}"))
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Compute(_) => exit::USAGE,
            LabError::Io { .. } => exit::IO,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INVARIANT: i32 = 3;
}

/// Resolves the worker count: `FOLNERLAB_THREADS` wins over the flag; zero
/// or absent means one worker per core.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, LabError> {
    let from_env = match std::env::var("FOLNERLAB_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| LabError::Usage(format!("FOLNERLAB_THREADS: not a count: {v:?}")))?,
        ),
        Err(_) => None,
    };
    Ok(match from_env.or(flag) {
        Some(n) if n > 0 => n,
        _ => std::thread::available_parallelism().map_or(1, |n| n.get()),
    })
}
