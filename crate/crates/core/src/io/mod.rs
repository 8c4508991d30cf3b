//! Configuration, snapshot persistence and run orchestration for the `lls-lab` binary.

pub mod config;
pub mod runner;
pub mod snapshot;
pub mod writer;

pub use config::{apply_override, load_config, load_config_with, parse_config, Experiment, RunConfig};
pub use runner::{run, RunOutcome};
pub use snapshot::{Snapshot, SnapshotHeader};
pub use writer::{ArtifactWriter, Manifest, MANIFEST_NAME};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "LLS_LAB_THREADS";

/// Sizes the global worker pool from `LLS_LAB_THREADS`, if set. Must run before any
/// parallel work; later calls are ignored.
pub fn init_threads_from_env() -> crate::error::Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        crate::error::LabError::Config(vec![format!("{THREADS_ENV}={raw:?}: expected a positive integer")])
    })?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}
