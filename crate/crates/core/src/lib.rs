//! Complexity metrics for Solidity contracts and the statistics used to
//! relate them to vulnerability labels.
//!
//! The crate is layered bottom-up: [`frontend`] parses source files,
//! [`metrics`] turns contracts into 21-component metric vectors, [`stats`]
//! holds the rank-correlation and t-test machinery, [`corpus`] joins metric
//! vectors with labels, and [`pipeline`] runs the four analyses and renders
//! their reports.

pub mod corpus;
pub mod frontend;
pub mod metrics;
pub mod pipeline;
pub mod stats;

use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}

/// Runs `f` on a dedicated pool of `jobs` threads, or on the global pool
/// when `jobs` is `None`. Results never depend on the thread count.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(|e| e.to_string())?;
            Ok(pool.install(f))
        }
    }
}
