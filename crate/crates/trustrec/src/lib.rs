//! Trust-propagation similarity and top-N recommendation for cold-start users.
//!
//! The pipeline ingests a directed trust network and a rating table, propagates
//! trust with a truncated Katz series over the network's adjacency matrix,
//! optionally normalizes and boosts the resulting similarity matrix, and ranks
//! items for users whose rating history is too thin for classical collaborative
//! filtering. Popularity and direct-trust baselines plus an nDCG/precision/recall
//! evaluation harness round out the crate.
//!
//! Heavy kernels (sparse matrix products, per-user evaluation) run data-parallel
//! on rayon when the default `parallel` feature is enabled and fall back to
//! sequential loops without it; both paths produce bit-identical results.

pub mod dense;
pub mod eigen;
pub mod error;
pub mod evaluate;
pub mod graph;
pub mod ingest;
pub mod katz;
pub(crate) mod par;
pub mod persist;
pub mod ratings;
pub mod recommend;
pub mod sparse;

pub use error::{Error, Result};

/// Reports whether the crate was built with the rayon-backed `parallel` feature.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Caps the rayon worker pool at `n` threads. No-op in sequential builds.
///
/// Must run before the first parallel kernel; later calls return an error
/// because the global pool is already live.
pub fn set_thread_count(n: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        Ok(())
    }
}
