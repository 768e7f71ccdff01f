//! Seeded random streams and deterministic parallel replicates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Stream `replicate` of the generator seeded by `master`. Streams are
/// independent of the order in which they are consumed.
pub fn stream(master: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(replicate);
    rng
}

/// Runs `job(replicate)` for `0..count` on `workers` threads (`0` picks the
/// rayon default) and returns the results in replicate order.
pub fn run_replicates<T, F>(count: u64, workers: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&job).collect()))
}
