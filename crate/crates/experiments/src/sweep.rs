//! Worker pool for sweep points.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluates `f` on every item with `workers` threads and returns results in
/// item order. The first error stops the sweep; so does raising `cancel`,
/// which is polled before each point starts.
pub fn parallel_map<T, R, F>(workers: usize, items: &[T], cancel: Option<&AtomicBool>, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                    return Err(Error::Cancelled);
                }
                f(item)
            })
            .collect()
    })
}
