//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] fans work out
//! over the rayon pool. Without it, every mode runs sequentially. Results are
//! always returned in input order so reports stay deterministic.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually runs on more than one thread in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `items.iter().map(f).collect()`, possibly in parallel, order-preserving.
pub fn map_ordered<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..len` in contiguous chunks and folds the chunk results
/// left to right with `merge`. `merge` must be associative.
pub fn chunked_reduce<R, F, M>(exec: Execution, len: u64, chunk: u64, f: F, merge: M) -> Option<R>
where
    R: Send,
    F: Fn(u64, u64) -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    let bounds: Vec<(u64, u64)> = (0..len.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(len)))
        .collect();
    let parts = map_ordered(exec, &bounds, |&(lo, hi)| f(lo, hi));
    parts.into_iter().reduce(merge)
}
