//! Order-preserving map over a slice, on a rayon pool of the requested size
//! when the `parallel` feature is enabled and sequentially otherwise.

/// Whether this build can run work on more than one thread.
pub const PARALLEL: bool = cfg!(feature = "parallel");

/// Worker count from `POWSUM_JOBS`, else the machine's parallelism.
pub fn default_jobs() -> usize {
    std::env::var("POWSUM_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&j: &usize| j >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `items.iter().map(f).collect()`, with results in input order.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, R, F>(items: &[T], _jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}
