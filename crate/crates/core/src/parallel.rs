//! Replication-parallel map with results in replication order.
//!
//! Each replication gets its own seed from the master seed, so the output is
//! the same for any thread count.

use rayon::prelude::*;

/// Runs `job(rep)` for `rep in 0..reps` and returns the results in order.
pub fn replicate<T, F>(reps: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..reps as u64).into_par_iter().map(job).collect()
}

/// Runs `body` inside a dedicated pool of `threads` workers, or the global
/// pool when `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, body: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(body),
        None => body(),
    }
}
