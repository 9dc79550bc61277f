//! Worker pool shared by sweep-style computations.

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

/// Caps the worker count; unset or unparsable means machine parallelism.
pub const THREADS_ENV: &str = "QITE_MPEMBA_THREADS";

fn configured_threads() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            log::warn!("ignoring {THREADS_ENV}={raw:?}: expected a positive integer");
            None
        }
    }
}

/// The process-wide pool, built on first use.
pub fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = ThreadPoolBuilder::new().thread_name(|i| format!("qite-worker-{i}"));
        if let Some(n) = configured_threads() {
            builder = builder.num_threads(n);
        }
        builder.build().expect("failed to build worker pool")
    })
}
