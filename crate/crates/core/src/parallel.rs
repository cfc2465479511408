//! Worker-count control. Results never depend on the worker count: every
//! parallel map preserves input order and each value is reduced serially.

use rayon::ThreadPoolBuilder;

/// Environment variable capping the worker count; `0` means automatic.
pub const THREADS_ENV: &str = "HLS_THREADS";

/// Worker count from `HLS_THREADS`, or `0` (automatic) if unset or invalid.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs `op` inside a dedicated pool of `threads` workers (`0` = automatic).
pub fn with_threads<R, F>(threads: usize, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}
