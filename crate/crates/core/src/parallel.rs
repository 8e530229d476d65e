//! Thread-pool setup. `PSHGEO_THREADS` caps the number of worker threads.

use std::sync::Once;

static INIT: Once = Once::new();

pub const THREADS_ENV: &str = "PSHGEO_THREADS";

/// Configures the global rayon pool from `PSHGEO_THREADS`, once. Later calls
/// and calls after rayon has already started are no-ops.
pub fn init_from_env() {
    INIT.call_once(|| {
        let Some(threads) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok())
        else {
            return;
        };
        if threads == 0 {
            return;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    });
}
