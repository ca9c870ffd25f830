//! Parallel/serial execution helpers.
//!
//! With the `parallel` feature (on by default) independent work items run on
//! the rayon global pool; without it the same code runs sequentially. Both
//! paths preserve input order, and callers key their RNG streams per item,
//! so outputs are bit-identical regardless of schedule.

/// Map `f` over `items`, in parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_ordered<T: Send, U: Send>(items: Vec<T>, f: &(dyn Fn(T) -> U + Sync)) -> Vec<U> {
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Map `f` over `items` sequentially.
#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T: Send, U: Send>(items: Vec<T>, f: &(dyn Fn(T) -> U + Sync)) -> Vec<U> {
    items.into_iter().map(f).collect()
}

/// Always-sequential map, kept alongside the dispatching one so benchmarks
/// can compare the two schedules on identical inputs.
pub fn map_serial<T: Send, U: Send>(items: Vec<T>, f: &(dyn Fn(T) -> U + Sync)) -> Vec<U> {
    items.into_iter().map(f).collect()
}

/// Cap the worker pool at `n` threads; 0 keeps the runtime default. Only the
/// first call can take effect, so invoke it before any parallel work.
#[cfg(feature = "parallel")]
pub fn init_threads(n: usize) {
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Without the `parallel` feature there is no pool to configure.
#[cfg(not(feature = "parallel"))]
pub fn init_threads(_n: usize) {}
