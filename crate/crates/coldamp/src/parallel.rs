//! Parallel evaluation over grid points and verification draws.

use coldamp_core::budget::{check_grid, sweep_point, BudgetPoint, SweepAxis};
use coldamp_core::InstrumentParams;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "COLDAMP_THREADS";

/// Worker count from `COLDAMP_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_VAR).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Run `f` inside a pool sized by [`thread_cap`] (rayon's default otherwise).
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Same as [`coldamp_core::budget::sweep`], evaluated in parallel; order is preserved.
pub fn par_sweep(
    p: &InstrumentParams,
    axis: SweepAxis,
    grid: &[f64],
) -> coldamp_core::Result<Vec<BudgetPoint>> {
    check_grid(grid)?;
    with_pool(|| grid.par_iter().map(|&v| sweep_point(p, axis, v)).collect())
}
