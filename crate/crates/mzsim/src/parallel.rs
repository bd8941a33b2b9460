//! Sweeps with grid points spread over a rayon pool.

use mzsim_core::experiments::{assemble, evaluate_point, grid};
use mzsim_core::{ExperimentConfig, Result, SweepResult};
use rayon::prelude::*;

/// Environment variable that caps the worker count.
pub const THREADS_ENV: &str = "MZSIM_THREADS";

/// Worker count from `MZSIM_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Same result as [`mzsim_core::sweep`], bit for bit: every point depends
/// only on the config and its grid index, and results are gathered in grid
/// order. `threads = None` uses rayon's default pool.
pub fn par_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    let n = grid(cfg).len();
    let run = || (0..n).into_par_iter().map(|i| evaluate_point(cfg, i)).collect();
    let outcomes = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    };
    assemble(cfg, outcomes)
}
