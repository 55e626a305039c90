//! Parallel scans over an `N` grid.

use std::time::Instant;

use anyhow::{bail, Context};
use entropy_lab_core::scaling::{scan_point, ScanFailure, ScanMode, ScanOutcome};
use entropy_lab_core::SymbolFunction;
use rayon::prelude::*;

/// Caps the worker count when set to a positive integer.
pub const THREADS_ENV: &str = "ENTROPY_LAB_THREADS";

pub fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(THREADS_ENV),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("{THREADS_ENV} must be a positive integer, got {v:?}"),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub grid: Vec<usize>,
    pub mode: ScanMode,
    pub eigen_cap: usize,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
}

/// Like [`entropy_lab_core::scaling::scan`] but spread over a thread pool.
/// Records come back sorted by `N` whatever the execution order.
pub fn parallel_scan(symbol: &SymbolFunction, cfg: &ScanConfig) -> anyhow::Result<ScanOutcome> {
    let grid = &cfg.grid;
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        bail!("N grid must be nonempty, positive and strictly increasing");
    }
    let coeffs = symbol.coefficients(grid[grid.len() - 1]);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    // largest N first so the long eigensolves start early
    let mut order: Vec<usize> = grid.clone();
    order.reverse();
    let results: Vec<_> = pool.install(|| {
        order
            .par_iter()
            .with_max_len(1)
            .map(|&n| {
                let start = Instant::now();
                let result = scan_point(&coeffs, n, cfg.mode, cfg.eigen_cap);
                (n, result.map(|mut r| {
                    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    r
                }))
            })
            .collect()
    });
    let mut outcome = ScanOutcome::default();
    for (n, result) in results.into_iter().rev() {
        match result {
            Ok(r) => outcome.records.push(r),
            Err(error) => outcome.failures.push(ScanFailure { n, error }),
        }
    }
    Ok(outcome)
}
