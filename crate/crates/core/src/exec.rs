//! Index-driven fan-out helpers.
//!
//! Every data-parallel loop in the crate (distance matrices, LOO folds,
//! per-row structure learning, sampling batches) goes through `map_indexed`
//! so the whole crate can be built sequentially with
//! `--no-default-features`. Results are collected in index order, so the
//! output is identical whichever path runs. `map_indexed_seq` is always
//! available; the benches use it as the baseline side.

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    map_indexed_seq(n, f)
}

pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
