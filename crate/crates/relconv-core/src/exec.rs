//! Execution strategy for the exhaustive scans.
//!
//! Every brute-force kernel in the crate funnels through [`map_indexed`]: a
//! pure function evaluated over `0..n` and collected in index order. With
//! the `parallel` feature (the default) the evaluation is distributed by
//! rayon; without it the same closure runs on a plain sequential iterator.
//! Results are positionally identical either way, so witnesses picked as
//! "first failing index" do not depend on the build.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Runs `f` over `0..n` and returns the smallest index whose result is
/// `Some`, together with that result. Used for deterministic "first
/// witness" selection in the scans.
pub(crate) fn first_failure<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    map_indexed(n, f)
        .into_iter()
        .enumerate()
        .find_map(|(i, r)| r.map(|w| (i, w)))
}
