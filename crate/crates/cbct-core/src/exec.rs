//! Data-parallel map over a trial index range.
//!
//! Monte Carlo loops and seed sweeps are embarrassingly parallel once every
//! trial owns its own RNG substream. [`indexed_map`] runs on the rayon pool
//! when the `parallel` feature is enabled and degrades to a plain loop
//! otherwise; [`indexed_map_seq`] is always sequential. Both produce the
//! same vector for a pure `f`, which keeps seeded results independent of
//! the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..len`, in parallel when the `parallel` feature is on.
pub fn indexed_map<T, F>(len: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Sequential reference version of [`indexed_map`].
pub fn indexed_map_seq<T, F>(len: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..len).map(f).collect()
}
