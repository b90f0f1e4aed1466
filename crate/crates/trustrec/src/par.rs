//! Feature-gated execution helper for row/user-parallel kernels.
//!
//! Every parallel loop in the crate maps an index range through an independent
//! closure and collects the results in index order, so the rayon path and the
//! sequential fallback assemble bit-identical outputs.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to `0..n` and returns the results in index order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled, otherwise
/// sequentially. `f` must not depend on evaluation order.
pub(crate) fn map_ordered<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Like [`map_ordered`], but hands `f` a per-thread scratch value built by
/// `init`, so hot kernels can reuse allocations across iterations.
pub(crate) fn map_ordered_init<S, T, I, F>(n: usize, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map_init(&init, |s, i| f(s, i))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut s = init();
        (0..n).map(|i| f(&mut s, i)).collect()
    }
}

/// Sequential twin of [`map_ordered_init`].
pub(crate) fn map_ordered_init_seq<S, T, I, F>(n: usize, init: I, f: F) -> Vec<T>
where
    I: Fn() -> S,
    F: Fn(&mut S, usize) -> T,
{
    let mut s = init();
    (0..n).map(|i| f(&mut s, i)).collect()
}
