//! Execution strategy for the data-parallel loops (trials, probe samples,
//! configuration-complex sweeps).
//!
//! Every loop routed through [`Exec`] produces results in index order, so the
//! output is identical whichever strategy runs it. With the `parallel` feature
//! disabled, [`Exec::Parallel`] degrades to the sequential path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..len`, returning results in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..len).into_par_iter().map(f).collect(),
            _ => (0..len).map(f).collect(),
        }
    }

    /// Runs `f` on every index in `0..len`; `f` must only touch shared state
    /// through thread-safe, order-insensitive operations.
    pub fn for_each<F>(self, len: usize, f: F)
    where
        F: Fn(usize) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..len).into_par_iter().for_each(f),
            _ => (0..len).for_each(f),
        }
    }

    /// Folds fixed-size chunks of `0..len` and merges the chunk results in
    /// chunk order. `merge` must be associative.
    pub fn fold_chunks<T, F, M>(self, len: usize, chunk: usize, init: T, fold: F, merge: M) -> T
    where
        T: Send + Clone + Sync,
        F: Fn(T, usize) -> T + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = len.div_ceil(chunk);
        let partial = self.map(chunks, |c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(len);
            (lo..hi).fold(init.clone(), &fold)
        });
        partial.into_iter().fold(init, merge)
    }
}
