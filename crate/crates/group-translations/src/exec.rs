//! Data-parallel helpers. With the `parallel` feature (default) the
//! rayon path is used; without it everything runs sequentially. Reductions
//! stay deterministic either way: callers reduce by a total order such as
//! `(cost, canonical encoding)`.

/// Execution strategy for enumeration-heavy solvers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

/// Maps `f` over `items`, parallel or sequential per `mode`.
pub fn map<T, U, F>(mode: Parallelism, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        Parallelism::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

/// Deterministic minimum of mapped values: ties broken by the `Ord` on
/// `U`, so `U` should embed a canonical tiebreaker after the cost.
pub fn min_map<T, U, F>(mode: Parallelism, items: Vec<T>, f: F) -> Option<U>
where
    T: Send,
    U: Send + PartialOrd,
    F: Fn(T) -> Option<U> + Sync + Send,
{
    let better = |best: Option<U>, cand: Option<U>| -> Option<U> {
        match (best, cand) {
            (None, c) => c,
            (b, None) => b,
            (Some(b), Some(c)) => {
                if c < b {
                    Some(c)
                } else {
                    Some(b)
                }
            }
        }
    };
    match mode {
        Parallelism::Sequential => items.into_iter().map(&f).fold(None, better),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items
                .into_par_iter()
                .map(&f)
                .fold(|| None, better)
                .reduce(|| None, better)
        }
    }
}
