//! Execution mode switch. With the `parallel` feature the helpers fan out over
//! rayon; without it, or in [`Mode::Sequential`], they run in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Parallel,
    Sequential,
}

impl Mode {
    #[cfg(feature = "parallel")]
    fn parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Mode::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(mode: Mode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<U, F>(mode: Mode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// True if `pred` holds for every item. Short-circuits in both modes.
pub fn all<T, F>(mode: Mode, items: &[T], pred: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return items.par_iter().all(pred);
    }
    let _ = mode;
    items.iter().all(pred)
}

/// Sorts and deduplicates in place.
pub fn sort_dedup<T: Ord + Send>(mode: Mode, v: &mut Vec<T>) {
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        v.par_sort_unstable();
        v.dedup();
        return;
    }
    let _ = mode;
    v.sort_unstable();
    v.dedup();
}
