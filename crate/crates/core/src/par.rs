//! Data-parallel helpers.
//!
//! With the `parallel` feature the helpers fan out over rayon's global pool;
//! without it they run the same closures sequentially. Every helper returns
//! results in input order, so callers get identical output either way.

use std::collections::BTreeSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map `f` over `lo..hi`, preserving order.
pub fn map_range<R, F>(lo: i64, hi: i64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(i64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (lo..hi).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (lo..hi).map(f).collect()
    }
}

/// Count the members of `set` satisfying `pred`.
pub fn count<E, F>(set: &BTreeSet<E>, pred: F) -> usize
where
    E: Ord + Sync,
    F: Fn(&E) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        set.par_iter().filter(|e| pred(e)).count()
    }
    #[cfg(not(feature = "parallel"))]
    {
        set.iter().filter(|e| pred(e)).count()
    }
}

/// Image of `set` under `f`, as a sorted set.
pub fn image<E, R, F>(set: &BTreeSet<E>, f: F) -> BTreeSet<R>
where
    E: Ord + Sync,
    R: Ord + Send,
    F: Fn(&E) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        set.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        set.iter().map(f).collect()
    }
}

/// First member of `set` (in sorted order) satisfying `pred`.
pub fn find_first<E, F>(set: &BTreeSet<E>, pred: F) -> Option<&E>
where
    E: Ord + Sync,
    F: Fn(&E) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let v: Vec<&E> = set.iter().collect();
        v.par_iter().find_first(|e| pred(e)).copied()
    }
    #[cfg(not(feature = "parallel"))]
    {
        set.iter().find(|e| pred(e))
    }
}

/// Whether the build fans out to a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
