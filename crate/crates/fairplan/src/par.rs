//! Thin switch between rayon-backed and sequential batch evaluation.
//!
//! Solvers and oracles in this crate are pure functions, so sweeps over
//! instances (lasso audits, differential test batches) are data-parallel.
//! With the `parallel` feature (default) they fan out through rayon; without
//! it the same entry points run sequentially, which keeps the crate usable
//! on single-threaded targets and gives the benches a baseline.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Sequential version of [`map`], always available; used by the benches as
/// the comparison baseline.
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Find the first item (by index order) for which `f` returns `Some`.
///
/// The parallel path uses `find_map_first`, so the result is deterministic
/// and identical to the sequential path.
pub fn find_map<T, U, F>(items: &[T], f: F) -> Option<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().find_map(f)
    }
}

/// Sequential version of [`find_map`].
pub fn find_map_seq<T, U, F>(items: &[T], f: F) -> Option<U>
where
    F: Fn(&T) -> Option<U>,
{
    items.iter().find_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_sequential() {
        let items: Vec<u64> = (0..100).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(map(&items, f), map_seq(&items, f));
    }

    #[test]
    fn find_map_returns_first_match() {
        let items: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| if *x % 7 == 3 { Some(*x) } else { None };
        assert_eq!(find_map(&items, f), Some(3));
        assert_eq!(find_map(&items, f), find_map_seq(&items, f));
    }
}
