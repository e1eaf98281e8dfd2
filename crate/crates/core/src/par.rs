//! Execution policy for the data-parallel loops.
//!
//! Every reduction here is order-independent or uses an order-preserving
//! combinator, so results never depend on the schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::profile::{Profile, ProfileSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
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

/// Maps `f` over `0..len` and collects results in index order.
pub fn map_indices<T, F>(len: usize, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..len).into_par_iter().map(f).collect(),
        _ => (0..len).map(f).collect(),
    }
}

/// Keeps `Some` results of `f` over every profile, in lexicographic order.
pub fn filter_map_space<T, F>(space: &ProfileSpace, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Profile) -> Option<T> + Sync + Send,
{
    let size = space.size() as usize;
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..size)
            .into_par_iter()
            .filter_map(|i| f(space.decode(i as u64)))
            .collect(),
        _ => (0..size)
            .filter_map(|i| f(space.decode(i as u64)))
            .collect(),
    }
}

/// First profile (lexicographically) for which `f` returns `Some`.
pub fn find_first_space<T, F>(space: &ProfileSpace, exec: Exec, f: F) -> Option<T>
where
    T: Send,
    F: Fn(Profile) -> Option<T> + Sync + Send,
{
    let size = space.size() as usize;
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..size)
            .into_par_iter()
            .filter_map(|i| f(space.decode(i as u64)))
            .find_first(|_| true),
        _ => (0..size).find_map(|i| f(space.decode(i as u64))),
    }
}

/// Folds every profile through `f` and combines partial results with
/// `better`, which must pick the winner under a total order.
pub fn best_in_space<T, F, B>(space: &ProfileSpace, exec: Exec, f: F, better: B) -> Option<T>
where
    T: Send,
    F: Fn(Profile) -> Option<T> + Sync + Send,
    B: Fn(T, T) -> T + Sync + Send,
{
    let size = space.size() as usize;
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..size)
            .into_par_iter()
            .filter_map(|i| f(space.decode(i as u64)))
            .reduce_with(&better),
        _ => (0..size)
            .filter_map(|i| f(space.decode(i as u64)))
            .reduce(&better),
    }
}
