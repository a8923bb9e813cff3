//! Data-parallel loops over index ranges. With the `parallel` feature these
//! run on rayon; without it every [`Exec`] runs sequentially. Results are
//! always returned in index order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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

/// `f(0), f(1), ..., f(count - 1)` in order.
pub fn map<T, F>(exec: Exec, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..count).into_par_iter().map(f).collect(),
        _ => (0..count).map(f).collect(),
    }
}

/// The `Some` results of `f` over `0..count`, in index order.
pub fn filter_map<T, F>(exec: Exec, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..count).into_par_iter().filter_map(f).collect(),
        _ => (0..count).filter_map(f).collect(),
    }
}

/// The `Some` result with the smallest index.
pub fn find_first<T, F>(exec: Exec, count: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..count).into_par_iter().find_map_first(f),
        _ => (0..count).find_map(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(map(exec, 5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(filter_map(exec, 10, |i| (i % 3 == 0).then_some(i)), vec![0, 3, 6, 9]);
            assert_eq!(find_first(exec, 1000, |i| (i > 10 && i % 7 == 0).then_some(i)), Some(14));
            assert_eq!(find_first(exec, 3, |_| None::<u64>), None);
        }
    }
}
