//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the closures run on the current rayon pool;
//! without it, or when [`Parallelism::Sequential`] is requested, they run in
//! order on the calling thread. Results are returned in input order either
//! way, so reductions over them are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Parallel,
    Sequential,
}

impl Parallelism {
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Parallel
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Sizes the global worker pool; a no-op without the `parallel` feature or
/// when the pool already exists.
pub fn set_workers(n: usize) {
    #[cfg(feature = "parallel")]
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let _ = n;
}

pub fn map<T, R, F>(items: &[T], mode: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(n: usize, mode: Parallelism, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(&xs, Parallelism::Parallel, |x| x * x);
        let b = map(&xs, Parallelism::Sequential, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(map_range(10, Parallelism::Parallel, |i| i), (0..10).collect::<Vec<_>>());
    }
}
