//! Sequential or data-parallel execution of independent work items.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] fans
//! work out over the rayon pool; without it every call runs sequentially.
//! Results never depend on the execution mode: reductions are associative
//! and commutative, and ordered outputs keep input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `items.map(f)` keeping order.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Folds `f(item)` for every item with an associative, commutative `reduce`.
pub fn map_reduce<T, R, F, Z, G>(exec: Execution, items: &[T], f: F, zero: Z, reduce: G) -> R
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
    Z: Fn() -> R + Sync + Send,
    G: Fn(R, R) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).reduce(zero, reduce);
    }
    let _ = exec;
    items.iter().map(f).fold(zero(), reduce)
}

/// Runs `f` on a dedicated pool of `jobs` threads (the global pool when
/// `jobs` is `None`).
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            return pool.install(f);
        }
    }
    let _ = jobs;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_reduce(Execution::Sequential, &items, |x| x * x, || 0, |a, b| a + b);
        let par = map_reduce(Execution::Parallel, &items, |x| x * x, || 0, |a, b| a + b);
        assert_eq!(seq, par);
        assert_eq!(
            map(Execution::Parallel, &items, |x| x + 1),
            map(Execution::Sequential, &items, |x| x + 1)
        );
    }

    #[test]
    fn pool_size() {
        let total = with_jobs(Some(2), || {
            map_reduce(
                Execution::Parallel,
                &[1u32, 2, 3],
                |&x| x,
                || 0,
                |a, b| a + b,
            )
        });
        assert_eq!(total, 6);
    }
}
