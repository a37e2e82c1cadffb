//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] runs on the
//! current rayon pool; without it every mode is sequential. Results are
//! always collected in index order, so reductions done afterwards see the
//! same sequence regardless of scheduling.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Maps `f` over `range` and returns the results in ascending index order.
    pub fn map_range<T, F>(self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                range.into_par_iter().map(f).collect()
            }
            _ => range.map(f).collect(),
        }
    }

    /// Same as [`Exec::map_range`] over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Runs `job` with at most `threads` worker threads. `threads == 1`
    /// switches to sequential execution; `0` keeps the global pool.
    pub fn with_threads<R, F>(threads: usize, job: F) -> R
    where
        R: Send,
        F: FnOnce(Exec) -> R + Send,
    {
        if threads == 1 || !cfg!(feature = "parallel") {
            return job(Exec::Sequential);
        }
        #[cfg(feature = "parallel")]
        {
            if threads == 0 {
                return job(Exec::Parallel);
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("failed to build thread pool");
            pool.install(|| job(Exec::Parallel))
        }
        #[cfg(not(feature = "parallel"))]
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results_in_both_modes() {
        let seq = Exec::Sequential.map_range(0..1000, |i| i * i);
        let par = Exec::Parallel.map_range(0..1000, |i| i * i);
        assert_eq!(seq, par);
        let items: Vec<u64> = (0..100).collect();
        assert_eq!(Exec::Parallel.map_slice(&items, |x| x + 1)[99], 100);
    }

    #[test]
    #[cfg(feature = "parallel")]
    fn thread_count_is_honoured() {
        let seen = Exec::with_threads(3, |exec| {
            assert_eq!(exec, Exec::Parallel);
            rayon::current_num_threads()
        });
        assert_eq!(seen, 3);
        assert_eq!(Exec::with_threads(1, |e| e), Exec::Sequential);
    }

    #[test]
    #[cfg(not(feature = "parallel"))]
    fn everything_is_sequential_without_rayon() {
        assert_eq!(Exec::with_threads(4, |e| e), Exec::Sequential);
    }
}
