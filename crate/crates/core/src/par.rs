//! Data-parallel helpers. With the `parallel` feature disabled every call
//! runs sequentially; results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Use the rayon pool; `jobs` of 0 means rayon's default width.
    #[default]
    Parallel,
    Jobs(usize),
}

impl Parallelism {
    pub fn from_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            None => Parallelism::Parallel,
            Some(1) => Parallelism::Sequential,
            Some(n) => Parallelism::Jobs(n),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Parallelism::Sequential
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(items: &[T], parallelism: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    run(parallelism, || {
        #[cfg(feature = "parallel")]
        if parallelism.is_parallel() {
            return items.par_iter().map(&f).collect();
        }
        items.iter().map(&f).collect()
    })
}

/// Applies `f` to every item, stopping at the first error. Which error is
/// reported when several items fail is unspecified in parallel mode.
pub fn try_for_each<T, E, F>(items: &[T], parallelism: Parallelism, f: F) -> Result<(), E>
where
    T: Sync,
    E: Send,
    F: Fn(&T) -> Result<(), E> + Sync + Send,
{
    run(parallelism, || {
        #[cfg(feature = "parallel")]
        if parallelism.is_parallel() {
            return items.par_iter().try_for_each(&f);
        }
        items.iter().try_for_each(&f)
    })
}

fn run<R: Send>(parallelism: Parallelism, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Parallelism::Jobs(n) = parallelism {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            return pool.install(op);
        }
    }
    let _ = parallelism;
    op()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u32> = (0..10_000).collect();
        let seq = map(&items, Parallelism::Sequential, |x| x * 3);
        for p in [Parallelism::Parallel, Parallelism::Jobs(3)] {
            assert_eq!(map(&items, p, |x| x * 3), seq);
        }
    }

    #[test]
    fn try_for_each_stops_on_error() {
        let items: Vec<u32> = (0..100).collect();
        let r = try_for_each(&items, Parallelism::Parallel, |&x| {
            if x == 50 {
                Err(x)
            } else {
                Ok(())
            }
        });
        assert_eq!(r, Err(50));
    }

    #[test]
    fn jobs_flag() {
        assert_eq!(Parallelism::from_jobs(Some(1)), Parallelism::Sequential);
        assert_eq!(Parallelism::from_jobs(None), Parallelism::Parallel);
        assert_eq!(Parallelism::from_jobs(Some(4)), Parallelism::Jobs(4));
    }
}
