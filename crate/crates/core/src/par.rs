//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the map runs on rayon; without it every
//! variant degrades to a plain sequential loop. Results always come back in
//! input order, so output never depends on the thread count.

/// How many workers a data-parallel map may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Single-threaded, in order.
    Sequential,
    /// A dedicated pool with this many threads (`0` or `1` means sequential).
    Threads(usize),
    /// The global rayon pool.
    #[default]
    Default,
}

impl Parallelism {
    pub fn from_workers(n: usize) -> Self {
        if n <= 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(n)
        }
    }
}

/// Apply `f` to every item and collect the results in input order.
pub fn map_ordered<T, R, F>(items: &[T], parallelism: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match parallelism {
            Parallelism::Sequential | Parallelism::Threads(0 | 1) => {}
            Parallelism::Default => return items.par_iter().map(&f).collect(),
            Parallelism::Threads(n) => {
                match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => return pool.install(|| items.par_iter().map(&f).collect()),
                    Err(e) => {
                        log::warn!("could not build a {n}-thread pool ({e}); running sequentially")
                    }
                }
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallelism;
    items.iter().map(f).collect()
}
