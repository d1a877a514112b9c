//! Data-parallel helpers. With the `parallel` feature the work is spread
//! over the rayon pool; without it every call runs sequentially.

/// How a level of value iteration is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

/// Below this many items the sequential path is always taken.
const MIN_PARALLEL_ITEMS: usize = 32;

/// `(0..n).map(f)`, in parallel when requested and available. The result
/// order is the index order either way.
pub fn map_range<T, F>(n: usize, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Parallelism::Parallel && n >= MIN_PARALLEL_ITEMS {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = (mode, MIN_PARALLEL_ITEMS);
    (0..n).map(f).collect()
}

/// Like [`map_range`] for fallible work; the first error in index order
/// is returned.
pub fn try_map_range<T, E, F>(n: usize, mode: Parallelism, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_range(n, mode, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let seq = map_range(1000, Parallelism::Sequential, |i| i * i);
        let par = map_range(1000, Parallelism::Parallel, |i| i * i);
        assert_eq!(seq, par);
        let err: Result<Vec<usize>, usize> =
            try_map_range(
                100,
                Parallelism::Parallel,
                |i| if i % 40 == 39 { Err(i) } else { Ok(i) },
            );
        assert_eq!(err, Err(39));
    }
}
