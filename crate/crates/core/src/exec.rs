//! Data-parallel evaluation with a sequential fallback.
//!
//! Every helper here returns results in index order, so a parallel run is
//! bit-identical to a sequential one. With the `parallel` feature disabled,
//! [`Exec::Parallel`] silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Amplitude count above which gate application fans out across threads.
pub const PARALLEL_AMPLITUDE_THRESHOLD: usize = 1 << 12;

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

impl Exec {
    /// Picks parallel evaluation only when the workload is large enough.
    pub fn for_len(len: usize) -> Self {
        if len >= PARALLEL_AMPLITUDE_THRESHOLD {
            Exec::default()
        } else {
            Exec::Sequential
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Evaluates `f(i)` for `i in 0..len`, collecting in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Fallible variant of [`Exec::map`]; the first error in index order wins.
    pub fn try_map<T, E, F>(self, len: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(len, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order_in_both_modes() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = Exec::Sequential.map(10_000, f);
        let b = Exec::Parallel.map(10_000, f);
        assert_eq!(a, b);
    }

    #[test]
    fn try_map_reports_first_error() {
        let r: Result<Vec<usize>, usize> =
            Exec::Parallel.try_map(100, |i| if i % 30 == 29 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(29));
    }
}
