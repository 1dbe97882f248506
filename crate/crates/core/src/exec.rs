//! Execution backend for per-pixel work.
//!
//! Pixels share no state, so anything that runs "for every pixel" (PD loops
//! during a frame, tile rendering, table fitting) goes through a [`Backend`].
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it, or with [`Backend::Sequential`], it runs on the calling
//! thread. Both produce identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

// the default depends on the feature set, so it cannot be derived
#[allow(clippy::derivable_impls)]
impl Default for Backend {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Backend::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Backend::Sequential
        }
    }
}

impl Backend {
    /// Map over a slice, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Backend::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Map over a mutable slice, preserving order.
    pub fn map_mut<T, R, F>(self, items: &mut [T], f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(&mut T) -> R + Sync + Send,
    {
        match self {
            Backend::Sequential => items.iter_mut().map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => items.par_iter_mut().map(f).collect(),
        }
    }

    /// Map over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            Backend::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = Backend::Sequential.map(&xs, |x| x * x + 1);
        let def = Backend::default().map(&xs, |x| x * x + 1);
        assert_eq!(seq, def);

        let mut a = xs.clone();
        let mut b = xs.clone();
        Backend::Sequential.map_mut(&mut a, |x| *x += 3);
        Backend::default().map_mut(&mut b, |x| *x += 3);
        assert_eq!(a, b);
        assert_eq!(
            Backend::Sequential.map_range(17, |i| i * 2),
            Backend::default().map_range(17, |i| i * 2)
        );
    }
}
