//! Data-parallel helpers. The `parallel` feature routes bulk maps through
//! rayon; without it (or with `Mode::Sequential`) the same closures run on a
//! plain iterator, so results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Mode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Mode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Mode::Sequential
    }
}

pub fn map_collect<T, F>(n: usize, f: F, mode: Mode) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        Mode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

pub fn max_f64<F>(n: usize, f: F, mode: Mode) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    match mode {
        Mode::Sequential => (0..n).map(f).fold(f64::NEG_INFINITY, f64::max),
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max),
    }
}
