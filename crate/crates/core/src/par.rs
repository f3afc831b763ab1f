use alloc::vec::Vec;

/// `(0..len).map(f).collect()`, spread over the rayon pool when the
/// `parallel` feature is on. Output order never depends on scheduling.
#[cfg(feature = "parallel")]
pub(crate) fn map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}
