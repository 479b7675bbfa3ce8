//! Thin execution helpers: data-parallel with the `parallel` feature (rayon),
//! plain sequential iteration otherwise.
//!
//! Every helper parallelizes only across independent outputs; any floating-point
//! reduction stays inside one task and runs in ascending index order. Results are
//! therefore bitwise identical between the two builds and across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..n` through `f`, collecting results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Splits `buf` into consecutive `width`-sized rows and hands each row, with
/// its index, to `f`.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_row_mut<T, F>(buf: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    buf.par_chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row_mut<T, F>(buf: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    buf.chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}
