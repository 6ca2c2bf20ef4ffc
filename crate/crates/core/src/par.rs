//! Row-parallel helpers. Sequential unless the `parallel` feature is on.

/// Calls `f(row_index, row)` for every `cols`-wide row of `data`.
#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row<T, F>(data: &mut [T], cols: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    data.chunks_mut(cols)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

#[cfg(feature = "parallel")]
pub(crate) fn for_each_row<T, F>(data: &mut [T], cols: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    use rayon::prelude::*;
    data.par_chunks_mut(cols)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// Like [`for_each_row`] over two equally shaped buffers at once.
#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row_pair<T, F>(a: &mut [T], b: &mut [T], cols: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Sync + Send,
{
    a.chunks_mut(cols)
        .zip(b.chunks_mut(cols))
        .enumerate()
        .for_each(|(i, (ra, rb))| f(i, ra, rb));
}

#[cfg(feature = "parallel")]
pub(crate) fn for_each_row_pair<T, F>(a: &mut [T], b: &mut [T], cols: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Sync + Send,
{
    use rayon::prelude::*;
    a.par_chunks_mut(cols)
        .zip(b.par_chunks_mut(cols))
        .enumerate()
        .for_each(|(i, (ra, rb))| f(i, ra, rb));
}
