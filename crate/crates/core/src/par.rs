//! Data-parallel plumbing.
//!
//! Every grid sweep in the library runs through [`map_chunks`]: the input
//! range is cut into index chunks, chunks are mapped independently, and the
//! per-chunk results are combined strictly in chunk order. With the
//! `parallel` feature the chunk map runs on rayon; without it the same code
//! runs sequentially, so results are identical either way.

use std::ops::Range;

/// Splits `0..len` into at most `chunks` contiguous ranges of near-equal size.
pub fn shard_ranges(len: u64, chunks: usize) -> Vec<Range<u64>> {
    let chunks = chunks.max(1) as u64;
    let n = chunks.min(len.max(1));
    let base = len / n;
    let extra = len % n;
    let mut out = Vec::with_capacity(n as usize);
    let mut start = 0;
    for i in 0..n {
        let size = base + u64::from(i < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}

/// Number of chunks used when a sweep does not specify one.
pub fn default_chunks() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get() * 4)
        .unwrap_or(4)
}

/// Maps `ranges` and returns results in range order.
#[cfg(feature = "parallel")]
pub fn map_chunks<R: Send>(
    ranges: Vec<Range<u64>>,
    f: impl Fn(Range<u64>) -> R + Sync + Send,
) -> Vec<R> {
    use rayon::prelude::*;
    ranges.into_par_iter().map(f).collect()
}

/// Sequential fallback with the same contract.
#[cfg(not(feature = "parallel"))]
pub fn map_chunks<R: Send>(
    ranges: Vec<Range<u64>>,
    f: impl Fn(Range<u64>) -> R + Sync + Send,
) -> Vec<R> {
    ranges.into_iter().map(f).collect()
}

/// Single-threaded chunk map, kept available under every feature set so the
/// two execution paths can be compared directly.
pub fn map_chunks_seq<R: Send>(
    ranges: Vec<Range<u64>>,
    f: impl Fn(Range<u64>) -> R + Sync + Send,
) -> Vec<R> {
    ranges.into_iter().map(f).collect()
}

/// Maps a slice element-wise, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Single-threaded counterpart of [`map_slice`].
pub fn map_slice_seq<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
