//! Deterministic chunked execution.
//!
//! All data-parallel loops in this crate run through [`map_reduce_chunks`]:
//! the work is cut into chunks at *fixed* boundaries (independent of the
//! thread count), each chunk is mapped to a partial result, and the partials
//! are folded in ascending chunk order. Output is therefore byte-identical
//! whether the `parallel` feature is on or off, and for any rayon pool size.
//!
//! Float accumulation inside a chunk uses compensated summation with a fixed
//! left-to-right order (see [`KahanSum`]), so the partition boundaries fully
//! determine the rounding.

use std::cell::Cell;

use num::complex::Complex64;

/// Default number of items per chunk for range-parallel loops.
pub const DEFAULT_CHUNK: u64 = 1 << 14;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with parallel dispatch disabled on this thread.
///
/// Used by the benchmark suite to compare the sequential path against the
/// rayon path within a single build.
pub fn with_sequential<R>(f: impl FnOnce() -> R) -> R {
    FORCE_SEQUENTIAL.with(|flag| {
        let prev = flag.replace(true);
        let out = f();
        flag.set(prev);
        out
    })
}

fn sequential_forced() -> bool {
    FORCE_SEQUENTIAL.with(|flag| flag.get())
}

/// Splits `lo..hi` into chunks of at most `chunk` items; boundaries depend
/// only on the inputs, never on the thread count.
pub fn chunk_bounds(lo: u64, hi: u64, chunk: u64) -> Vec<(u64, u64)> {
    assert!(chunk > 0);
    let mut out = Vec::new();
    let mut start = lo;
    while start < hi {
        let end = hi.min(start + chunk);
        out.push((start, end));
        start = end;
    }
    out
}

/// Maps every chunk of `lo..hi` through `map` and folds the partials in
/// ascending chunk order.
pub fn map_reduce_chunks<T, M, F>(lo: u64, hi: u64, chunk: u64, map: M, init: T, fold: F) -> T
where
    T: Send,
    M: Fn(u64, u64) -> T + Sync,
    F: Fn(T, T) -> T,
{
    let bounds = chunk_bounds(lo, hi, chunk);
    let partials = run_chunks(&bounds, &map);
    partials.into_iter().fold(init, fold)
}

#[cfg(feature = "parallel")]
fn run_chunks<T, M>(bounds: &[(u64, u64)], map: &M) -> Vec<T>
where
    T: Send,
    M: Fn(u64, u64) -> T + Sync,
{
    use rayon::prelude::*;
    if sequential_forced() || bounds.len() < 2 {
        bounds.iter().map(|&(a, b)| map(a, b)).collect()
    } else {
        bounds.par_iter().map(|&(a, b)| map(a, b)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_chunks<T, M>(bounds: &[(u64, u64)], map: &M) -> Vec<T>
where
    T: Send,
    M: Fn(u64, u64) -> T + Sync,
{
    let _ = sequential_forced();
    bounds.iter().map(|&(a, b)| map(a, b)).collect()
}

/// Fills disjoint mutable slices, one per fixed chunk of `0..len`.
///
/// `fill(chunk_start, slice)` writes the values for indices
/// `chunk_start..chunk_start + slice.len()`. Writes are disjoint, so the
/// result is independent of scheduling.
pub fn fill_chunks<T, F>(data: &mut [T], chunk: usize, fill: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if !sequential_forced() && data.len() > chunk {
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, slice)| fill(i * chunk, slice));
            return;
        }
    }
    for (i, slice) in data.chunks_mut(chunk).enumerate() {
        fill(i * chunk, slice);
    }
}

/// Compensated (Kahan) accumulator for complex doubles.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_bounds_cover_range() {
        let bounds = chunk_bounds(3, 1000, 64);
        assert_eq!(bounds.first().unwrap().0, 3);
        assert_eq!(bounds.last().unwrap().1, 1000);
        for w in bounds.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }

    #[test]
    fn map_reduce_sums_range() {
        let total = map_reduce_chunks(1, 101, 7, |a, b| (a..b).sum::<u64>(), 0u64, |x, y| x + y);
        assert_eq!(total, 5050);
    }

    #[test]
    fn sequential_matches_parallel() {
        let run = || {
            map_reduce_chunks(
                0,
                100_000,
                1024,
                |a, b| {
                    let mut k = KahanSum::new();
                    for n in a..b {
                        k.add(Complex64::new(1.0 / (n as f64 + 1.0), 0.0));
                    }
                    k.value()
                },
                Complex64::new(0.0, 0.0),
                |x, y| x + y,
            )
        };
        let par = run();
        let seq = with_sequential(run);
        assert_eq!(par, seq);
    }

    #[test]
    fn fill_chunks_writes_everything() {
        let mut data = vec![0u64; 5000];
        fill_chunks(&mut data, 128, |start, slice| {
            for (i, v) in slice.iter_mut().enumerate() {
                *v = (start + i) as u64 * 2;
            }
        });
        for (i, v) in data.iter().enumerate() {
            assert_eq!(*v, i as u64 * 2);
        }
    }
}
