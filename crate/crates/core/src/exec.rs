//! Sequential / rayon execution switch.
//!
//! Every hot loop in the crate takes an [`Execution`] so that benchmarks can
//! compare both paths in one binary. Without the `parallel` feature,
//! `Execution::Parallel` silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Fill `out` chunk by chunk; `f(offset, chunk)` receives the global index of
/// the first element. Each element is written by exactly one worker.
pub fn for_each_chunk_mut<T, F>(exec: Execution, out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(c, ys)| f(c * chunk, ys));
        return;
    }
    let _ = exec;
    for (c, ys) in out.chunks_mut(chunk).enumerate() {
        f(c * chunk, ys);
    }
}

/// Map `f` over `0..len` split into fixed chunks and return the per-chunk
/// results in chunk order. The split does not depend on the thread count, so
/// reductions built on top are bit-reproducible.
pub fn map_chunks<R, F>(exec: Execution, len: usize, chunk: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
{
    let n_chunks = len.div_ceil(chunk.max(1));
    let range = move |c: usize| c * chunk..((c + 1) * chunk).min(len);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n_chunks).into_par_iter().map(|c| f(range(c))).collect();
    }
    let _ = exec;
    (0..n_chunks).map(|c| f(range(c))).collect()
}

/// Map over a slice of independent jobs, preserving order.
pub fn map_jobs<T, R, F>(exec: Execution, jobs: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return jobs.par_iter().map(f).collect();
    }
    let _ = exec;
    jobs.iter().map(f).collect()
}

/// Pairwise (fixed binary tree) summation of partial sums.
pub fn tree_sum<T>(mut parts: Vec<T>) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    if parts.is_empty() {
        return T::default();
    }
    while parts.len() > 1 {
        let next = parts
            .chunks(2)
            .map(|p| if p.len() == 2 { p[0] + p[1] } else { p[0] })
            .collect();
        parts = next;
    }
    parts[0]
}

/// Configure the global worker pool. No-op without the `parallel` feature or
/// when the pool has already been built.
pub fn set_workers(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}
