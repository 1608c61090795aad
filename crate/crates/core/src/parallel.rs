//! Fork-join execution of per-block work over a fixed set of worker threads.
//!
//! Blocks are split into contiguous, near-equal chunks, one per worker. Each
//! worker writes into its own disjoint slice of the output, so results come
//! back in block order and are identical for every worker count.

use std::ops::Range;
use std::panic::{self, AssertUnwindSafe};
use std::thread;

use crate::error::{Error, Result};

/// Environment variable consulted when no explicit thread count is given.
pub const THREADS_ENV: &str = "SBTC_THREADS";

/// Static assignment of block indices to workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecPlan {
    worker_count: usize,
    chunks: Vec<Range<usize>>,
}

impl ExecPlan {
    pub fn worker_count(&self) -> usize {
        self.worker_count
    }

    /// Largest chunk size, `ceil(b_num / c_num)`. Equal to `b_num / c_num`
    /// when the division is exact.
    pub fn blocks_per_worker(&self) -> usize {
        self.chunks.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// One contiguous range of block indices per worker, in order.
    pub fn chunks(&self) -> &[Range<usize>] {
        &self.chunks
    }

    pub fn block_count(&self) -> usize {
        self.chunks.last().map_or(0, |c| c.end)
    }
}

/// Splits `b_num` blocks over `c_num` workers. The first `b_num % c_num`
/// workers get one extra block.
pub fn plan(b_num: usize, c_num: usize) -> Result<ExecPlan> {
    if c_num == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    let base = b_num / c_num;
    let extra = b_num % c_num;
    let mut chunks = Vec::with_capacity(c_num);
    let mut start = 0;
    for w in 0..c_num {
        let len = base + usize::from(w < extra);
        chunks.push(start..start + len);
        start += len;
    }
    Ok(ExecPlan {
        worker_count: c_num,
        chunks,
    })
}

/// Resolves a requested thread count. `Some(0)` and `None` mean automatic;
/// with `None`, [`THREADS_ENV`] is honored first.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    let from_env = || {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
    };
    match requested.or_else(from_env) {
        Some(n) if n > 0 => n,
        _ => thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

/// Applies `f` to every item, workers taking the chunks of `plan`.
///
/// Output is in input order. The first failing block (lowest index within
/// the first failing chunk) is reported; a panic inside `f` becomes
/// [`Error::Exec`] naming the block.
pub fn encode_parallel<I, T, F>(items: &[I], f: F, plan: &ExecPlan) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync,
{
    if plan.block_count() != items.len() {
        return Err(Error::invalid(format!(
            "plan covers {} blocks but {} were given",
            plan.block_count(),
            items.len()
        )));
    }

    let run_chunk = |range: Range<usize>, out: &mut [Option<T>]| -> Result<()> {
        for (slot, index) in out.iter_mut().zip(range) {
            let item = &items[index];
            let value = match panic::catch_unwind(AssertUnwindSafe(|| f(item))) {
                Ok(Ok(v)) => v,
                Ok(Err(e)) => {
                    return Err(Error::Exec {
                        index,
                        message: e.to_string(),
                    })
                }
                Err(payload) => {
                    return Err(Error::Exec {
                        index,
                        message: format!("worker panicked: {}", panic_message(&*payload)),
                    })
                }
            };
            *slot = Some(value);
        }
        Ok(())
    };

    let mut slots: Vec<Option<T>> = Vec::with_capacity(items.len());
    slots.resize_with(items.len(), || None);

    let non_empty: Vec<Range<usize>> = plan
        .chunks()
        .iter()
        .filter(|c| !c.is_empty())
        .cloned()
        .collect();
    if non_empty.len() <= 1 {
        if let Some(range) = non_empty.into_iter().next() {
            run_chunk(range.clone(), &mut slots[range])?;
        }
    } else {
        let results: Vec<Result<()>> = thread::scope(|scope| {
            let mut rest = slots.as_mut_slice();
            let mut handles = Vec::with_capacity(non_empty.len());
            for range in &non_empty {
                let (head, tail) = std::mem::take(&mut rest).split_at_mut(range.len());
                rest = tail;
                let range = range.clone();
                let run_chunk = &run_chunk;
                handles.push(scope.spawn(move || run_chunk(range, head)));
            }
            handles
                .into_iter()
                .zip(&non_empty)
                .map(|(h, range)| {
                    h.join().unwrap_or_else(|_| {
                        Err(Error::Exec {
                            index: range.start,
                            message: "worker thread panicked".into(),
                        })
                    })
                })
                .collect()
        });
        for r in results {
            r?;
        }
    }

    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Internal(format!("block {i} produced no result"))))
        .collect()
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> &str {
    payload
        .downcast_ref::<&str>()
        .copied()
        .or_else(|| payload.downcast_ref::<String>().map(String::as_str))
        .unwrap_or("unknown panic")
}
