//! Task scheduling and the public sorting entry points.

#[cfg(feature = "std")]
mod parallel;
mod sequential;

use crate::config::SortConfig;
use crate::element::{ByKey, ByLess, ElementModel};
use crate::partition::{Ctx, LocalData};
use crate::trace::{StepRecord, Trace};
use crate::Error;

pub(crate) use sequential::{sort_sample, Task, TaskMode};

/// How a task `T[l, r)` is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    /// By the thread group `[first, end)`.
    Parallel { first: usize, end: usize },
    Sequential { owner: usize },
}

#[inline]
pub(crate) fn thread_of(pos: usize, n: usize, t: usize) -> usize {
    (pos as u128 * t as u128 / n.max(1) as u128) as usize
}

/// Classifies the task `[l, r)` of an `n`-element sort run on `t` threads.
///
/// The task belongs to threads `⌊l·t/n⌋ .. ⌊r·t/n⌋`; it is parallel when that
/// range holds more than one thread. A sequential task is owned by the first
/// thread of its range.
pub fn assign_task(l: usize, r: usize, n: usize, t: usize) -> Assignment {
    let first = thread_of(l, n, t);
    let end = thread_of(r, n, t);
    if end > first + 1 {
        Assignment::Parallel { first, end }
    } else {
        Assignment::Sequential { owner: first }
    }
}

/// Whether a task is sorted directly: it has at most `2·n0` elements or its
/// parent had at most `k·n0`.
pub fn is_base_case(task_size: usize, parent_size: usize, cfg: &SortConfig) -> bool {
    task_size <= 2 * cfg.n0 || parent_size <= cfg.k_max.saturating_mul(cfg.n0)
}

/// Insertion sort.
pub fn base_case_sort<T: Copy, F: Fn(&T, &T) -> bool>(v: &mut [T], less: F) {
    let n = v.len();
    let p = v.as_mut_ptr();
    for i in 1..n {
        // SAFETY: all indices are below i < n.
        unsafe {
            let x = *p.add(i);
            if less(&x, &*p) {
                core::ptr::copy(p, p.add(1), i);
                *p = x;
                continue;
            }
            // v[0] ≤ x stops the scan, so j never reaches 0
            let mut j = i;
            while less(&x, &*p.add(j - 1)) {
                *p.add(j) = *p.add(j - 1);
                j -= 1;
            }
            *p.add(j) = x;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EasyInput {
    Sorted,
    ReverseSorted,
    Neither,
}

/// One scan: non-decreasing input is `Sorted` (so all-equal input is too),
/// non-increasing input with at least one strict step is `ReverseSorted`.
pub fn detect_easy_input<T, F: Fn(&T, &T) -> bool>(v: &[T], less: F) -> EasyInput {
    let mut ascending = true;
    let mut descending = true;
    for w in v.windows(2) {
        if less(&w[1], &w[0]) {
            ascending = false;
        }
        if less(&w[0], &w[1]) {
            descending = false;
        }
        if !ascending && !descending {
            return EasyInput::Neither;
        }
    }
    if ascending {
        EasyInput::Sorted
    } else {
        EasyInput::ReverseSorted
    }
}

/// Sorts `data` by `less` with IPS⁴o on `threads` threads.
///
/// Without the `std` feature the sort always runs on the calling thread.
pub fn sort<T, F>(data: &mut [T], less: F, threads: usize, cfg: &SortConfig) -> Result<(), Error>
where
    T: Copy + Send + Sync,
    F: Fn(&T, &T) -> bool + Sync,
{
    sort_ips4o(data, &ByLess(less), threads, cfg)
}

/// Sorts `data` by the unsigned key `key` with IPS²Ra on `threads` threads.
pub fn sort_radix<T, K>(data: &mut [T], key: K, threads: usize, cfg: &SortConfig) -> Result<(), Error>
where
    T: Copy + Send + Sync,
    K: Fn(&T) -> u64 + Sync,
{
    sort_ips2ra(data, &ByKey(key), threads, cfg)
}

/// In-place parallel super scalar samplesort.
pub fn sort_ips4o<T, M>(data: &mut [T], model: &M, threads: usize, cfg: &SortConfig) -> Result<(), Error>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    run(data, model, threads, cfg, false, None)
}

/// In-place parallel most-significant-digit radix sort. Fails with
/// [`Error::MissingRadixKey`] for models without a key.
pub fn sort_ips2ra<T, M>(data: &mut [T], model: &M, threads: usize, cfg: &SortConfig) -> Result<(), Error>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    run(data, model, threads, cfg, true, None)
}

/// [`sort_ips4o`] that also returns a record of all tasks and steps.
#[cfg(feature = "std")]
pub fn sort_ips4o_traced<T, M>(
    data: &mut [T],
    model: &M,
    threads: usize,
    cfg: &SortConfig,
) -> Result<Trace, Error>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let mut trace = Trace::new(data.len(), threads);
    run(data, model, threads, cfg, false, Some(&mut trace))?;
    trace.finish();
    Ok(trace)
}

/// [`sort_ips2ra`] that also returns a record of all tasks and steps.
#[cfg(feature = "std")]
pub fn sort_ips2ra_traced<T, M>(
    data: &mut [T],
    model: &M,
    threads: usize,
    cfg: &SortConfig,
) -> Result<Trace, Error>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let mut trace = Trace::new(data.len(), threads);
    run(data, model, threads, cfg, true, Some(&mut trace))?;
    trace.finish();
    Ok(trace)
}

fn run<T, M>(
    data: &mut [T],
    model: &M,
    threads: usize,
    cfg: &SortConfig,
    radix: bool,
    mut trace: Option<&mut Trace>,
) -> Result<(), Error>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    cfg.validate()?;
    if threads == 0 {
        return Err(Error::Threads(threads));
    }
    if radix && !M::HAS_RADIX_KEY {
        return Err(Error::MissingRadixKey);
    }
    let n = data.len();
    if n <= 1 {
        return Ok(());
    }

    let mode = if radix {
        let (or, and) = data.iter().fold((0u64, u64::MAX), |(o, a), e| {
            let k = model.radix_key(e);
            (o | k, a & k)
        });
        if or == and {
            if let Some(t) = trace.as_deref_mut() {
                t.steps.push(StepRecord {
                    level: 0,
                    begin: 0,
                    end: n,
                    boundaries: alloc::vec![0, n],
                    radix: None,
                    parallel: false,
                });
            }
            return Ok(());
        }
        TaskMode::Radix {
            bits_left: 64 - or.leading_zeros(),
        }
    } else {
        match detect_easy_input(data, |a, b| model.less(a, b)) {
            EasyInput::Sorted => return Ok(()),
            EasyInput::ReverseSorted => {
                data.reverse();
                return Ok(());
            }
            EasyInput::Neither => TaskMode::Compare,
        }
    };

    let block = cfg.block_elements_for(core::mem::size_of::<T>());
    let ctx = Ctx { cfg, model, block };
    let root = Task::root(n, mode);

    #[cfg(feature = "std")]
    if threads > 1 && n >= threads * block * 4 {
        parallel::sort_parallel(data, root, &ctx, threads, trace);
        return Ok(());
    }

    let mut local = LocalData::new(cfg.k_max, block);
    let mut thread_trace = trace.as_ref().map(|_| Default::default());
    sequential::sort_sequential(data, root, &ctx, &mut local, thread_trace.as_mut(), 0);
    if let (Some(t), Some(tt)) = (trace, thread_trace) {
        t.absorb(tt);
    }
    Ok(())
}
