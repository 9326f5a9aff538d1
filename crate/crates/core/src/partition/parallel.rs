//! A partitioning step run by a group of threads.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::UnsafeCell;
use core::ptr;
use core::sync::atomic::{AtomicPtr, AtomicUsize, Ordering};

use super::phases::{self, Leftovers, PermuteScratch, StripeBlocks};
use super::{
    bucket_ranges, compute_boundaries, plan_samplesort, written_ends, AtomicPairs,
    BucketIndexPairs, BufferBlockSet, Ctx, LocalData, LockedPairs, Plan, PermuteObserver,
    StepMode, StepOutcome, Block,
};
use crate::classifier::{Classifier, RadixClassifier, TreeClassifier};
use crate::element::ElementModel;
use crate::util::{CachePadded, RawSlice};

/// Synchronization point of a thread group.
pub(crate) trait GroupBarrier: Sync {
    fn wait(&self);
}

#[cfg(feature = "std")]
impl GroupBarrier for std::sync::Barrier {
    fn wait(&self) {
        std::sync::Barrier::wait(self);
    }
}

pub(crate) enum SharedPairs {
    Atomic(AtomicPairs),
    Locked(LockedPairs),
}

impl SharedPairs {
    pub fn new(buckets: usize) -> Self {
        match AtomicPairs::new(buckets) {
            Some(p) => SharedPairs::Atomic(p),
            None => SharedPairs::Locked(LockedPairs::new(buckets)),
        }
    }
}

struct Slot<T>(CachePadded<UnsafeCell<T>>);

impl<T: Default> Default for Slot<T> {
    fn default() -> Self {
        Slot(CachePadded(UnsafeCell::new(T::default())))
    }
}

/// State shared by the threads of a group during one step.
///
/// Every slot is written by one thread before a barrier and only read by
/// others after it.
pub(crate) struct SharedStep<T> {
    threads: usize,
    plan: UnsafeCell<Option<Plan<T>>>,
    stripes: Vec<Slot<StripeBlocks>>,
    counts: Vec<Slot<Vec<usize>>>,
    buffers: Vec<CachePadded<AtomicPtr<BufferBlockSet<T>>>>,
    overflow: AtomicPtr<Block<T>>,
    overflow_bucket: AtomicUsize,
    pairs: SharedPairs,
}

// SAFETY: access to the cells is ordered by the group's barriers.
unsafe impl<T: Send + Sync> Sync for SharedStep<T> {}
unsafe impl<T: Send + Sync> Send for SharedStep<T> {}

const NO_BUCKET: usize = usize::MAX;

impl<T: Copy> SharedStep<T> {
    pub fn new(threads: usize, max_buckets: usize) -> Self {
        SharedStep {
            threads,
            plan: UnsafeCell::new(None),
            stripes: (0..threads).map(|_| Slot::default()).collect(),
            counts: (0..threads).map(|_| Slot::default()).collect(),
            buffers: (0..threads)
                .map(|_| CachePadded(AtomicPtr::new(ptr::null_mut())))
                .collect(),
            overflow: AtomicPtr::new(ptr::null_mut()),
            overflow_bucket: AtomicUsize::new(NO_BUCKET),
            pairs: SharedPairs::new(max_buckets),
        }
    }
}

/// Runs this thread's share of a group step over `arr`.
///
/// Thread 0 of the group draws the sample. Every thread of the group must
/// call this with the same arguments except `local`, `me` and `observer`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn parallel_step<T, M, B, O>(
    arr: RawSlice<T>,
    abs_begin: usize,
    mode: StepMode,
    ctx: &Ctx<'_, M>,
    local: &mut LocalData<T>,
    shared: &SharedStep<T>,
    barrier: &B,
    me: usize,
    observer: &mut O,
) -> StepOutcome
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
    B: GroupBarrier + ?Sized,
    O: PermuteObserver<T>,
{
    if me == 0 {
        let plan = match mode {
            // SAFETY: the other threads wait at the barrier below.
            StepMode::Samplesort => {
                plan_samplesort(unsafe { arr.as_mut_slice() }, abs_begin, ctx, local)
            }
            StepMode::Radix { shift, bits } => Plan::Radix { shift, bits },
        };
        unsafe { *shared.plan.get() = Some(plan) };
    }
    barrier.wait();
    // SAFETY: written before the barrier, never written again.
    let plan = unsafe { (*shared.plan.get()).as_ref() }.expect("plan published");
    match plan {
        Plan::Single => StepOutcome::single(arr.len()),
        Plan::Tree(tree) => {
            let cls = TreeClassifier { tree, model: ctx.model };
            run_parallel(arr, &cls, ctx.block, ctx.cfg.unroll, local, shared, barrier, me, observer)
        }
        &Plan::Radix { shift, bits } => {
            let cls = RadixClassifier::new(ctx.model, shift, bits);
            run_parallel(arr, &cls, ctx.block, ctx.cfg.unroll, local, shared, barrier, me, observer)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn run_parallel<T, C, B, O>(
    arr: RawSlice<T>,
    cls: &C,
    block: usize,
    unroll: usize,
    local: &mut LocalData<T>,
    shared: &SharedStep<T>,
    barrier: &B,
    me: usize,
    observer: &mut O,
) -> StepOutcome
where
    T: Copy + Send + Sync,
    C: Classifier<T> + ?Sized,
    B: GroupBarrier + ?Sized,
    O: PermuteObserver<T>,
{
    match &shared.pairs {
        SharedPairs::Atomic(p) => {
            run_with_pairs(arr, cls, block, unroll, local, shared, p, barrier, me, observer)
        }
        SharedPairs::Locked(p) => {
            run_with_pairs(arr, cls, block, unroll, local, shared, p, barrier, me, observer)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_with_pairs<T, C, P, B, O>(
    arr: RawSlice<T>,
    cls: &C,
    block: usize,
    unroll: usize,
    local: &mut LocalData<T>,
    shared: &SharedStep<T>,
    pairs: &P,
    barrier: &B,
    me: usize,
    observer: &mut O,
) -> StepOutcome
where
    T: Copy + Send + Sync,
    C: Classifier<T> + ?Sized,
    P: BucketIndexPairs,
    B: GroupBarrier + ?Sized,
    O: PermuteObserver<T>,
{
    let t = shared.threads;
    let n = arr.len();
    let k = cls.num_buckets();
    assert!(k <= pairs.len(), "more buckets than index pairs");
    let blocks = n.div_ceil(block);
    let (b0, b1) = (me * blocks / t, (me + 1) * blocks / t);

    local.prepare(k);
    // SAFETY: stripes are disjoint.
    let first_empty = unsafe {
        phases::classify_stripe(
            arr,
            b0 * block,
            (b1 * block).min(n),
            cls,
            unroll,
            &mut local.buffers,
            &mut local.counts,
        )
    };
    let LocalData {
        buffers,
        swap,
        overflow,
        counts,
        ..
    } = local;
    let buffers: &BufferBlockSet<T> = buffers;
    unsafe {
        *shared.stripes[me].0.get() = StripeBlocks {
            begin: b0,
            first_empty: first_empty / block,
            end: b1,
        };
        let row = &mut *shared.counts[me].0.get();
        row.clear();
        row.extend_from_slice(&counts[..k]);
    }
    shared.buffers[me].store(buffers as *const _ as *mut _, Ordering::Release);
    barrier.wait();

    // SAFETY: all rows and stripes are complete and stay untouched until
    // the next step.
    let (stripes, rows): (Vec<StripeBlocks>, Vec<&Vec<usize>>) = unsafe {
        (
            shared.stripes.iter().map(|s| *s.0.get()).collect(),
            shared.counts.iter().map(|c| &*c.0.get()).collect(),
        )
    };
    let bounds = compute_boundaries(&rows, block);
    let delims: Vec<usize> = bounds.delimiters.iter().map(|d| d / block).collect();
    let mut full = vec![0usize; k];
    phases::full_blocks_per_bucket(&stripes, &delims, &mut full);
    let stripe_moves = unsafe { phases::fix_stripe_gaps(arr, block, &stripes, &delims, &full, me) };
    for i in (me..k).step_by(t) {
        pairs.set(i, delims[i] as i64, (delims[i] + full[i]) as i64 - 1);
    }
    if me == 0 {
        shared.overflow_bucket.store(NO_BUCKET, Ordering::Relaxed);
    }
    barrier.wait();

    let (ob, permute) = unsafe {
        phases::permute_blocks(
            arr,
            block,
            &bounds.delimiters,
            pairs,
            cls,
            PermuteScratch {
                swap: &mut *swap,
                overflow: &mut *overflow,
            },
            me,
            t,
            observer,
        )
    };
    if let Some(b) = ob {
        shared.overflow.store(&*overflow as *const _ as *mut _, Ordering::Release);
        shared.overflow_bucket.store(b, Ordering::Release);
    }
    barrier.wait();

    let overflow_bucket = match shared.overflow_bucket.load(Ordering::Acquire) {
        NO_BUCKET => None,
        b => Some(b),
    };
    let written = written_ends(pairs, k, block, overflow_bucket);
    let (lo, hi) = (k * me / t, k * (me + 1) / t);
    let saved = unsafe { phases::save_margin(arr, &bounds.exact, &written, block, lo, hi, &mut swap[0]) };
    barrier.wait();

    // SAFETY: the pointers were published before earlier barriers and their
    // targets are not modified until the final barrier.
    let all_buffers: Vec<&BufferBlockSet<T>> = shared
        .buffers
        .iter()
        .map(|p| unsafe { &*p.load(Ordering::Acquire) })
        .collect();
    let overflow_ref = overflow_bucket.map(|b| (b, unsafe { &*shared.overflow.load(Ordering::Acquire) }));
    let left = Leftovers {
        exact: &bounds.exact,
        written: &written,
        block,
        buffers: &all_buffers,
        overflow: overflow_ref,
        saved: saved.map(|(b, from)| (b, from, &swap[0])),
    };
    unsafe { phases::cleanup(arr, lo, hi, &left, |_, _, _| {}) };
    barrier.wait();

    StepOutcome {
        buckets: bucket_ranges(&bounds.exact, |i| cls.is_terminal(i), &[]),
        boundaries: bounds.exact,
        permute,
        stripe_moves,
    }
}

/// One partitioning step over `data` run by `threads` threads, with a
/// caller-supplied classifier. `observer(i)` builds the observer of thread
/// `i`. Reports the outcome seen by thread 0, with the permutation counters
/// summed over all threads.
#[cfg(feature = "std")]
pub fn partition_with_threads<T, C, O, F>(
    data: &mut [T],
    classifier: &C,
    block: usize,
    unroll: usize,
    threads: usize,
    observer: F,
) -> StepOutcome
where
    T: Copy + Send + Sync,
    C: Classifier<T> + ?Sized,
    O: PermuteObserver<T>,
    F: Fn(usize) -> O + Sync,
{
    assert!(block > 0 && threads > 0);
    let k = classifier.num_buckets();
    let shared = SharedStep::new(threads, k);
    let barrier = std::sync::Barrier::new(threads);
    let arr = RawSlice::new(data);
    let outcomes: Vec<StepOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|me| {
                let (shared, barrier, observer) = (&shared, &barrier, &observer);
                s.spawn(move || {
                    let mut local = LocalData::new(k, block);
                    let mut obs = observer(me);
                    run_parallel(arr, classifier, block, unroll, &mut local, shared, barrier, me, &mut obs)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("partition thread panicked")).collect()
    });
    let mut out = outcomes[0].clone();
    out.permute = outcomes.iter().fold(Default::default(), |acc: super::PermuteStats, o| super::PermuteStats {
        reads: acc.reads + o.permute.reads,
        moves: acc.moves + o.permute.moves,
        skips: acc.skips + o.permute.skips,
    });
    out.stripe_moves = outcomes.iter().map(|o| o.stripe_moves).sum();
    out
}
