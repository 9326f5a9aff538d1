//! One k-way partitioning step: classification into buffer blocks, block
//! permutation and cleanup, for a single thread or a thread group.

mod buffers;
mod observe;
mod pairs;
#[cfg(feature = "std")]
pub(crate) mod parallel;
mod phases;

use alloc::vec;
use alloc::vec::Vec;

use rand::rngs::SmallRng;
use rand::SeedableRng;

use crate::classifier::{
    build_tree, draw_sample, select_splitters, Classifier, DecisionTree, RadixClassifier,
    TreeClassifier,
};
use crate::config::{effective_bucket_count, SortConfig};
use crate::element::ElementModel;
use crate::util::{task_seed, RawSlice};
use crate::Error;

pub(crate) use buffers::Block;
pub use buffers::BufferBlockSet;
pub use observe::{NoObserver, PermuteObserver, PermuteView};
pub use pairs::{pack, unpack, AtomicPairs, BucketIndexPairs, LockedPairs, PlainPairs};
pub use phases::{PermuteStats, StripeBlocks};
#[cfg(feature = "std")]
pub use parallel::partition_with_threads;

use phases::{align_up, Leftovers, PermuteScratch};

/// Bucket starts of one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketBoundaries {
    /// Exact prefix sums, `k + 1` entries.
    pub exact: Vec<usize>,
    /// The same values rounded up to a block multiple.
    pub delimiters: Vec<usize>,
}

/// Aggregates per-thread bucket counts into bucket boundaries relative to
/// the task start.
pub fn compute_boundaries<R: AsRef<[usize]>>(counts: &[R], block: usize) -> BucketBoundaries {
    let k = counts.first().map_or(0, |c| c.as_ref().len());
    let mut exact = Vec::with_capacity(k + 1);
    let mut sum = 0usize;
    exact.push(0);
    for i in 0..k {
        sum += counts.iter().map(|c| c.as_ref()[i]).sum::<usize>();
        exact.push(sum);
    }
    let delimiters = exact.iter().map(|&x| align_up(x, block)).collect();
    BucketBoundaries { exact, delimiters }
}

/// One output bucket of a step, relative to the task start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BucketRange {
    pub begin: usize,
    pub end: usize,
    /// Needs no further sorting: an equality bucket, a bucket whose keys
    /// have no digits left, or the single bucket of an all-equal task.
    pub terminal: bool,
    /// Was sorted as a base case right after cleanup filled it.
    pub sorted: bool,
}

impl BucketRange {
    pub fn len(&self) -> usize {
        self.end - self.begin
    }

    pub fn is_empty(&self) -> bool {
        self.begin == self.end
    }

    /// Whether the scheduler still has work to do on this bucket.
    pub fn is_open(&self) -> bool {
        !self.terminal && !self.sorted && self.len() > 1
    }
}

/// How a step assigns buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Samplesort,
    /// One digit of `bits` bits starting at bit `shift` of the radix key.
    Radix { shift: u32, bits: u32 },
}

/// Result of one step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub buckets: Vec<BucketRange>,
    /// Exact bucket boundaries (`buckets.len() + 1` entries).
    pub boundaries: Vec<usize>,
    pub permute: PermuteStats,
    /// Blocks moved to close gaps between stripes.
    pub stripe_moves: usize,
}

impl StepOutcome {
    fn single(n: usize) -> Self {
        StepOutcome {
            buckets: vec![BucketRange {
                begin: 0,
                end: n,
                terminal: true,
                sorted: false,
            }],
            boundaries: vec![0, n],
            ..Default::default()
        }
    }
}

/// Shared read-only parameters of a sort run.
pub(crate) struct Ctx<'a, M> {
    pub cfg: &'a SortConfig,
    pub model: &'a M,
    pub block: usize,
}

/// Scratch memory of one thread, reused by every step it runs.
pub(crate) struct LocalData<T> {
    pub buffers: BufferBlockSet<T>,
    pub swap: [Block<T>; 2],
    pub overflow: Block<T>,
    pub pairs: PlainPairs,
    pub counts: Vec<usize>,
}

impl<T: Copy> LocalData<T> {
    pub fn new(buckets: usize, block: usize) -> Self {
        LocalData {
            buffers: BufferBlockSet::new(buckets, block),
            swap: [Block::new(block), Block::new(block)],
            overflow: Block::new(block),
            pairs: PlainPairs::new(buckets),
            counts: vec![0; buckets],
        }
    }

    fn prepare(&mut self, buckets: usize) {
        self.buffers.reset(buckets);
        self.pairs.resize(buckets);
        self.counts.clear();
        self.counts.resize(buckets, 0);
    }
}

/// Bucket rule chosen for a step.
pub(crate) enum Plan<T> {
    Tree(DecisionTree<T>),
    Radix { shift: u32, bits: u32 },
    /// Every element is equal; the task is one terminal bucket.
    Single,
}

/// Draws and sorts a sample at the front of `task` and builds the decision
/// tree from it.
pub(crate) fn plan_samplesort<T, M>(
    task: &mut [T],
    abs_begin: usize,
    ctx: &Ctx<'_, M>,
    local: &mut LocalData<T>,
) -> Plan<T>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let n = task.len();
    let cfg = ctx.cfg;
    let k = effective_bucket_count(n, cfg).unwrap_or(2);
    let count = cfg.sample_count(n, k).max(1);
    let mut rng = SmallRng::seed_from_u64(task_seed(cfg.seed, abs_begin, abs_begin + n));
    draw_sample(task, count, &mut rng);
    if 2 * count > n {
        // recursing would not shrink the problem
        crate::scheduler::base_case_sort(&mut task[..count], |a, b| ctx.model.less(a, b));
    } else {
        crate::scheduler::sort_sample(&mut task[..count], ctx, local);
    }
    let mut sel = select_splitters(&task[..count], k, ctx.model).expect("sample is never empty");
    // A lone splitter equal to the task maximum would put everything into
    // one bucket.
    sel.use_equality |= sel.splitters.len() == 1;
    if sel.all_equal {
        let s = sel.splitters[0];
        let m = ctx.model;
        if task.iter().all(|e| !m.less(e, &s) && !m.less(&s, e)) {
            return Plan::Single;
        }
    }
    Plan::Tree(build_tree(&sel))
}

/// Runs one sequential step over `task` with the given classifier.
///
/// `finish(bucket, begin, end)` is called for every bucket as soon as it is
/// complete and returns whether it sorted the bucket.
pub(crate) fn run_sequential<T, C, O>(
    task: &mut [T],
    cls: &C,
    block: usize,
    unroll: usize,
    local: &mut LocalData<T>,
    observer: &mut O,
    mut finish: impl FnMut(&mut [T], usize) -> bool,
) -> StepOutcome
where
    T: Copy,
    C: Classifier<T> + ?Sized,
    O: PermuteObserver<T>,
{
    let n = task.len();
    let k = cls.num_buckets();
    local.prepare(k);
    let arr = RawSlice::new(task);

    // SAFETY: this thread owns the whole task.
    let first_empty = unsafe {
        phases::classify_stripe(arr, 0, n, cls, unroll, &mut local.buffers, &mut local.counts)
    };
    let BucketBoundaries { exact, delimiters } = compute_boundaries(&[&local.counts[..k]], block);
    let full_end = first_empty / block;
    for i in 0..k {
        let d0 = delimiters[i] / block;
        let d1 = (delimiters[i + 1] / block).min(full_end).max(d0);
        local.pairs.set(i, d0 as i64, d1 as i64 - 1);
    }

    let (overflow_bucket, permute) = unsafe {
        phases::permute_blocks(
            arr,
            block,
            &delimiters,
            &local.pairs,
            cls,
            PermuteScratch {
                swap: &mut local.swap,
                overflow: &mut local.overflow,
            },
            0,
            1,
            observer,
        )
    };

    let written = written_ends(&local.pairs, k, block, overflow_bucket);
    let buffers = [&local.buffers];
    let left = Leftovers {
        exact: &exact,
        written: &written,
        block,
        buffers: &buffers,
        overflow: overflow_bucket.map(|b| (b, &local.overflow)),
        saved: None,
    };
    let mut sorted = vec![false; k];
    unsafe {
        phases::cleanup(arr, 0, k, &left, |i, s0, s1| {
            if !cls.is_terminal(i) && s1 - s0 > 1 {
                sorted[i] = finish(arr.sub(s0, s1).as_mut_slice(), i);
            }
        })
    };

    StepOutcome {
        buckets: bucket_ranges(&exact, |i| cls.is_terminal(i), &sorted),
        boundaries: exact,
        permute,
        stripe_moves: 0,
    }
}

fn written_ends<P: BucketIndexPairs>(
    pairs: &P,
    k: usize,
    block: usize,
    overflow: Option<usize>,
) -> Vec<usize> {
    (0..k)
        .map(|i| {
            let w = pairs.load(i).0 as usize * block;
            if overflow == Some(i) {
                w - block
            } else {
                w
            }
        })
        .collect()
}

fn bucket_ranges(exact: &[usize], terminal: impl Fn(usize) -> bool, sorted: &[bool]) -> Vec<BucketRange> {
    exact
        .windows(2)
        .enumerate()
        .map(|(i, w)| BucketRange {
            begin: w[0],
            end: w[1],
            terminal: terminal(i),
            sorted: sorted.get(i).copied().unwrap_or(false),
        })
        .collect()
}

/// Runs a sequential step whose plan is already fixed.
pub(crate) fn sequential_step<T, M>(
    task: &mut [T],
    plan: &Plan<T>,
    ctx: &Ctx<'_, M>,
    local: &mut LocalData<T>,
    finish: impl FnMut(&mut [T], usize) -> bool,
) -> StepOutcome
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let (block, unroll) = (ctx.block, ctx.cfg.unroll);
    match plan {
        Plan::Single => StepOutcome::single(task.len()),
        Plan::Tree(tree) => {
            let cls = TreeClassifier { tree, model: ctx.model };
            run_sequential(task, &cls, block, unroll, local, &mut NoObserver, finish)
        }
        &Plan::Radix { shift, bits } => {
            let cls = RadixClassifier::new(ctx.model, shift, bits);
            run_sequential(task, &cls, block, unroll, local, &mut NoObserver, finish)
        }
    }
}

/// One sequential partitioning step over `data`.
///
/// In samplesort mode a sample is drawn, sorted and turned into a decision
/// tree first; radix mode classifies by the given digit. Buckets are not
/// sorted further.
pub fn partition_step<T, M>(
    data: &mut [T],
    model: &M,
    cfg: &SortConfig,
    mode: StepMode,
) -> Result<StepOutcome, Error>
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    cfg.validate()?;
    let n = data.len();
    if n <= 2 * cfg.n0 {
        return Err(Error::TaskTooSmall {
            size: n,
            limit: 2 * cfg.n0,
        });
    }
    if matches!(mode, StepMode::Radix { .. }) && !M::HAS_RADIX_KEY {
        return Err(Error::MissingRadixKey);
    }
    let block = cfg.block_elements_for(core::mem::size_of::<T>());
    let ctx = Ctx { cfg, model, block };
    let mut local = LocalData::new(cfg.k_max, block);
    let plan = match mode {
        StepMode::Samplesort => plan_samplesort(data, 0, &ctx, &mut local),
        StepMode::Radix { shift, bits } => Plan::Radix { shift, bits },
    };
    Ok(sequential_step(data, &plan, &ctx, &mut local, |_, _| false))
}

/// One sequential step with a caller-supplied classifier and observer,
/// without sampling.
pub fn partition_with<T, C, O>(
    data: &mut [T],
    classifier: &C,
    block: usize,
    unroll: usize,
    observer: &mut O,
) -> StepOutcome
where
    T: Copy,
    C: Classifier<T> + ?Sized,
    O: PermuteObserver<T>,
{
    assert!(block > 0, "block size must be positive");
    let mut local = LocalData::new(classifier.num_buckets(), block);
    run_sequential(data, classifier, block, unroll, &mut local, observer, |_, _| false)
}
