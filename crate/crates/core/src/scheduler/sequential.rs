use alloc::vec;
use alloc::vec::Vec;

use super::{base_case_sort, is_base_case};
use crate::element::ElementModel;
use crate::partition::{
    plan_samplesort, sequential_step, BucketRange, Ctx, LocalData, Plan, StepOutcome,
};
use crate::trace::{SequentialKind, SequentialTaskRecord, StepRecord, ThreadTrace};
use crate::util::RawSlice;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TaskMode {
    Compare,
    /// Keys agree above bit `bits_left`.
    Radix { bits_left: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Task {
    pub begin: usize,
    pub end: usize,
    pub parent_len: usize,
    pub level: u32,
    pub mode: TaskMode,
}

impl Task {
    pub fn root(n: usize, mode: TaskMode) -> Self {
        Task {
            begin: 0,
            end: n,
            parent_len: usize::MAX,
            level: 0,
            mode,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.begin
    }

    /// Child task for `bucket` of a step over this task.
    pub fn child(&self, bucket: &BucketRange, mode: TaskMode) -> Task {
        Task {
            begin: self.begin + bucket.begin,
            end: self.begin + bucket.end,
            parent_len: self.len(),
            level: self.level + 1,
            mode,
        }
    }

    /// Digit used by a step over this task, `(shift, bits)`.
    pub fn digit(&self, radix_bits: u32) -> Option<(u32, u32)> {
        match self.mode {
            TaskMode::Compare => None,
            TaskMode::Radix { bits_left } => {
                let bits = radix_bits.min(bits_left);
                Some((bits_left - bits, bits))
            }
        }
    }

    pub fn child_mode(&self, radix_bits: u32) -> TaskMode {
        match self.digit(radix_bits) {
            None => TaskMode::Compare,
            Some((shift, _)) => TaskMode::Radix { bits_left: shift },
        }
    }
}

/// Whether a comparison task (or a bucket of a step over `parent_len`
/// elements) is sorted directly. Tasks shorter than a block are too.
pub(crate) fn compare_leaf<M>(size: usize, parent_len: usize, ctx: &Ctx<'_, M>) -> bool {
    is_base_case(size, parent_len, ctx.cfg) || size < ctx.block
}

pub(crate) fn step_record(task: &Task, out: &StepOutcome, radix: Option<(u32, u32)>, parallel: bool) -> StepRecord {
    StepRecord {
        level: task.level,
        begin: task.begin,
        end: task.end,
        boundaries: out.boundaries.iter().map(|b| b + task.begin).collect(),
        radix,
        parallel,
    }
}

/// Processes one sequential task; open children go onto `stack` so that the
/// leftmost is popped first. Returns whether a partitioning step ran.
pub(crate) fn process_task<T, M>(
    data: RawSlice<T>,
    mut task: Task,
    ctx: &Ctx<'_, M>,
    local: &mut LocalData<T>,
    stack: &mut Vec<Task>,
    mut trace: Option<&mut ThreadTrace>,
    thread: usize,
) -> bool
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let cfg = ctx.cfg;
    let model = ctx.model;
    let size = task.len();
    let less = |a: &T, b: &T| model.less(a, b);
    // SAFETY: the task range is owned by this thread.
    let slice = unsafe { data.sub(task.begin, task.end).as_mut_slice() };

    let leaf = match task.mode {
        TaskMode::Compare => compare_leaf(size, task.parent_len, ctx),
        TaskMode::Radix { bits_left } => {
            if bits_left == 0 {
                return false;
            }
            if size > 2 * cfg.n0 && size < cfg.base_case_cutoff_radix {
                task.mode = TaskMode::Compare;
                task.parent_len = usize::MAX;
                compare_leaf(size, task.parent_len, ctx)
            } else {
                size <= 2 * cfg.n0
            }
        }
    };
    if let Some(t) = trace.as_deref_mut() {
        t.sequential.push(SequentialTaskRecord {
            thread,
            level: task.level,
            begin: task.begin,
            end: task.end,
            kind: if leaf {
                SequentialKind::BaseCase
            } else {
                SequentialKind::Partition
            },
        });
    }
    if leaf {
        base_case_sort(slice, less);
        return false;
    }

    let digit = task.digit(cfg.radix_bits());
    let out = match digit {
        None => {
            let plan = plan_samplesort(slice, task.begin, ctx, local);
            sequential_step(slice, &plan, ctx, local, |b, _| {
                let done = compare_leaf(b.len(), size, ctx);
                if done {
                    base_case_sort(b, less);
                }
                done
            })
        }
        Some((shift, bits)) => {
            let plan = Plan::Radix { shift, bits };
            sequential_step(slice, &plan, ctx, local, |b, _| {
                let done = b.len() <= 2 * cfg.n0;
                if done {
                    base_case_sort(b, less);
                }
                done
            })
        }
    };
    if let Some(t) = trace {
        t.steps.push(step_record(&task, &out, digit, false));
    }
    let mode = task.child_mode(cfg.radix_bits());
    for b in out.buckets.iter().rev().filter(|b| b.is_open()) {
        stack.push(task.child(b, mode));
    }
    true
}

/// Sorts the range of `root` on the calling thread.
pub(crate) fn sort_sequential<T, M>(
    data: &mut [T],
    root: Task,
    ctx: &Ctx<'_, M>,
    local: &mut LocalData<T>,
    mut trace: Option<&mut ThreadTrace>,
    thread: usize,
) where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let raw = RawSlice::new(data);
    let mut stack = vec![root];
    while let Some(task) = stack.pop() {
        process_task(raw, task, ctx, local, &mut stack, trace.as_deref_mut(), thread);
    }
}

/// Sorts the sample of a step, reusing the caller's scratch memory.
pub(crate) fn sort_sample<T, M>(sample: &mut [T], ctx: &Ctx<'_, M>, local: &mut LocalData<T>)
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let root = Task::root(sample.len(), TaskMode::Compare);
    sort_sequential(sample, root, ctx, local, None, 0);
}
