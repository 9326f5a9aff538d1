//! Optional record of what the scheduler did during a sort.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// A parallel task executed by one member of a thread group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelTaskRecord {
    pub thread: usize,
    pub level: u32,
    pub begin: usize,
    pub end: usize,
    /// Thread range `[group_begin, group_end)` of the group.
    pub group_begin: usize,
    pub group_end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequentialKind {
    Partition,
    BaseCase,
}

/// A sequential task taken from a thread's stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequentialTaskRecord {
    pub thread: usize,
    pub level: u32,
    pub begin: usize,
    pub end: usize,
    pub kind: SequentialKind,
}

/// One partitioning step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub level: u32,
    pub begin: usize,
    pub end: usize,
    /// Absolute exact bucket boundaries.
    pub boundaries: Vec<usize>,
    /// `(shift, bits)` of the digit for radix steps.
    pub radix: Option<(u32, u32)>,
    pub parallel: bool,
}

/// Everything one thread recorded.
#[derive(Debug, Clone, Default)]
pub struct ThreadTrace {
    pub parallel: Vec<ParallelTaskRecord>,
    pub sequential: Vec<SequentialTaskRecord>,
    pub steps: Vec<StepRecord>,
    pub donations: usize,
}

/// Merged record of a whole sort.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub n: usize,
    pub threads: usize,
    pub parallel: Vec<ParallelTaskRecord>,
    pub sequential: Vec<SequentialTaskRecord>,
    /// Sorted by position, then level.
    pub steps: Vec<StepRecord>,
    pub donations: usize,
}

impl Trace {
    pub(crate) fn new(n: usize, threads: usize) -> Self {
        Trace {
            n,
            threads,
            ..Default::default()
        }
    }

    pub(crate) fn absorb(&mut self, t: ThreadTrace) {
        self.parallel.extend(t.parallel);
        self.sequential.extend(t.sequential);
        self.steps.extend(t.steps);
        self.donations += t.donations;
    }

    pub(crate) fn finish(&mut self) {
        self.steps.sort_by_key(|s| (s.begin, s.level, s.end));
        self.parallel
            .sort_by_key(|p| (p.level, p.begin, p.thread));
        self.sequential
            .sort_by_key(|s| (s.begin, s.level, s.end, s.thread));
    }

    /// Number of partitioning steps on the longest root-to-leaf path.
    pub fn max_depth(&self) -> u32 {
        self.steps.iter().map(|s| s.level + 1).max().unwrap_or(0)
    }

    /// Checks the locality guarantees of the static schedule (work sharing
    /// off) and describes every violation:
    ///
    /// * a thread takes part in at most one parallel task per level,
    /// * a parallel task over `[b, e)` run by threads `[g0, g1)` has
    ///   `b ∈ [g0·n/t, (g0+1)·n/t)` and `e ∈ [g1·n/t − 1, (g1+1)·n/t)`, with at
    ///   least two threads,
    /// * a sequential task of thread `i` lies inside `[i·n/t, (i+2)·n/t)`.
    pub fn locality_violations(&self) -> Vec<String> {
        let (n, t) = (self.n as u128, self.threads as u128);
        let mut bad = Vec::new();
        let mut seen = alloc::collections::BTreeSet::new();
        for p in &self.parallel {
            if !seen.insert((p.thread, p.level)) {
                bad.push(format!("thread {} ran two parallel tasks on level {}", p.thread, p.level));
            }
            let (b, e) = (p.begin as u128, p.end as u128);
            let (g0, g1) = (p.group_begin as u128, p.group_end as u128);
            if !(g0 * n <= b * t && b * t < (g0 + 1) * n) {
                bad.push(format!("parallel task {b}..{e} starts outside its group slot {g0}"));
            }
            if !(g1 * n <= (e + 1) * t && e * t < (g1 + 1) * n) {
                bad.push(format!("parallel task {b}..{e} ends outside its group slot {g1}"));
            }
            if g1 < g0 + 2 {
                bad.push(format!("parallel task {b}..{e} with a group of {}", g1 - g0));
            }
        }
        for s in &self.sequential {
            let i = s.thread as u128;
            if !(i * n <= s.begin as u128 * t && s.end as u128 * t <= (i + 2) * n) {
                bad.push(format!("sequential task {}..{} outside the window of thread {i}", s.begin, s.end));
            }
        }
        bad
    }

    /// Tasks executed per thread, counting parallel and sequential tasks.
    pub fn tasks_per_thread(&self) -> Vec<usize> {
        let mut v = alloc::vec![0; self.threads];
        for p in &self.parallel {
            v[p.thread] += 1;
        }
        for s in &self.sequential {
            v[s.thread] += 1;
        }
        v
    }
}
