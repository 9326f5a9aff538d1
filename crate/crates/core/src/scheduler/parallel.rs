//! Static scheduling of parallel tasks onto thread groups, followed by the
//! local stacks and voluntary work sharing.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Barrier, Mutex};
use std::vec::Vec;

use super::sequential::{process_task, step_record, Task};
use super::thread_of;
use crate::element::ElementModel;
use crate::partition::parallel::{parallel_step, SharedStep};
use crate::partition::{Ctx, LocalData, NoObserver, StepMode};
use crate::trace::{ParallelTaskRecord, ThreadTrace, Trace};
use crate::util::{relax, RawSlice};

struct Group<T> {
    first: usize,
    end: usize,
    barrier: Barrier,
    step: SharedStep<T>,
}

impl<T: Copy> Group<T> {
    fn new(first: usize, end: usize, max_buckets: usize) -> Self {
        Group {
            first,
            end,
            barrier: Barrier::new(end - first),
            step: SharedStep::new(end - first, max_buckets),
        }
    }
}

struct Run<'a, 'c, T, M> {
    data: RawSlice<T>,
    n: usize,
    t: usize,
    ctx: &'a Ctx<'c, M>,
    max_buckets: usize,
    handles: Vec<Mutex<Option<Arc<Group<T>>>>>,
    global: Mutex<Vec<Task>>,
    idle: AtomicUsize,
}

pub(crate) fn sort_parallel<T, M>(
    data: &mut [T],
    root: Task,
    ctx: &Ctx<'_, M>,
    t: usize,
    trace: Option<&mut Trace>,
) where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let n = data.len();
    let max_buckets = 2 * ctx.cfg.k_max;
    let root_group = Arc::new(Group::new(0, t, max_buckets));
    let run = Run {
        data: RawSlice::new(data),
        n,
        t,
        ctx,
        max_buckets,
        handles: (0..t).map(|_| Mutex::new(Some(root_group.clone()))).collect(),
        global: Mutex::new(Vec::new()),
        idle: AtomicUsize::new(0),
    };
    drop(root_group);
    let tracing = trace.is_some();
    let traces: Vec<ThreadTrace> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..t)
            .map(|i| {
                let run = &run;
                s.spawn(move || worker(run, i, root, tracing))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sort worker panicked"))
            .collect()
    });
    if let Some(tr) = trace {
        for tt in traces {
            tr.absorb(tt);
        }
    }
}

fn worker<T, M>(run: &Run<'_, '_, T, M>, i: usize, root: Task, tracing: bool) -> ThreadTrace
where
    T: Copy + Send + Sync,
    M: ElementModel<T>,
{
    let ctx = run.ctx;
    let (n, t) = (run.n, run.t);
    let mut trace = ThreadTrace::default();
    let mut local = LocalData::new(ctx.cfg.k_max, ctx.block);
    let mut stack: Vec<Task> = Vec::new();
    let mut group = run.handles[i].lock().unwrap().clone().expect("root group");
    let mut task = root;
    let radix_bits = ctx.cfg.radix_bits();

    loop {
        let digit = task.digit(radix_bits);
        let mode = match digit {
            None => StepMode::Samplesort,
            Some((shift, bits)) => StepMode::Radix { shift, bits },
        };
        let me = i - group.first;
        let out = parallel_step(
            run.data.sub(task.begin, task.end),
            task.begin,
            mode,
            ctx,
            &mut local,
            &group.step,
            &group.barrier,
            me,
            &mut NoObserver,
        );
        if tracing {
            trace.parallel.push(ParallelTaskRecord {
                thread: i,
                level: task.level,
                begin: task.begin,
                end: task.end,
                group_begin: group.first,
                group_end: group.end,
            });
            if me == 0 {
                trace.steps.push(step_record(&task, &out, digit, true));
            }
        }

        let child_mode = task.child_mode(radix_bits);
        let mut next = None;
        for b in out.buckets.iter().rev().filter(|b| b.is_open()) {
            let child = task.child(b, child_mode);
            let (first, end) = (thread_of(child.begin, n, t), thread_of(child.end, n, t));
            if end - first > 1 {
                if first <= i && i < end {
                    next = Some(child);
                }
            } else if first.min(group.end - 1) == i {
                stack.push(child);
            }
        }

        let Some(child) = next else {
            group.barrier.wait();
            break;
        };
        let first = thread_of(child.begin, n, t);
        if i == first {
            let end = thread_of(child.end, n, t);
            let g = Arc::new(Group::new(first, end, run.max_buckets));
            for h in &run.handles[first..end] {
                *h.lock().unwrap() = Some(g.clone());
            }
        }
        group.barrier.wait();
        group = run.handles[i].lock().unwrap().clone().expect("subgroup handle");
        task = child;
    }
    drop(group);

    loop {
        while let Some(task) = stack.pop() {
            let partitioned = process_task(
                run.data,
                task,
                ctx,
                &mut local,
                &mut stack,
                tracing.then_some(&mut trace),
                i,
            );
            if ctx.cfg.work_sharing && partitioned && !stack.is_empty() && run.idle.load(Ordering::SeqCst) > 0 {
                let (idx, _) = stack
                    .iter()
                    .enumerate()
                    .max_by_key(|(j, task)| (task.len(), *j))
                    .expect("stack not empty");
                let donated = stack.remove(idx);
                run.global.lock().unwrap().push(donated);
                trace.donations += 1;
            }
        }
        if !ctx.cfg.work_sharing {
            break;
        }
        let mut global = run.global.lock().unwrap();
        run.idle.fetch_add(1, Ordering::SeqCst);
        let task = loop {
            if let Some(task) = global.pop() {
                run.idle.fetch_sub(1, Ordering::SeqCst);
                break Some(task);
            }
            if run.idle.load(Ordering::SeqCst) == t {
                break None;
            }
            drop(global);
            relax();
            global = run.global.lock().unwrap();
        };
        match task {
            Some(task) => stack.push(task),
            None => break,
        }
    }
    trace
}
