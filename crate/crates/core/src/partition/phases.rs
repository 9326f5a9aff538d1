//! The data phases of a partitioning step. Every function here works on a
//! task range viewed through a [`RawSlice`]; callers guarantee that threads
//! only touch the parts the phase assigns to them.

use crate::classifier::Classifier;
use crate::config::MAX_UNROLL;
use crate::util::RawSlice;

use super::buffers::{Block, BufferBlockSet};
use super::pairs::BucketIndexPairs;
use super::observe::{PermuteObserver, PermuteView};

#[inline(always)]
pub(crate) fn align_up(x: usize, block: usize) -> usize {
    x.div_ceil(block) * block
}

/// Classifies `[begin, end)` into the buffers, writing every full buffer back
/// to the front of the range. Adds per-bucket totals to `counts` and returns
/// the end of the written prefix.
///
/// # Safety
/// The caller owns `[begin, end)` exclusively.
pub(crate) unsafe fn classify_stripe<T, C>(
    arr: RawSlice<T>,
    begin: usize,
    end: usize,
    cls: &C,
    unroll: usize,
    buffers: &mut BufferBlockSet<T>,
    counts: &mut [usize],
) -> usize
where
    T: Copy,
    C: Classifier<T> + ?Sized,
{
    let block = buffers.block();
    let u = unroll.clamp(1, MAX_UNROLL);
    let mut out = [0usize; MAX_UNROLL];
    let mut write = begin;
    let mut i = begin;

    let mut put = |bucket: usize, e: T, write: &mut usize| {
        if buffers.is_full(bucket) {
            // At least `block` more elements were read than written, so the
            // target lies entirely before the element being placed.
            unsafe { buffers.flush(bucket, arr.ptr_at(*write)) };
            *write += block;
            counts[bucket] += block;
        }
        buffers.push(bucket, e);
    };

    while i + u <= end {
        {
            let batch = unsafe { arr.slice(i, i + u) };
            cls.classify_into(batch, u, &mut out[..u]);
        }
        for (j, &bucket) in out[..u].iter().enumerate() {
            let e = unsafe { arr.get(i + j) };
            put(bucket, e, &mut write);
        }
        i += u;
    }
    while i < end {
        let e = unsafe { arr.get(i) };
        put(cls.classify(&e), e, &mut write);
        i += 1;
    }
    for (bucket, c) in counts.iter_mut().enumerate().take(cls.num_buckets()) {
        *c += buffers.len(bucket);
    }
    write
}

/// Layout of one stripe after classification, in blocks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StripeBlocks {
    pub begin: usize,
    pub first_empty: usize,
    pub end: usize,
}

fn overlap(a0: usize, a1: usize, b0: usize, b1: usize) -> (usize, usize) {
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    (lo, hi.max(lo))
}

/// Full blocks of each bucket region, summed over all stripes.
pub(crate) fn full_blocks_per_bucket(stripes: &[StripeBlocks], delims: &[usize], out: &mut [usize]) {
    for (i, f) in out.iter_mut().enumerate() {
        let (r0, r1) = (delims[i], delims[i + 1]);
        *f = stripes
            .iter()
            .map(|s| {
                let (lo, hi) = overlap(s.begin, s.first_empty, r0, r1);
                hi - lo
            })
            .sum();
    }
}

/// Fills the empty blocks of stripe `me` that lie inside some bucket's full
/// prefix with full blocks taken from the end of that bucket.
///
/// Afterwards (once every thread has run this) the full blocks of every
/// bucket region form a prefix of the region. The gaps of stripe `me` get
/// ranks after the gaps of all earlier stripes; gap number `j` receives the
/// `j`-th full block counted from the right end of the region, so all moves
/// of all threads touch disjoint blocks.
///
/// `delims` and `full` are in blocks.
///
/// # Safety
/// Must run concurrently only with the same call for other stripes.
pub(crate) unsafe fn fix_stripe_gaps<T: Copy>(
    arr: RawSlice<T>,
    block: usize,
    stripes: &[StripeBlocks],
    delims: &[usize],
    full: &[usize],
    me: usize,
) -> usize {
    let mine = stripes[me];
    if mine.first_empty == mine.end {
        return 0;
    }
    let buckets = full.len();
    // first bucket whose region ends after our first empty block
    let first = delims[1..=buckets].partition_point(|&d| d <= mine.first_empty);
    let mut moved = 0;
    for i in first..buckets {
        let r0 = delims[i];
        if r0 >= mine.end {
            break;
        }
        let (f0, f1) = (r0, r0 + full[i]);
        let (g0, g1) = overlap(mine.first_empty, mine.end, f0, f1);
        if g0 == g1 {
            continue;
        }
        let before: usize = stripes[..me]
            .iter()
            .map(|s| {
                let (lo, hi) = overlap(s.first_empty, s.end, f0, f1);
                hi - lo
            })
            .sum();
        let mut sources = SourcesFromRight::new(stripes, f1, delims[i + 1], before);
        for gap in g0..g1 {
            let src = sources.next().expect("stripe fix ran out of full blocks");
            unsafe { arr.copy_within(src * block, gap * block, block) };
            moved += 1;
        }
    }
    moved
}

/// Full blocks in `[from, to)` enumerated right to left, after skipping `skip`.
struct SourcesFromRight<'a> {
    stripes: &'a [StripeBlocks],
    from: usize,
    to: usize,
    stripe: usize,
    next: Option<usize>,
}

impl<'a> SourcesFromRight<'a> {
    fn new(stripes: &'a [StripeBlocks], from: usize, to: usize, mut skip: usize) -> Self {
        let mut it = SourcesFromRight {
            stripes,
            from,
            to,
            stripe: stripes.len(),
            next: None,
        };
        while it.stripe > 0 {
            it.stripe -= 1;
            let s = stripes[it.stripe];
            let (lo, hi) = overlap(s.begin, s.first_empty, from, to);
            if hi - lo > skip {
                it.next = Some(hi - 1 - skip);
                return it;
            }
            skip -= hi - lo;
        }
        it
    }
}

impl Iterator for SourcesFromRight<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let cur = self.next?;
        let s = self.stripes[self.stripe];
        let (lo, _) = overlap(s.begin, s.first_empty, self.from, self.to);
        if cur > lo {
            self.next = Some(cur - 1);
        } else {
            self.next = None;
            while self.stripe > 0 {
                self.stripe -= 1;
                let s = self.stripes[self.stripe];
                let (lo, hi) = overlap(s.begin, s.first_empty, self.from, self.to);
                if hi > lo {
                    self.next = Some(hi - 1);
                    break;
                }
            }
        }
        Some(cur)
    }
}

/// Counters reported by [`permute_blocks`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct PermuteStats {
    /// Blocks read into a swap buffer from a primary bucket.
    pub reads: usize,
    /// Blocks written to a position other than the one they came from.
    pub moves: usize,
    /// Unprocessed blocks found already in their bucket and skipped.
    pub skips: usize,
}

/// Swap buffers and overflow block of one thread.
pub(crate) struct PermuteScratch<'a, T> {
    pub swap: &'a mut [Block<T>; 2],
    pub overflow: &'a mut Block<T>,
}

/// Moves every unprocessed block into its bucket region.
///
/// Returns the bucket whose last block went into the overflow block, if this
/// thread wrote it.
///
/// # Safety
/// The pair invariant must hold for all buckets, and every thread of the
/// group must run this with the same `pairs`, `cls` and `arr`.
#[allow(clippy::too_many_arguments)]
pub(crate) unsafe fn permute_blocks<T, C, P, O>(
    arr: RawSlice<T>,
    block: usize,
    delims: &[usize],
    pairs: &P,
    cls: &C,
    scratch: PermuteScratch<'_, T>,
    me: usize,
    threads: usize,
    observer: &mut O,
) -> (Option<usize>, PermuteStats)
where
    T: Copy,
    C: Classifier<T> + ?Sized,
    P: BucketIndexPairs,
    O: PermuteObserver<T>,
{
    let k = cls.num_buckets();
    let n = arr.len();
    let PermuteScratch { swap, overflow } = scratch;
    let mut stats = PermuteStats::default();
    let mut overflow_bucket = None;
    let mut primary = (me * k / threads) % k;

    macro_rules! observe {
        ($held:expr) => {
            if O::ENABLED {
                let snapshot: alloc::vec::Vec<(i64, i64)> = (0..k).map(|i| pairs.load(i)).collect();
                observer.step(&PermuteView {
                    array: unsafe { arr.slice(0, n) },
                    block,
                    delimiters: delims,
                    pairs: &snapshot,
                    held: $held,
                    overflow: overflow_bucket.map(|b| (b, overflow.as_slice())),
                });
            }
        };
    }

    for _ in 0..k {
        loop {
            observer.pause();
            let (w, r) = pairs.dec_read(primary);
            if r < w {
                pairs.stop_read(primary);
                break;
            }
            let mut src = r as usize * block;
            unsafe { swap[0].read_from(arr.ptr_at(src), block) };
            pairs.stop_read(primary);
            stats.reads += 1;
            let mut cur = 0usize;
            let mut dest = cls.classify(swap[0].first());
            observe!(Some(swap[0].as_slice()));

            loop {
                observer.pause();
                let (w, r) = pairs.inc_write(dest);
                let wpos = w as usize * block;
                if w > r {
                    // empty slot
                    if wpos + block > n {
                        unsafe { overflow.read_from(swap[cur].as_slice().as_ptr(), block) };
                        overflow_bucket = Some(dest);
                        stats.moves += 1;
                    } else {
                        pairs.wait_for_readers(dest);
                        unsafe { swap[cur].write_to(arr.ptr_at(wpos)) };
                        if wpos != src {
                            stats.moves += 1;
                        }
                    }
                    observe!(None);
                    break;
                }
                let target = cls.classify(unsafe { &arr.get(wpos) });
                if target == dest {
                    stats.skips += 1;
                    continue;
                }
                let other = 1 - cur;
                unsafe {
                    swap[other].read_from(arr.ptr_at(wpos), block);
                    swap[cur].write_to(arr.ptr_at(wpos));
                }
                stats.moves += 1;
                src = wpos;
                cur = other;
                dest = target;
                observe!(Some(swap[cur].as_slice()));
            }
        }
        primary = (primary + 1) % k;
    }
    (overflow_bucket, stats)
}

/// Where the leftovers of the permutation live, for the cleanup of one
/// thread's buckets.
pub(crate) struct Leftovers<'a, T> {
    /// Exact bucket starts, `k + 1` entries.
    pub exact: &'a [usize],
    /// Element position one past the last block written into each bucket
    /// region, excluding a block diverted to the overflow block.
    pub written: &'a [usize],
    pub block: usize,
    /// Partially filled buffers of every thread of the group.
    pub buffers: &'a [&'a BufferBlockSet<T>],
    pub overflow: Option<(usize, &'a Block<T>)>,
    /// Elements `[from, from + len)` of a bucket saved before other threads
    /// started writing: `(bucket, from, block)`.
    pub saved: Option<(usize, usize, &'a Block<T>)>,
}

/// Copies whatever blocks of buckets `[lo, hi)` put beyond the start of bucket
/// `hi` into `save`, since the owner of bucket `hi` may overwrite it. Returns
/// `(bucket, from)` when something was saved.
///
/// A written region never extends past the next delimiter, so at most one
/// bucket is affected and the saved part is shorter than a block.
///
/// # Safety
/// Must run after the permutation finished and before any thread's cleanup.
pub(crate) unsafe fn save_margin<T: Copy>(
    arr: RawSlice<T>,
    exact: &[usize],
    written: &[usize],
    block: usize,
    lo: usize,
    hi: usize,
    save: &mut Block<T>,
) -> Option<(usize, usize)> {
    if lo >= hi {
        return None;
    }
    let p = exact[hi];
    let j = (lo..hi)
        .rev()
        .find(|&j| written[j] > p && written[j] > align_up(exact[j], block))?;
    unsafe { save.read_from(arr.ptr_at(p), written[j] - p) };
    Some((j, p))
}

/// Sequential writer into the empty slots of one bucket: the head
/// `[begin, head_end)` first, then the tail `[tail_begin, end)`.
struct Filler {
    pos: usize,
    head_end: usize,
    tail_begin: usize,
    end: usize,
}

impl Filler {
    unsafe fn put<T: Copy>(&mut self, arr: RawSlice<T>, mut src: *const T, mut count: usize) {
        while count > 0 {
            if self.pos == self.head_end {
                self.pos = self.tail_begin;
            }
            let limit = if self.pos < self.head_end {
                self.head_end
            } else {
                self.end
            };
            let c = count.min(limit - self.pos);
            assert!(c > 0, "cleanup: more leftovers than empty slots");
            unsafe {
                core::ptr::copy_nonoverlapping(src, arr.ptr_at(self.pos), c);
                src = src.add(c);
            }
            self.pos += c;
            count -= c;
        }
    }

    fn done(&self) -> bool {
        self.pos == self.end || (self.pos == self.head_end && self.tail_begin == self.end)
    }
}

/// Moves every leftover element of buckets `[lo, hi)` into its bucket.
/// `filled` is called for each bucket right after it is complete.
///
/// # Safety
/// Buckets `[lo, hi)` belong to the caller; margins reaching into other
/// threads' buckets were saved before anyone started cleaning up.
pub(crate) unsafe fn cleanup<T: Copy>(
    arr: RawSlice<T>,
    lo: usize,
    hi: usize,
    left: &Leftovers<'_, T>,
    mut filled: impl FnMut(usize, usize, usize),
) {
    let block = left.block;
    for i in lo..hi {
        let (s0, s1) = (left.exact[i], left.exact[i + 1]);
        let aligned = align_up(s0, block);
        let w = left.written[i].max(aligned);
        let mut fill = Filler {
            pos: s0,
            head_end: aligned.min(s1),
            tail_begin: w.min(s1).max(aligned.min(s1)),
            end: s1,
        };

        // blocks that ran past the end of the bucket
        if w > s1 && w > aligned {
            let excess_end = match left.saved {
                Some((b, from, _)) if b == i => from,
                _ => w,
            };
            unsafe { fill.put(arr, arr.ptr_at(s1), excess_end - s1) };
        }
        if let Some((b, _, saved)) = left.saved {
            if b == i {
                unsafe { fill.put(arr, saved.as_slice().as_ptr(), saved.len()) };
            }
        }
        if let Some((b, ov)) = left.overflow {
            if b == i {
                unsafe { fill.put(arr, ov.as_slice().as_ptr(), ov.len()) };
            }
        }
        for buf in left.buffers {
            let c = buf.len(i);
            if c > 0 {
                unsafe { fill.put(arr, buf.contents_ptr(i), c) };
            }
        }
        debug_assert!(fill.done(), "cleanup left holes in bucket {i}");
        filled(i, s0, s1);
    }
}
