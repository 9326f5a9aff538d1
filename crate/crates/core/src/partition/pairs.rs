//! Per-bucket write/read block pointers.
//!
//! Both pointers of a bucket are always read and modified together, so every
//! thread sees a consistent `(w, r)` pair. Blocks `[d_i, w)` of a bucket are
//! placed, `[w, r]` are unprocessed and everything from `max(w, r + 1)` to the
//! next delimiter is empty.

use alloc::vec::Vec;
use core::cell::{Cell, UnsafeCell};
use core::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use portable_atomic::AtomicU128;

use crate::util::{relax, CachePadded};

/// Storage for the `(w, r)` pairs of all buckets of one partitioning step.
/// Indices are block numbers relative to the task start.
pub trait BucketIndexPairs {
    /// Whether several threads may operate on the pairs at once.
    const CONCURRENT: bool;

    fn len(&self) -> usize;
    fn set(&self, bucket: usize, write: i64, read: i64);
    fn load(&self, bucket: usize) -> (i64, i64);
    /// Advances `w` and returns the pair as it was before.
    fn inc_write(&self, bucket: usize) -> (i64, i64);
    /// Registers a reader, retreats `r` and returns the pair as it was
    /// before. Must be followed by [`stop_read`](Self::stop_read).
    fn dec_read(&self, bucket: usize) -> (i64, i64);
    fn stop_read(&self, bucket: usize);
    /// Blocks until no thread is between `dec_read` and `stop_read`.
    fn wait_for_readers(&self, bucket: usize);
}

#[inline]
pub fn pack(write: i64, read: i64) -> u128 {
    ((write as u64 as u128) << 64) | read as u64 as u128
}

#[inline]
pub fn unpack(v: u128) -> (i64, i64) {
    ((v >> 64) as u64 as i64, v as u64 as i64)
}

/// Single-threaded pairs with plain loads and stores.
pub struct PlainPairs {
    cells: Vec<Cell<(i64, i64)>>,
}

impl PlainPairs {
    pub fn new(buckets: usize) -> Self {
        PlainPairs {
            cells: (0..buckets).map(|_| Cell::new((0, -1))).collect(),
        }
    }

    pub fn resize(&mut self, buckets: usize) {
        if self.cells.len() < buckets {
            self.cells.resize_with(buckets, || Cell::new((0, -1)));
        }
    }
}

impl BucketIndexPairs for PlainPairs {
    const CONCURRENT: bool = false;

    fn len(&self) -> usize {
        self.cells.len()
    }
    #[inline]
    fn set(&self, bucket: usize, write: i64, read: i64) {
        self.cells[bucket].set((write, read));
    }
    #[inline]
    fn load(&self, bucket: usize) -> (i64, i64) {
        self.cells[bucket].get()
    }
    #[inline]
    fn inc_write(&self, bucket: usize) -> (i64, i64) {
        let (w, r) = self.cells[bucket].get();
        self.cells[bucket].set((w + 1, r));
        (w, r)
    }
    #[inline]
    fn dec_read(&self, bucket: usize) -> (i64, i64) {
        let (w, r) = self.cells[bucket].get();
        self.cells[bucket].set((w, r - 1));
        (w, r)
    }
    #[inline]
    fn stop_read(&self, _bucket: usize) {}
    #[inline]
    fn wait_for_readers(&self, _bucket: usize) {}
}

#[derive(Default)]
struct AtomicCell {
    pair: AtomicU128,
    readers: AtomicUsize,
}

/// Pairs packed into one 128-bit word, updated with compare-exchange.
pub struct AtomicPairs {
    cells: Vec<CachePadded<AtomicCell>>,
}

impl AtomicPairs {
    /// `None` when the platform has no lock-free 128-bit compare-exchange.
    pub fn new(buckets: usize) -> Option<Self> {
        if !AtomicU128::is_lock_free() {
            return None;
        }
        Some(AtomicPairs {
            cells: (0..buckets).map(|_| CachePadded::default()).collect(),
        })
    }

    #[inline]
    fn update(&self, bucket: usize, f: impl Fn(i64, i64) -> (i64, i64)) -> (i64, i64) {
        let cell = &self.cells[bucket].pair;
        let mut cur = cell.load(Ordering::SeqCst);
        loop {
            let (w, r) = unpack(cur);
            let (nw, nr) = f(w, r);
            match cell.compare_exchange_weak(cur, pack(nw, nr), Ordering::SeqCst, Ordering::SeqCst) {
                Ok(_) => return (w, r),
                Err(actual) => cur = actual,
            }
        }
    }
}

impl BucketIndexPairs for AtomicPairs {
    const CONCURRENT: bool = true;

    fn len(&self) -> usize {
        self.cells.len()
    }
    fn set(&self, bucket: usize, write: i64, read: i64) {
        self.cells[bucket].pair.store(pack(write, read), Ordering::SeqCst);
        self.cells[bucket].readers.store(0, Ordering::SeqCst);
    }
    fn load(&self, bucket: usize) -> (i64, i64) {
        unpack(self.cells[bucket].pair.load(Ordering::SeqCst))
    }
    fn inc_write(&self, bucket: usize) -> (i64, i64) {
        self.update(bucket, |w, r| (w + 1, r))
    }
    fn dec_read(&self, bucket: usize) -> (i64, i64) {
        // The reader count goes up before `r` moves, so a writer that sees the
        // new `r` also sees the reader.
        self.cells[bucket].readers.fetch_add(1, Ordering::SeqCst);
        self.update(bucket, |w, r| (w, r - 1))
    }
    fn stop_read(&self, bucket: usize) {
        self.cells[bucket].readers.fetch_sub(1, Ordering::SeqCst);
    }
    fn wait_for_readers(&self, bucket: usize) {
        while self.cells[bucket].readers.load(Ordering::SeqCst) != 0 {
            relax();
        }
    }
}

#[derive(Default)]
struct LockedCell {
    lock: AtomicBool,
    pair: UnsafeCell<(i64, i64)>,
    readers: AtomicUsize,
}

/// Fallback pairs guarded by a per-bucket lock.
pub struct LockedPairs {
    cells: Vec<CachePadded<LockedCell>>,
}

// SAFETY: `pair` is only accessed while `lock` is held.
unsafe impl Sync for LockedPairs {}

impl LockedPairs {
    pub fn new(buckets: usize) -> Self {
        LockedPairs {
            cells: (0..buckets).map(|_| CachePadded::default()).collect(),
        }
    }

    fn with<R>(&self, bucket: usize, f: impl FnOnce(&mut (i64, i64)) -> R) -> R {
        let cell = &self.cells[bucket];
        while cell
            .lock
            .compare_exchange_weak(false, true, Ordering::Acquire, Ordering::Relaxed)
            .is_err()
        {
            relax();
        }
        // SAFETY: lock held.
        let out = f(unsafe { &mut *cell.pair.get() });
        cell.lock.store(false, Ordering::Release);
        out
    }
}

impl BucketIndexPairs for LockedPairs {
    const CONCURRENT: bool = true;

    fn len(&self) -> usize {
        self.cells.len()
    }
    fn set(&self, bucket: usize, write: i64, read: i64) {
        self.with(bucket, |p| *p = (write, read));
        self.cells[bucket].readers.store(0, Ordering::SeqCst);
    }
    fn load(&self, bucket: usize) -> (i64, i64) {
        self.with(bucket, |p| *p)
    }
    fn inc_write(&self, bucket: usize) -> (i64, i64) {
        self.with(bucket, |p| {
            let old = *p;
            p.0 += 1;
            old
        })
    }
    fn dec_read(&self, bucket: usize) -> (i64, i64) {
        self.cells[bucket].readers.fetch_add(1, Ordering::SeqCst);
        self.with(bucket, |p| {
            let old = *p;
            p.1 -= 1;
            old
        })
    }
    fn stop_read(&self, bucket: usize) {
        self.cells[bucket].readers.fetch_sub(1, Ordering::SeqCst);
    }
    fn wait_for_readers(&self, bucket: usize) {
        while self.cells[bucket].readers.load(Ordering::SeqCst) != 0 {
            relax();
        }
    }
}
