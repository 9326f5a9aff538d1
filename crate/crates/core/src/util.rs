use core::ops::{Deref, DerefMut};
use core::ptr;

/// Keeps a shared value on its own cache line pair.
#[repr(align(128))]
#[derive(Default, Debug)]
pub(crate) struct CachePadded<T>(pub T);

impl<T> Deref for CachePadded<T> {
    type Target = T;
    fn deref(&self) -> &T {
        &self.0
    }
}

impl<T> DerefMut for CachePadded<T> {
    fn deref_mut(&mut self) -> &mut T {
        &mut self.0
    }
}

/// Backoff while waiting on another thread.
#[inline]
pub(crate) fn relax() {
    #[cfg(feature = "std")]
    std::thread::yield_now();
    #[cfg(not(feature = "std"))]
    core::hint::spin_loop();
}

/// Unchecked view of a task range shared by the threads of a group.
///
/// Threads only touch disjoint parts of the range between synchronization
/// points; every accessor is `unsafe` and relies on that.
pub(crate) struct RawSlice<T> {
    ptr: *mut T,
    len: usize,
}

impl<T> Clone for RawSlice<T> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<T> Copy for RawSlice<T> {}

unsafe impl<T: Send> Send for RawSlice<T> {}
unsafe impl<T: Send> Sync for RawSlice<T> {}

impl<T: Copy> RawSlice<T> {
    pub fn new(slice: &mut [T]) -> Self {
        RawSlice {
            ptr: slice.as_mut_ptr(),
            len: slice.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Sub-range `[from, to)`.
    pub fn sub(&self, from: usize, to: usize) -> Self {
        debug_assert!(from <= to && to <= self.len);
        RawSlice {
            // SAFETY: in bounds per the assertion above.
            ptr: unsafe { self.ptr.add(from) },
            len: to - from,
        }
    }

    #[inline(always)]
    pub fn ptr_at(&self, i: usize) -> *mut T {
        debug_assert!(i <= self.len);
        // SAFETY: i ≤ len.
        unsafe { self.ptr.add(i) }
    }

    /// # Safety
    /// `i < len`, and no other thread writes element `i` concurrently.
    #[inline(always)]
    pub unsafe fn get(&self, i: usize) -> T {
        debug_assert!(i < self.len);
        unsafe { ptr::read(self.ptr.add(i)) }
    }

    /// # Safety
    /// `[from, to)` in bounds and not written by anyone while the slice lives.
    #[inline(always)]
    pub unsafe fn slice<'a>(&self, from: usize, to: usize) -> &'a [T] {
        debug_assert!(from <= to && to <= self.len);
        unsafe { core::slice::from_raw_parts(self.ptr.add(from), to - from) }
    }

    /// # Safety
    /// The whole range is exclusively owned by the caller while the slice lives.
    pub unsafe fn as_mut_slice<'a>(&self) -> &'a mut [T] {
        unsafe { core::slice::from_raw_parts_mut(self.ptr, self.len) }
    }

    /// # Safety
    /// Both ranges in bounds, disjoint, and exclusively owned by the caller.
    #[inline(always)]
    pub unsafe fn copy_within(&self, from: usize, to: usize, count: usize) {
        debug_assert!(from + count <= self.len && to + count <= self.len);
        unsafe { ptr::copy_nonoverlapping(self.ptr.add(from), self.ptr.add(to), count) }
    }
}

/// SplitMix64 finalizer, used to derive per-task seeds.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn task_seed(seed: u64, begin: usize, end: usize) -> u64 {
    mix64(seed ^ mix64((begin as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ end as u64))
}
