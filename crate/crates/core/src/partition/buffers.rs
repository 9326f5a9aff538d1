use alloc::vec::Vec;
use core::mem::MaybeUninit;
use core::ptr;

/// One block of scratch storage.
pub(crate) struct Block<T> {
    data: Vec<MaybeUninit<T>>,
    len: usize,
}

impl<T: Copy> Block<T> {
    pub fn new(block: usize) -> Self {
        let mut data = Vec::with_capacity(block);
        data.resize(block, MaybeUninit::uninit());
        Block { data, len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// # Safety
    /// `src` valid for `count ≤ capacity` reads.
    pub unsafe fn read_from(&mut self, src: *const T, count: usize) {
        debug_assert!(count <= self.data.len());
        unsafe { ptr::copy_nonoverlapping(src, self.data.as_mut_ptr() as *mut T, count) };
        self.len = count;
    }

    /// # Safety
    /// `dst` valid for `len` writes.
    pub unsafe fn write_to(&self, dst: *mut T) {
        unsafe { ptr::copy_nonoverlapping(self.data.as_ptr() as *const T, dst, self.len) };
    }

    pub fn as_slice(&self) -> &[T] {
        // SAFETY: the first `len` entries were initialized by `read_from`.
        unsafe { core::slice::from_raw_parts(self.data.as_ptr() as *const T, self.len) }
    }

    pub fn first(&self) -> &T {
        &self.as_slice()[0]
    }
}

/// Per-thread staging area: one buffer block per bucket.
///
/// Each buffer holds at most `block` elements, all of the same bucket. A
/// full buffer is only written back when another element arrives for it,
/// so buffers may be full when classification ends.
pub struct BufferBlockSet<T> {
    data: Vec<MaybeUninit<T>>,
    fill: Vec<usize>,
    block: usize,
}

impl<T: Copy> BufferBlockSet<T> {
    pub fn new(buckets: usize, block: usize) -> Self {
        let mut data = Vec::with_capacity(buckets * block);
        data.resize(buckets * block, MaybeUninit::uninit());
        BufferBlockSet {
            data,
            fill: alloc::vec![0; buckets],
            block,
        }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn buckets(&self) -> usize {
        self.fill.len()
    }

    /// Empties all buffers and makes room for `buckets` of them.
    pub fn reset(&mut self, buckets: usize) {
        if buckets > self.fill.len() {
            self.data.resize(buckets * self.block, MaybeUninit::uninit());
            self.fill.resize(buckets, 0);
        }
        self.fill.iter_mut().for_each(|f| *f = 0);
    }

    #[inline(always)]
    pub fn len(&self, bucket: usize) -> usize {
        self.fill[bucket]
    }

    #[inline(always)]
    pub fn is_full(&self, bucket: usize) -> bool {
        self.fill[bucket] == self.block
    }

    #[inline(always)]
    pub fn push(&mut self, bucket: usize, e: T) {
        let f = self.fill[bucket];
        assert!(f < self.block);
        let slot = bucket * self.block + f;
        debug_assert!(slot < self.data.len());
        // SAFETY: `bucket < fill.len()` was checked above and the data holds
        // `block` slots per bucket.
        unsafe { *self.data.get_unchecked_mut(slot) = MaybeUninit::new(e) };
        self.fill[bucket] = f + 1;
    }

    /// Writes the (full) buffer of `bucket` to `dst` and empties it.
    ///
    /// # Safety
    /// `dst` valid for `block` writes and not overlapping the buffer.
    #[inline(always)]
    pub unsafe fn flush(&mut self, bucket: usize, dst: *mut T) {
        let src = self.data[bucket * self.block..].as_ptr() as *const T;
        unsafe { ptr::copy_nonoverlapping(src, dst, self.fill[bucket]) };
        self.fill[bucket] = 0;
    }

    pub fn contents(&self, bucket: usize) -> &[T] {
        let start = bucket * self.block;
        // SAFETY: the first `fill` entries of the buffer were pushed.
        unsafe {
            core::slice::from_raw_parts(self.data[start..].as_ptr() as *const T, self.fill[bucket])
        }
    }

    pub(crate) fn contents_ptr(&self, bucket: usize) -> *const T {
        self.data[bucket * self.block..].as_ptr() as *const T
    }

    /// Element slots held by this set.
    pub fn capacity(&self) -> usize {
        self.data.len()
    }
}
