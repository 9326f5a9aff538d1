/// Snapshot of the permutation state handed to a [`PermuteObserver`].
pub struct PermuteView<'a, T> {
    /// The whole task range.
    pub array: &'a [T],
    pub block: usize,
    /// Block-aligned bucket starts in elements, one entry per bucket plus the end.
    pub delimiters: &'a [usize],
    /// `(w, r)` of every bucket, in blocks.
    pub pairs: &'a [(i64, i64)],
    /// The block currently held in a swap buffer by the observing thread.
    pub held: Option<&'a [T]>,
    /// The overflow block and the bucket it belongs to, once written.
    pub overflow: Option<(usize, &'a [T])>,
}

/// Hook into the block permutation, for tests and debugging.
pub trait PermuteObserver<T> {
    /// When false, no snapshot is ever built.
    const ENABLED: bool;

    /// Called after every state change of the observing thread.
    fn step(&mut self, _view: &PermuteView<'_, T>) {}

    /// Called before every pointer update; may yield to shake out
    /// interleavings.
    fn pause(&mut self) {}
}

/// Observer that does nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl<T> PermuteObserver<T> for NoObserver {
    const ENABLED: bool = false;
}
