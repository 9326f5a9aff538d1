//! Element classification: sampling, splitter selection, the branchless
//! decision tree and the radix digit extractor.

mod radix;
mod sample;
mod tree;

pub use radix::{radix_bucket, significant_prefix, RadixClassifier};
pub use sample::{draw_sample, select_splitters, SplitterSelection};
pub use tree::{build_tree, DecisionTree, TreeClassifier};

use crate::config::MAX_UNROLL;

/// A bucket assignment rule used by the partitioning engine.
pub trait Classifier<T>: Sync {
    /// Number of bucket indices this classifier can produce (some may be
    /// unreachable).
    fn num_buckets(&self) -> usize;

    fn classify(&self, e: &T) -> usize;

    /// Whether everything in `bucket` is already in final order relative to
    /// itself, so the bucket needs no recursion.
    fn is_terminal(&self, bucket: usize) -> bool;

    /// Classifies `elems` into `out` (same length). Implementations may
    /// interleave the work of several elements.
    fn classify_into(&self, elems: &[T], unroll: usize, out: &mut [usize]) {
        let _ = unroll;
        for (e, o) in elems.iter().zip(out.iter_mut()) {
            *o = self.classify(e);
        }
    }
}

/// Classifies `elems` in batches of `unroll` and reports `(element, bucket)`
/// pairs in input order.
pub fn classify_batch<T, C, S>(classifier: &C, elems: &[T], unroll: usize, mut sink: S)
where
    C: Classifier<T> + ?Sized,
    S: FnMut(&T, usize),
{
    let unroll = unroll.clamp(1, MAX_UNROLL);
    let mut out = [0usize; MAX_UNROLL];
    let full = elems.len() / unroll * unroll;
    for chunk in elems[..full].chunks_exact(unroll) {
        classifier.classify_into(chunk, unroll, &mut out[..unroll]);
        for (e, &b) in chunk.iter().zip(&out[..unroll]) {
            sink(e, b);
        }
    }
    for e in &elems[full..] {
        sink(e, classifier.classify(e));
    }
}
