use alloc::vec::Vec;

use super::{Classifier, SplitterSelection};
use crate::config::MAX_UNROLL;
use crate::element::ElementModel;

/// Branchless search tree over `s` splitters, `s + 1` a power of two.
///
/// `tree[1..=s]` holds the splitters in breadth-first order (`tree[0]` is an
/// unused dummy); the children of `tree[i]` are `tree[2i]` and `tree[2i+1]`.
/// `splitters[0..=s]` is the sorted array with the last splitter duplicated,
/// so the equality test never needs a bounds case.
#[derive(Debug, Clone)]
pub struct DecisionTree<T> {
    tree: Vec<T>,
    splitters: Vec<T>,
    log_buckets: u32,
    equality_buckets: bool,
}

impl<T: Copy> DecisionTree<T> {
    /// Breadth-first splitter array, index 0 is the dummy.
    pub fn tree(&self) -> &[T] {
        &self.tree
    }

    /// Sorted splitters, `s + 1` entries with the last one duplicated.
    pub fn splitters(&self) -> &[T] {
        &self.splitters
    }

    /// `log₂(s + 1)`: the number of comparisons per element on the way down.
    pub fn log_buckets(&self) -> u32 {
        self.log_buckets
    }

    pub fn equality_buckets(&self) -> bool {
        self.equality_buckets
    }

    /// Number of leaves, `s + 1`.
    pub fn num_leaves(&self) -> usize {
        1 << self.log_buckets
    }

    /// Bucket indices produced by [`classify`](Self::classify): `s + 1`
    /// without equality buckets, `2(s + 1)` with them (of which `2s + 1` are
    /// reachable).
    pub fn num_buckets(&self) -> usize {
        if self.equality_buckets {
            2 * self.num_leaves()
        } else {
            self.num_leaves()
        }
    }

    /// Equality buckets hold only elements equal to a splitter.
    pub fn is_equality_bucket(&self, bucket: usize) -> bool {
        self.equality_buckets && bucket % 2 == 1 && bucket + 1 != self.num_buckets()
    }

    #[inline(always)]
    fn leaf<M: ElementModel<T>>(&self, e: &T, model: &M) -> usize {
        let mut i = 1usize;
        for _ in 0..self.log_buckets {
            // SAFETY: i < 2^level ≤ s for every level below the leaves.
            let node = unsafe { self.tree.get_unchecked(i) };
            i = 2 * i + model.less(node, e) as usize;
        }
        i - self.num_leaves()
    }

    /// Bucket of `e`. Leaf `i` satisfies `s[i−1] < e ≤ s[i]`; with equality
    /// buckets the result is `2i + 1 − [e < s[i]]`.
    #[inline(always)]
    pub fn classify<M: ElementModel<T>>(&self, e: &T, model: &M) -> usize {
        let leaf = self.leaf(e, model);
        if self.equality_buckets {
            // SAFETY: leaf ≤ s and splitters has s + 1 entries.
            let s = unsafe { self.splitters.get_unchecked(leaf) };
            2 * leaf + 1 - model.less(e, s) as usize
        } else {
            leaf
        }
    }

    /// Classifies a batch level by level: every element takes one step down
    /// the tree before any takes the next.
    pub fn classify_unrolled<M: ElementModel<T>>(&self, elems: &[T], model: &M, out: &mut [usize]) {
        debug_assert!(elems.len() <= MAX_UNROLL && out.len() >= elems.len());
        match elems.len() {
            16 => self.classify_fixed::<16, M>(elems, model, out),
            8 => self.classify_fixed::<8, M>(elems, model, out),
            4 => self.classify_fixed::<4, M>(elems, model, out),
            _ => {
                for (e, o) in elems.iter().zip(out.iter_mut()) {
                    *o = self.classify(e, model);
                }
            }
        }
    }

    #[inline(always)]
    fn classify_fixed<const U: usize, M: ElementModel<T>>(&self, elems: &[T], model: &M, out: &mut [usize]) {
        let elems: &[T; U] = elems.try_into().expect("batch width");
        let out: &mut [usize] = &mut out[..U];
        let mut pos = [1usize; U];
        for _ in 0..self.log_buckets {
            for j in 0..U {
                // SAFETY: pos[j] < s + 1 before the last level.
                let node = unsafe { self.tree.get_unchecked(pos[j]) };
                pos[j] = 2 * pos[j] + model.less(node, &elems[j]) as usize;
            }
        }
        let leaves = self.num_leaves();
        if self.equality_buckets {
            for j in 0..U {
                let leaf = pos[j] - leaves;
                // SAFETY: leaf ≤ s.
                let s = unsafe { self.splitters.get_unchecked(leaf) };
                out[j] = 2 * leaf + 1 - model.less(&elems[j], s) as usize;
            }
        } else {
            for j in 0..U {
                out[j] = pos[j] - leaves;
            }
        }
    }
}

/// Lays out the selected splitters as a breadth-first search tree.
///
/// The splitter count is padded to the next `2^l − 1` with the largest
/// splitter. Panics on an empty selection.
pub fn build_tree<T: Copy>(sel: &SplitterSelection<T>) -> DecisionTree<T> {
    assert!(!sel.splitters.is_empty(), "decision tree needs at least one splitter");
    let leaves = (sel.splitters.len() + 1).next_power_of_two();
    let s = leaves - 1;
    let last = *sel.splitters.last().unwrap();
    let mut splitters = Vec::with_capacity(leaves);
    splitters.extend_from_slice(&sel.splitters);
    splitters.resize(leaves, last);

    let mut tree = Vec::with_capacity(leaves);
    tree.resize(leaves, splitters[0]);
    fill(&mut tree, &splitters[..s], 1);

    DecisionTree {
        tree,
        splitters,
        log_buckets: leaves.trailing_zeros(),
        equality_buckets: sel.use_equality,
    }
}

fn fill<T: Copy>(tree: &mut [T], sorted: &[T], node: usize) {
    if sorted.is_empty() {
        return;
    }
    let mid = sorted.len() / 2;
    tree[node] = sorted[mid];
    fill(tree, &sorted[..mid], 2 * node);
    fill(tree, &sorted[mid + 1..], 2 * node + 1);
}

/// A [`DecisionTree`] bound to the ordering it was built with.
pub struct TreeClassifier<'a, T, M> {
    pub tree: &'a DecisionTree<T>,
    pub model: &'a M,
}

impl<T: Copy + Sync, M: ElementModel<T>> Classifier<T> for TreeClassifier<'_, T, M> {
    fn num_buckets(&self) -> usize {
        self.tree.num_buckets()
    }

    #[inline(always)]
    fn classify(&self, e: &T) -> usize {
        self.tree.classify(e, self.model)
    }

    fn is_terminal(&self, bucket: usize) -> bool {
        self.tree.is_equality_bucket(bucket)
    }

    #[inline]
    fn classify_into(&self, elems: &[T], unroll: usize, out: &mut [usize]) {
        let u = unroll.clamp(1, MAX_UNROLL);
        for (chunk, o) in elems.chunks(u).zip(out.chunks_mut(u)) {
            self.tree.classify_unrolled(chunk, self.model, o);
        }
    }
}
