//! Out-of-place super scalar samplesort, the non-in-place comparator.
//!
//! Each step classifies every element once, remembering its bucket in an
//! oracle byte array, then distributes into a second array of the same size.
//! The two arrays swap roles on every level.

use ips4o::classifier::{build_tree, select_splitters, Classifier, DecisionTree, TreeClassifier};
use ips4o::{base_case_sort, effective_bucket_count, is_base_case, ElementModel, SortConfig};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

/// Bucket indices must fit into one oracle byte, and equality buckets double
/// the count.
pub const MAX_LEAVES: usize = 128;

/// Distributes `input` into `out` by `tree`. Returns the size of every
/// bucket index of the tree, in order.
pub fn partition_out_of_place<T, M>(
    input: &[T],
    tree: &DecisionTree<T>,
    model: &M,
    out: &mut [T],
    oracle: &mut [u8],
    unroll: usize,
) -> Vec<usize>
where
    T: Copy + Sync,
    M: ElementModel<T>,
{
    let n = input.len();
    assert!(out.len() >= n && oracle.len() >= n, "scratch too small");
    assert!(tree.num_buckets() <= 256, "bucket indices must fit a byte");
    let cls = TreeClassifier { tree, model };
    let mut sizes = vec![0usize; tree.num_buckets()];
    let mut ids = [0usize; 16];
    let u = unroll.clamp(1, 16);
    for (chunk, o) in input.chunks(u).zip(oracle.chunks_mut(u)) {
        cls.classify_into(chunk, u, &mut ids[..chunk.len()]);
        for (slot, &b) in o.iter_mut().zip(&ids[..chunk.len()]) {
            *slot = b as u8;
            sizes[b] += 1;
        }
    }
    let mut pos = Vec::with_capacity(sizes.len());
    let mut sum = 0;
    for &s in &sizes {
        pos.push(sum);
        sum += s;
    }
    for (e, &b) in input.iter().zip(oracle.iter()) {
        let p = &mut pos[b as usize];
        out[*p] = *e;
        *p += 1;
    }
    sizes
}

/// Sorts `data` with the out-of-place samplesort. Allocates `n` elements and
/// `n` bytes of scratch.
pub fn s4o_sort<T, M>(data: &mut [T], model: &M, cfg: &SortConfig)
where
    T: Copy + Sync,
    M: ElementModel<T>,
{
    let cfg = SortConfig {
        k_max: cfg.k_max.min(MAX_LEAVES),
        ..cfg.clone()
    };
    let mut scratch = data.to_vec();
    let mut oracle = vec![0u8; data.len()];
    let mut rng = SmallRng::seed_from_u64(cfg.seed);
    sort_rec(data, &mut scratch, &mut oracle, usize::MAX, true, model, &cfg, &mut rng);
}

/// Sorts the elements in `a`, leaving the result in `a` when `want_in_a`,
/// otherwise in `b`.
#[allow(clippy::too_many_arguments)]
fn sort_rec<T, M>(
    a: &mut [T],
    b: &mut [T],
    oracle: &mut [u8],
    parent_len: usize,
    want_in_a: bool,
    model: &M,
    cfg: &SortConfig,
    rng: &mut SmallRng,
) where
    T: Copy + Sync,
    M: ElementModel<T>,
{
    let n = a.len();
    let less = |x: &T, y: &T| model.less(x, y);
    if is_base_case(n, parent_len, cfg) {
        base_case_sort(a, less);
        if !want_in_a {
            b.copy_from_slice(a);
        }
        return;
    }
    let k = effective_bucket_count(n, cfg).expect("base cases are handled above");
    let count = cfg.sample_count(n, k);
    let mut sample: Vec<T> = (0..count).map(|_| a[rng.gen_range(0..n)]).collect();
    sample.sort_unstable_by(|x, y| {
        if less(x, y) {
            std::cmp::Ordering::Less
        } else if less(y, x) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let mut sel = select_splitters(&sample, k, model).expect("sample is never empty");
    sel.use_equality |= sel.splitters.len() == 1;
    let tree = build_tree(&sel);
    let sizes = partition_out_of_place(a, &tree, model, b, oracle, cfg.unroll);
    let mut begin = 0;
    for (bucket, &size) in sizes.iter().enumerate() {
        let end = begin + size;
        if tree.is_equality_bucket(bucket) || size <= 1 {
            if want_in_a {
                a[begin..end].copy_from_slice(&b[begin..end]);
            }
        } else {
            sort_rec(
                &mut b[begin..end],
                &mut a[begin..end],
                &mut oracle[begin..end],
                n,
                !want_in_a,
                model,
                cfg,
                rng,
            );
        }
        begin = end;
    }
}
