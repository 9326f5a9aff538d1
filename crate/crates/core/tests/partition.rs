use std::collections::HashMap;

use ips4o::classifier::Classifier;
use ips4o::partition::{
    compute_boundaries, partition_step, partition_with, partition_with_threads, NoObserver,
    PermuteObserver, PermuteView, StepMode,
};
use ips4o::{ByKey, ByLess, SortConfig};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

struct Mod(usize);

impl Classifier<u64> for Mod {
    fn num_buckets(&self) -> usize {
        self.0
    }
    fn classify(&self, e: &u64) -> usize {
        (*e as usize) % self.0
    }
    fn is_terminal(&self, _: usize) -> bool {
        false
    }
}

fn multiset(v: &[u64]) -> HashMap<u64, usize> {
    let mut m = HashMap::new();
    for &x in v {
        *m.entry(x).or_default() += 1;
    }
    m
}

#[test]
fn boundary_examples() {
    let b = compute_boundaries(&[[5usize, 3, 8]], 4);
    assert_eq!(b.exact, [0, 5, 8, 16]);
    assert_eq!(b.delimiters, [0, 8, 8, 16]);
    let b = compute_boundaries(&[[4usize, 4]], 4);
    assert_eq!(b.delimiters, b.exact);
    assert_eq!(b.delimiters, [0, 4, 8]);
    let b = compute_boundaries(&[[0usize, 0, 7]], 4);
    assert_eq!(b.delimiters, [0, 0, 0, 8]);
    // rows of several threads are summed per bucket
    let b = compute_boundaries(&[vec![1usize, 2], vec![3, 4]], 2);
    assert_eq!(b.exact, [0, 4, 10]);
}

#[test]
fn samplesort_step_orders_buckets() {
    let mut rng = SmallRng::seed_from_u64(1);
    let v: Vec<u64> = (0..100_000).map(|_| rng.gen()).collect();
    let mut a = v.clone();
    let model = ByLess(|x: &u64, y: &u64| x < y);
    let out = partition_step(&mut a, &model, &SortConfig::default(), StepMode::Samplesort).unwrap();
    assert_eq!(multiset(&a), multiset(&v));
    assert_eq!(out.buckets.first().unwrap().begin, 0);
    assert_eq!(out.buckets.last().unwrap().end, a.len());
    for w in out.buckets.windows(2) {
        assert_eq!(w[0].end, w[1].begin);
        let (l, r) = (&a[w[0].begin..w[0].end], &a[w[1].begin..w[1].end]);
        if let (Some(max), Some(min)) = (l.iter().max(), r.iter().min()) {
            assert!(max <= min, "bucket order violated");
        }
    }
    assert!(out.buckets.iter().filter(|b| !b.is_empty()).count() > 100);
}

#[test]
fn equality_buckets_hold_one_value() {
    let mut rng = SmallRng::seed_from_u64(9);
    let v: Vec<u64> = (0..50_000).map(|_| if rng.gen_bool(0.5) { 7 } else { rng.gen_range(0..1000) }).collect();
    let mut a = v.clone();
    let model = ByLess(|x: &u64, y: &u64| x < y);
    let out = partition_step(&mut a, &model, &SortConfig::default(), StepMode::Samplesort).unwrap();
    let terminal: Vec<_> = out.buckets.iter().filter(|b| b.terminal && !b.is_empty()).collect();
    assert!(!terminal.is_empty());
    for b in terminal {
        let s = &a[b.begin..b.end];
        assert!(s.iter().all(|x| *x == s[0]));
    }
    assert_eq!(multiset(&a), multiset(&v));
}

#[test]
fn all_equal_step_is_single_terminal_bucket() {
    let mut a = vec![42u64; 10_000];
    let model = ByLess(|x: &u64, y: &u64| x < y);
    let out = partition_step(&mut a, &model, &SortConfig::default(), StepMode::Samplesort).unwrap();
    assert_eq!(out.buckets.len(), 1);
    assert!(out.buckets[0].terminal);
    assert_eq!((out.buckets[0].begin, out.buckets[0].end), (0, 10_000));
}

#[test]
fn radix_step_splits_by_digit() {
    let mut rng = SmallRng::seed_from_u64(4);
    let v: Vec<u64> = (0..20_000).map(|_| rng.gen_range(0..1 << 16)).collect();
    let mut a = v.clone();
    let model = ByKey(|x: &u64| *x);
    let out = partition_step(&mut a, &model, &SortConfig::default(), StepMode::Radix { shift: 8, bits: 8 }).unwrap();
    assert_eq!(out.buckets.len(), 256);
    for (i, b) in out.buckets.iter().enumerate() {
        assert!(a[b.begin..b.end].iter().all(|x| (x >> 8) as usize == i));
    }
    assert_eq!(multiset(&a), multiset(&v));
}

#[test]
fn step_rejects_tiny_tasks() {
    let mut a = vec![1u64; 32];
    let model = ByLess(|x: &u64, y: &u64| x < y);
    assert!(partition_step(&mut a, &model, &SortConfig::default(), StepMode::Samplesort).is_err());
}

fn check_partition(v: &[u64], a: &[u64], k: usize, buckets: &[ips4o::partition::BucketRange]) {
    assert_eq!(buckets.len(), k);
    for (i, b) in buckets.iter().enumerate() {
        assert!(a[b.begin..b.end].iter().all(|e| (*e as usize) % k == i), "bucket {i} holds foreign elements");
    }
    assert_eq!(multiset(a), multiset(v));
}

#[test]
fn sequential_partition_against_oracle() {
    let mut rng = SmallRng::seed_from_u64(3);
    for _ in 0..3000 {
        let n = rng.gen_range(0..200);
        let k = rng.gen_range(1..9);
        let b = rng.gen_range(1..9);
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..100)).collect();
        let mut a = v.clone();
        let out = partition_with(&mut a, &Mod(k), b, rng.gen_range(1..9), &mut NoObserver);
        check_partition(&v, &a, k, &out.buckets);
        // the partition is unique up to order inside buckets
        let mut oracle: Vec<Vec<u64>> = vec![vec![]; k];
        for &x in &v {
            oracle[x as usize % k].push(x);
        }
        for (bucket, want) in out.buckets.iter().zip(oracle) {
            assert_eq!(bucket.len(), want.len());
        }
    }
}

/// Checks the block layout of every bucket at every observation point:
/// blocks left of `w` belong to the bucket, and the blocks that hold data
/// (placed, unprocessed, the swap buffer and the overflow block) always
/// carry the same multiset.
struct Invariant<'c> {
    cls: &'c Mod,
    content: Option<HashMap<u64, usize>>,
    steps: usize,
}

impl PermuteObserver<u64> for Invariant<'_> {
    const ENABLED: bool = true;

    fn step(&mut self, view: &PermuteView<'_, u64>) {
        self.steps += 1;
        let b = view.block;
        let n = view.array.len();
        let mut held = HashMap::new();
        let mut add = |s: &[u64]| {
            for &x in s {
                *held.entry(x).or_insert(0usize) += 1;
            }
        };
        for (i, &(w, r)) in view.pairs.iter().enumerate() {
            let d0 = view.delimiters[i] / b;
            let d1 = view.delimiters[i + 1] / b;
            assert!(w as usize >= d0, "w before bucket start");
            // a reader that found the bucket drained leaves r one further left
            assert!(r + 2 >= d0 as i64 && r + 1 <= d1 as i64, "r outside bucket");
            let placed_end = (w as usize).min(d1);
            for blk in d0..placed_end {
                if (blk + 1) * b > n {
                    continue;
                }
                let s = &view.array[blk * b..(blk + 1) * b];
                assert!(s.iter().all(|e| self.cls.classify(e) == i), "misplaced block left of w");
                add(s);
            }
            if r >= w {
                for blk in w as usize..=r as usize {
                    if (blk + 1) * b <= n {
                        add(&view.array[blk * b..(blk + 1) * b]);
                    }
                }
            }
        }
        if let Some(s) = view.held {
            add(s);
        }
        if let Some((_, s)) = view.overflow {
            add(s);
        }
        match &self.content {
            None => self.content = Some(held),
            Some(c) => assert_eq!(c, &held, "blocks lost or duplicated"),
        }
    }
}

#[test]
fn permutation_replay_keeps_invariant() {
    let mut rng = SmallRng::seed_from_u64(17);
    let mut observed = 0;
    for _ in 0..200 {
        let k = rng.gen_range(2..9);
        let b = rng.gen_range(1..6);
        let n = rng.gen_range(b * 4..400);
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1000)).collect();
        let mut a = v.clone();
        let cls = Mod(k);
        let mut obs = Invariant { cls: &cls, content: None, steps: 0 };
        let out = partition_with(&mut a, &cls, b, 4, &mut obs);
        check_partition(&v, &a, k, &out.buckets);
        observed += obs.steps;
    }
    assert!(observed > 1000);
}

struct Shaker(SmallRng);

impl PermuteObserver<u64> for Shaker {
    const ENABLED: bool = false;

    fn pause(&mut self) {
        if self.0.gen_ratio(1, 3) {
            std::thread::yield_now();
        }
    }
}

#[test]
fn threaded_partition_with_random_yields() {
    let mut rng = SmallRng::seed_from_u64(5);
    for run in 0..100 {
        let n = rng.gen_range(0..3000);
        let k = rng.gen_range(1..12);
        let b = rng.gen_range(1..9);
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1000)).collect();
        let mut a = v.clone();
        let out = partition_with_threads(&mut a, &Mod(k), b, 4, 8, |me| {
            Shaker(SmallRng::seed_from_u64(run * 31 + me as u64))
        });
        check_partition(&v, &a, k, &out.buckets);
    }
}

#[test]
fn threaded_partition_small_cases() {
    let mut rng = SmallRng::seed_from_u64(6);
    for _ in 0..3000 {
        let n = rng.gen_range(0..300);
        let k = rng.gen_range(1..9);
        let b = rng.gen_range(1..7);
        let t = rng.gen_range(1..6);
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..100)).collect();
        let mut a = v.clone();
        let out = partition_with_threads(&mut a, &Mod(k), b, 3, t, |_| NoObserver);
        check_partition(&v, &a, k, &out.buckets);
    }
}
