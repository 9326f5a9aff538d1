//! Input distributions. Every generator is a pure function of
//! `(distribution, n, seed, element type)`.

use std::fmt;
use std::str::FromStr;

use rand::rngs::SmallRng;
use rand::seq::index;
use rand::{Rng, SeedableRng};

use crate::types::{mix64, Element, KeyWidth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distribution {
    Uniform,
    Exponential,
    Zipf,
    RootDup,
    TwoDup,
    EightDup,
    AlmostSorted,
    Sorted,
    ReverseSorted,
    Zero,
}

impl Distribution {
    pub const ALL: [Distribution; 10] = [
        Distribution::Uniform,
        Distribution::Exponential,
        Distribution::Zipf,
        Distribution::RootDup,
        Distribution::TwoDup,
        Distribution::EightDup,
        Distribution::AlmostSorted,
        Distribution::Sorted,
        Distribution::ReverseSorted,
        Distribution::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Exponential => "exponential",
            Distribution::Zipf => "zipf",
            Distribution::RootDup => "rootdup",
            Distribution::TwoDup => "twodup",
            Distribution::EightDup => "eightdup",
            Distribution::AlmostSorted => "almostsorted",
            Distribution::Sorted => "sorted",
            Distribution::ReverseSorted => "reversesorted",
            Distribution::Zero => "zero",
        }
    }

    /// Inputs that are left out of averages because they are trivially
    /// detected.
    pub fn is_easy(self) -> bool {
        matches!(self, Distribution::Sorted | Distribution::ReverseSorted | Distribution::Zero)
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown distribution `{s}`"))
    }
}

const ZIPF_MAX: usize = 100;
const ZIPF_EXPONENT: f64 = 0.75;

/// Cumulative Zipf probabilities for `k = 1..=100`.
pub fn zipf_cdf() -> [f64; ZIPF_MAX] {
    let mut cdf = [0.0; ZIPF_MAX];
    let mut acc = 0.0;
    for (i, c) in cdf.iter_mut().enumerate() {
        acc += 1.0 / ((i + 1) as f64).powf(ZIPF_EXPONENT);
        *c = acc;
    }
    cdf.iter_mut().for_each(|c| *c /= acc);
    cdf
}

fn zipf_draw<R: Rng>(cdf: &[f64; ZIPF_MAX], rng: &mut R) -> u64 {
    let u: f64 = rng.gen();
    let i = cdf.partition_point(|&c| c <= u).min(ZIPF_MAX - 1);
    i as u64 + 1
}

/// Exponential values before hashing: `i` uniform in `0..=⌊log₂ n⌋`, then a
/// uniform value in `[2^i, 2^(i+1))`.
pub fn exponential_raw(n: usize, seed: u64) -> Vec<u64> {
    let mut rng = key_rng(seed);
    let lg = (n.max(1) as u64).ilog2().min(62);
    (0..n)
        .map(|_| {
            let i = rng.gen_range(0..=lg);
            (1u64 << i) | (rng.gen::<u64>() & ((1u64 << i) - 1))
        })
        .collect()
}

fn key_rng(seed: u64) -> SmallRng {
    SmallRng::seed_from_u64(seed)
}

fn payload_rng(seed: u64) -> SmallRng {
    SmallRng::seed_from_u64(mix64(seed ^ 0x7061_796c_6f61_6473))
}

/// `(i^p + n/2) mod n` in wrapping 64-bit arithmetic.
fn dup_key(i: u64, p: u32, n: u64) -> u64 {
    i.wrapping_pow(p).wrapping_add(n / 2) % n
}

/// The keys of a distribution as 64-bit integers.
pub fn keys(dist: Distribution, n: usize, seed: u64) -> (Vec<u64>, KeyWidth) {
    let mut rng = key_rng(seed);
    let n64 = n as u64;
    match dist {
        Distribution::Uniform => ((0..n).map(|_| rng.gen()).collect(), KeyWidth::Full),
        Distribution::Exponential => {
            (exponential_raw(n, seed).into_iter().map(mix64).collect(), KeyWidth::Full)
        }
        Distribution::Zipf => {
            let cdf = zipf_cdf();
            ((0..n).map(|_| zipf_draw(&cdf, &mut rng)).collect(), KeyWidth::Small)
        }
        Distribution::RootDup => {
            let r = n64.isqrt().max(1);
            ((0..n64).map(|i| i % r).collect(), KeyWidth::Small)
        }
        Distribution::TwoDup => ((0..n64).map(|i| dup_key(i, 2, n64)).collect(), KeyWidth::Small),
        Distribution::EightDup => ((0..n64).map(|i| dup_key(i, 8, n64)).collect(), KeyWidth::Small),
        Distribution::Sorted | Distribution::ReverseSorted | Distribution::AlmostSorted => {
            let (mut v, w) = keys(Distribution::Uniform, n, seed);
            v.sort_unstable();
            match dist {
                Distribution::ReverseSorted => v.reverse(),
                Distribution::AlmostSorted => {
                    let swaps = (n64.isqrt() as usize).min(n / 2);
                    let picks = index::sample(&mut rng, n, 2 * swaps).into_vec();
                    for p in picks.chunks_exact(2) {
                        v.swap(p[0], p[1]);
                    }
                }
                _ => {}
            }
            (v, w)
        }
        Distribution::Zero => (vec![0; n], KeyWidth::Small),
    }
}

/// `n` elements of type `T` drawn from `dist`.
pub fn generate<T: Element>(dist: Distribution, n: usize, seed: u64) -> Vec<T> {
    let (keys, width) = keys(dist, n, seed);
    let mut rng = payload_rng(seed);
    keys.into_iter().map(|k| T::from_key(k, width, &mut rng)).collect()
}
