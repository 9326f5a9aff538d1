//! Runs sorters over generated inputs and records validated timings.

use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use ips4o::{ByLess, SortConfig};
use serde::{Deserialize, Serialize};

use crate::baseline::s4o_sort;
use crate::checksum::{checksum, is_sorted, same_key_order};
use crate::gen::{generate, Distribution};
use crate::types::{DataType, Element};
use crate::with_dtype;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Ips4o,
    Ips2ra,
    /// Out-of-place samplesort, sequential.
    S4oOop,
    /// `slice::sort_unstable_by`, sequential.
    StdSort,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Ips4o, Algorithm::Ips2ra, Algorithm::S4oOop, Algorithm::StdSort];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ips4o => "ips4o",
            Algorithm::Ips2ra => "ips2ra",
            Algorithm::S4oOop => "s4o-oop",
            Algorithm::StdSort => "stdsort",
        }
    }

    pub fn supports(self, dtype: DataType) -> bool {
        self != Algorithm::Ips2ra || dtype.has_radix_key()
    }

    /// Threads the algorithm really uses when `requested` are offered.
    pub fn threads_used(self, requested: usize) -> usize {
        match self {
            Algorithm::Ips4o | Algorithm::Ips2ra => requested.max(1),
            Algorithm::S4oOop | Algorithm::StdSort => 1,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// One timed repetition. Failed runs carry no time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algo: String,
    pub dist: String,
    pub dtype: String,
    pub n: u64,
    pub threads: usize,
    pub rep: usize,
    pub nanos: Option<u64>,
    pub success: bool,
    /// Digest of the sorted output; not part of the CSV.
    #[serde(skip)]
    pub checksum: u64,
}

pub const CSV_HEADER: &str = "algo,dist,dtype,n,threads,rep,nanos,success";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algos: Vec<Algorithm>,
    pub dists: Vec<Distribution>,
    pub dtypes: Vec<DataType>,
    pub sizes: Vec<usize>,
    pub threads: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Run each cell once untimed before the repetitions.
    pub warmup: bool,
    pub sort: SortConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algos: vec![Algorithm::Ips4o],
            dists: vec![Distribution::Uniform],
            dtypes: vec![DataType::U64],
            sizes: vec![1 << 20],
            threads: vec![1],
            reps: 3,
            seed: 1,
            warmup: true,
            sort: SortConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    Unsupported { algo: Algorithm, dtype: DataType },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Unsupported { algo, dtype } => {
                write!(f, "{algo} needs an unsigned key, {dtype} has none")
            }
        }
    }
}

impl std::error::Error for RunError {}

fn sort_with<T: Element>(algo: Algorithm, v: &mut [T], threads: usize, cfg: &SortConfig) -> bool {
    match algo {
        Algorithm::Ips4o => ips4o::sort(v, T::less, threads, cfg).is_ok(),
        Algorithm::Ips2ra => ips4o::sort_radix(v, |e: &T| e.radix_key().unwrap_or(0), threads, cfg).is_ok(),
        Algorithm::S4oOop => {
            s4o_sort(v, &ByLess(T::less), cfg);
            true
        }
        Algorithm::StdSort => {
            v.sort_unstable_by(|a, b| {
                if T::less(a, b) {
                    std::cmp::Ordering::Less
                } else if T::less(b, a) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            });
            true
        }
    }
}

/// Sorts a copy of `input` and validates it. Returns the time in
/// nanoseconds (`None` on failure) and the output digest.
pub fn timed_sort<T: Element>(
    algo: Algorithm,
    input: &[T],
    want: u64,
    threads: usize,
    cfg: &SortConfig,
) -> (Option<u64>, u64) {
    let mut v = input.to_vec();
    let start = Instant::now();
    let ok = sort_with(algo, &mut v, threads, cfg);
    let nanos = (start.elapsed().as_nanos() as u64).max(1);
    let sum = checksum(&v);
    let valid = ok && sum == want && is_sorted(&v);
    (valid.then_some(nanos), sum)
}

/// Sorts `input` with `algo` and compares the result against a reference
/// comparison sort: sorted, same key at every position, same multiset.
pub fn verify_sort<T: Element>(algo: Algorithm, input: &[T], threads: usize, cfg: &SortConfig) -> Result<(), String> {
    let mut reference = input.to_vec();
    sort_with(Algorithm::StdSort, &mut reference, 1, cfg);
    check_against(algo, input, &reference, threads, cfg)
}

/// [`verify_sort`] with the reference output computed by the caller.
pub fn check_against<T: Element>(
    algo: Algorithm,
    input: &[T],
    reference: &[T],
    threads: usize,
    cfg: &SortConfig,
) -> Result<(), String> {
    let mut got = input.to_vec();
    if !sort_with(algo, &mut got, threads, cfg) {
        return Err("sorter returned an error".into());
    }
    if !is_sorted(&got) {
        return Err("output is not sorted".into());
    }
    if checksum(&got) != checksum(input) {
        return Err("output is not a permutation of the input".into());
    }
    if !same_key_order(&got, reference) {
        return Err("output differs from the reference sort".into());
    }
    Ok(())
}

/// Sorts with the standard library, the reference for [`check_against`].
pub fn reference_sort<T: Element>(input: &[T]) -> Vec<T> {
    let mut v = input.to_vec();
    sort_with(Algorithm::StdSort, &mut v, 1, &SortConfig::default());
    v
}

/// Sizes exercised by [`selftest`].
pub const SELFTEST_SIZES: [usize; 8] = [0, 1, 2, 15, 33, 4095, 4097, 100_000];

/// Checks every algorithm on every distribution, type and size it supports
/// against the reference sort. Returns a description of each failure.
pub fn selftest(threads: &[usize], seeds: &[u64], cfg: &SortConfig) -> Vec<String> {
    let mut failures = Vec::new();
    for dtype in DataType::ALL {
        for dist in Distribution::ALL {
            for &n in &SELFTEST_SIZES {
                for &seed in seeds {
                    with_dtype!(dtype, T => {
                        let input: Vec<T> = generate(dist, n, seed);
                        let reference = reference_sort(&input);
                        for algo in Algorithm::ALL.into_iter().filter(|a| a.supports(dtype)) {
                            for &t in threads {
                                if let Err(e) = check_against(algo, &input, &reference, t, cfg) {
                                    failures.push(format!("{algo} {dist} {dtype} n={n} t={t} seed={seed}: {e}"));
                                }
                            }
                        }
                    });
                }
            }
        }
    }
    failures
}

fn run_cell<T: Element>(
    algo: Algorithm,
    dist: Distribution,
    n: usize,
    threads: usize,
    cfg: &RunConfig,
    out: &mut Vec<RunRecord>,
) {
    let input: Vec<T> = generate(dist, n, cfg.seed);
    let want = checksum(&input);
    let used = algo.threads_used(threads);
    if cfg.warmup {
        timed_sort(algo, &input, want, used, &cfg.sort);
    }
    for rep in 0..cfg.reps {
        let (nanos, sum) = timed_sort(algo, &input, want, used, &cfg.sort);
        out.push(RunRecord {
            algo: algo.name().into(),
            dist: dist.name().into(),
            dtype: T::DTYPE.name().into(),
            n: n as u64,
            threads: used,
            rep,
            nanos,
            success: nanos.is_some(),
            checksum: sum,
        });
    }
}

/// Runs every configured cell, one at a time. Fails before running anything
/// if an algorithm cannot handle a requested type.
pub fn run_benchmark(cfg: &RunConfig) -> Result<Vec<RunRecord>, RunError> {
    for &algo in &cfg.algos {
        for &dtype in &cfg.dtypes {
            if !algo.supports(dtype) {
                return Err(RunError::Unsupported { algo, dtype });
            }
        }
    }
    let mut out = Vec::new();
    for &dtype in &cfg.dtypes {
        for &dist in &cfg.dists {
            for &n in &cfg.sizes {
                for &t in &cfg.threads {
                    for &algo in &cfg.algos {
                        with_dtype!(dtype, T => run_cell::<T>(algo, dist, n, t, cfg, &mut out));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: io::Write>(records: &[RunRecord], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r)?;
    }
    if records.is_empty() {
        wr.write_record(CSV_HEADER.split(','))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(r: R) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_reader(r).deserialize().collect()
}
