//! Tuning constants and the bucket-count arithmetic shared by both sorters.

use crate::Error;

/// All tuning knobs of a sort run.
///
/// The defaults are the values the algorithm was engineered with: up to 256
/// buckets, oversampling `0.2·log₂ n`, base cases of 16 elements and 2 KiB
/// blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SortConfig {
    /// Maximum number of buckets per partitioning step. Power of two, ≥ 2.
    pub k_max: usize,
    /// Oversampling coefficient; a step over `n` elements draws
    /// `⌈alpha_coeff·log₂ n⌉` samples per bucket.
    pub alpha_coeff: f64,
    /// Base case unit.
    pub n0: usize,
    /// Target block size in bytes.
    pub block_bytes: usize,
    /// Radix tasks below this size are handed to the comparison sorter.
    pub base_case_cutoff_radix: usize,
    /// Seed for sampling. Every run is reproducible from it.
    pub seed: u64,
    /// Batch width of the unrolled classification loop (1..=16).
    pub unroll: usize,
    /// Idle threads may take sequential tasks donated by busy ones.
    pub work_sharing: bool,
}

impl Default for SortConfig {
    fn default() -> Self {
        SortConfig {
            k_max: 256,
            alpha_coeff: 0.2,
            n0: 16,
            block_bytes: 2048,
            base_case_cutoff_radix: 1 << 12,
            seed: 0x5eed_1b50_4c0f_fee5,
            unroll: 8,
            work_sharing: true,
        }
    }
}

pub(crate) const MAX_UNROLL: usize = 16;

impl SortConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.k_max < 2 || !self.k_max.is_power_of_two() {
            return Err(Error::InvalidConfig("k_max must be a power of two >= 2"));
        }
        if self.k_max > 1 << 12 {
            return Err(Error::InvalidConfig("k_max must not exceed 4096"));
        }
        if self.alpha_coeff.is_nan() || self.alpha_coeff <= 0.0 || !self.alpha_coeff.is_finite() {
            return Err(Error::InvalidConfig("alpha_coeff must be positive"));
        }
        if self.n0 == 0 {
            return Err(Error::InvalidConfig("n0 must be >= 1"));
        }
        if self.block_bytes == 0 {
            return Err(Error::InvalidConfig("block_bytes must be >= 1"));
        }
        if self.unroll == 0 || self.unroll > MAX_UNROLL {
            return Err(Error::InvalidConfig("unroll must be in 1..=16"));
        }
        Ok(())
    }

    /// Block size in elements for elements of `element_bytes` bytes.
    pub fn block_elements_for(&self, element_bytes: usize) -> usize {
        block_elements_with(self.block_bytes, element_bytes)
    }

    /// Radix digit width used by the radix sorter (log₂ of `k_max`).
    pub fn radix_bits(&self) -> u32 {
        self.k_max.trailing_zeros()
    }

    /// Number of samples drawn for a step over `task_size` elements with
    /// `buckets` buckets.
    ///
    /// `⌈alpha_coeff·log₂ task_size⌉` samples per bucket (at least one), minus
    /// one so that the equidistant picks land on `step·j − 1`; never more
    /// than the task holds.
    pub fn sample_count(&self, task_size: usize, buckets: usize) -> usize {
        let step = self.oversampling_step(task_size);
        (step * buckets - 1).min(task_size)
    }

    pub(crate) fn oversampling_step(&self, task_size: usize) -> usize {
        let lg = libm::log2(task_size.max(2) as f64);
        let step = libm::ceil(self.alpha_coeff * lg);
        if step < 1.0 {
            1
        } else {
            step as usize
        }
    }
}

/// Block size in elements for 2 KiB blocks: `max(1, 2^⌊11 − log₂ D⌋)`.
pub fn block_elements(element_bytes: usize) -> usize {
    block_elements_with(2048, element_bytes)
}

fn block_elements_with(block_bytes: usize, element_bytes: usize) -> usize {
    let d = element_bytes.max(1);
    // ⌊log₂ B − log₂ D⌋ with B rounded down to a power of two.
    let log_b = block_bytes.max(1).ilog2() as i64;
    let log_d_ceil = d.next_power_of_two().ilog2() as i64;
    let exp = log_b - log_d_ceil;
    if exp <= 0 {
        1
    } else {
        1usize << exp
    }
}

/// Bucket count for a partitioning step over `task_size` elements.
///
/// Full `k_max` for tasks of at least `k²·n0` elements; between `k·n0` and
/// `k²·n0` the count is `2^⌈(log₂(n'/n0)+1)/2⌉`; below that
/// `2^⌈log₂(n'/n0)⌉`. Tasks of at most `2·n0` elements are base cases and are
/// rejected.
pub fn effective_bucket_count(task_size: usize, cfg: &SortConfig) -> Result<usize, Error> {
    let n0 = cfg.n0 as u128;
    let k = cfg.k_max as u128;
    let size = task_size as u128;
    if size <= 2 * n0 {
        return Err(Error::TaskTooSmall {
            size: task_size,
            limit: 2 * cfg.n0,
        });
    }
    let buckets = if size >= k * k * n0 {
        k
    } else if size > k * n0 {
        // smallest q with size ≤ n0·2^(2q−1)
        let mut q = 1u32;
        while size > n0 << (2 * q - 1) {
            q += 1;
        }
        1u128 << q
    } else {
        // smallest p with size ≤ n0·2^p
        let mut p = 0u32;
        while size > n0 << p {
            p += 1;
        }
        1u128 << p
    };
    Ok(buckets.clamp(2, k) as usize)
}
