use core::marker::PhantomData;

use super::Classifier;
use crate::element::ElementModel;
use crate::Error;

/// Digit `(key >> shift) mod 2^radix_bits`.
#[inline(always)]
pub fn radix_bucket(key: u64, shift: u32, radix_bits: u32) -> usize {
    debug_assert!(shift + radix_bits <= 64);
    let shifted = key.checked_shr(shift).unwrap_or(0);
    let mask = if radix_bits >= 64 {
        u64::MAX
    } else {
        (1u64 << radix_bits) - 1
    };
    (shifted & mask) as usize
}

/// Number of significant key bits in `elems`: one past the highest bit set
/// in any key, 0 when every key is zero.
pub fn significant_prefix<T, M: ElementModel<T>>(elems: &[T], model: &M) -> Result<u32, Error> {
    if elems.is_empty() {
        return Err(Error::EmptyRange);
    }
    let or = elems.iter().fold(0u64, |acc, e| acc | model.radix_key(e));
    Ok(64 - or.leading_zeros())
}

/// Classifies by one radix digit of the model's key.
pub struct RadixClassifier<'a, T, M> {
    pub model: &'a M,
    pub shift: u32,
    pub bits: u32,
    _elem: PhantomData<fn(&T)>,
}

impl<'a, T, M: ElementModel<T>> RadixClassifier<'a, T, M> {
    pub fn new(model: &'a M, shift: u32, bits: u32) -> Self {
        RadixClassifier {
            model,
            shift,
            bits,
            _elem: PhantomData,
        }
    }
}

impl<T, M: ElementModel<T>> Classifier<T> for RadixClassifier<'_, T, M> {
    fn num_buckets(&self) -> usize {
        1 << self.bits
    }

    #[inline(always)]
    fn classify(&self, e: &T) -> usize {
        radix_bucket(self.model.radix_key(e), self.shift, self.bits)
    }

    /// The lowest digit leaves nothing to distinguish.
    fn is_terminal(&self, _bucket: usize) -> bool {
        self.shift == 0
    }
}
