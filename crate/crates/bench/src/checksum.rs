use crate::types::{mix64, Element};

/// Order-independent digest of a multiset of elements: the wrapping sum of
/// per-element hashes.
pub fn checksum<T: Element>(v: &[T]) -> u64 {
    v.iter().fold(0u64, |acc, e| acc.wrapping_add(mix64(e.digest())))
}

pub fn is_sorted<T: Element>(v: &[T]) -> bool {
    v.windows(2).all(|w| !T::less(&w[1], &w[0]))
}

/// Whether `got` agrees with `reference` position by position, treating
/// elements that compare equal as interchangeable.
pub fn same_key_order<T: Element>(got: &[T], reference: &[T]) -> bool {
    got.len() == reference.len()
        && got.iter().zip(reference).all(|(a, b)| !T::less(a, b) && !T::less(b, a))
}
