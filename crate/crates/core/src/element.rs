//! Element models: how the sorters compare elements and, for the radix
//! sorter, how they extract an unsigned key.

/// Ordering contract seen by the sorters.
///
/// `less` must be a strict weak ordering. When `HAS_RADIX_KEY` is set,
/// `less(a, b)` must agree with `radix_key(a) < radix_key(b)`.
pub trait ElementModel<T>: Sync {
    const HAS_RADIX_KEY: bool;

    fn less(&self, a: &T, b: &T) -> bool;

    /// Unsigned key of `e`. Only called when `HAS_RADIX_KEY` is true.
    fn radix_key(&self, e: &T) -> u64;
}

/// Comparison-only model around a `less` predicate.
#[derive(Clone, Copy)]
pub struct ByLess<F>(pub F);

impl<T, F> ElementModel<T> for ByLess<F>
where
    F: Fn(&T, &T) -> bool + Sync,
{
    const HAS_RADIX_KEY: bool = false;

    #[inline(always)]
    fn less(&self, a: &T, b: &T) -> bool {
        (self.0)(a, b)
    }

    fn radix_key(&self, _: &T) -> u64 {
        unreachable!("comparison model has no radix key")
    }
}

/// Model ordered by an unsigned 64-bit key.
#[derive(Clone, Copy)]
pub struct ByKey<K>(pub K);

impl<T, K> ElementModel<T> for ByKey<K>
where
    K: Fn(&T) -> u64 + Sync,
{
    const HAS_RADIX_KEY: bool = true;

    #[inline(always)]
    fn less(&self, a: &T, b: &T) -> bool {
        (self.0)(a) < (self.0)(b)
    }

    #[inline(always)]
    fn radix_key(&self, e: &T) -> u64 {
        (self.0)(e)
    }
}

impl<T, M: ElementModel<T>> ElementModel<T> for &M {
    const HAS_RADIX_KEY: bool = M::HAS_RADIX_KEY;

    #[inline(always)]
    fn less(&self, a: &T, b: &T) -> bool {
        (**self).less(a, b)
    }

    #[inline(always)]
    fn radix_key(&self, e: &T) -> u64 {
        (**self).radix_key(e)
    }
}
