use alloc::vec::Vec;

use rand::Rng;

use crate::element::ElementModel;
use crate::Error;

/// Splitters picked from a sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterSelection<T> {
    /// Strictly increasing.
    pub splitters: Vec<T>,
    /// Some picked candidates were duplicates.
    pub use_equality: bool,
    /// Every candidate was the same value.
    pub all_equal: bool,
}

/// Moves a uniform random sample of `count` elements to the front of
/// `task` by swapping. Nothing leaves the range.
pub fn draw_sample<T, R: Rng + ?Sized>(task: &mut [T], count: usize, rng: &mut R) {
    let n = task.len();
    let count = count.min(n);
    for i in 0..count {
        let j = rng.gen_range(i..n);
        task.swap(i, j);
    }
}

/// Picks `k − 1` equidistant candidates from a sorted sample and removes
/// duplicates.
///
/// With `step = max(1, ⌊(len + 1)/k⌋)` the candidates sit at `j·step − 1`
/// for `j = 1..k`.
pub fn select_splitters<T: Copy, M: ElementModel<T>>(
    sorted_sample: &[T],
    k: usize,
    model: &M,
) -> Result<SplitterSelection<T>, Error> {
    if sorted_sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let len = sorted_sample.len();
    let k = k.max(2);
    let step = ((len + 1) / k).max(1);
    let mut splitters: Vec<T> = Vec::with_capacity(k - 1);
    let mut candidates = 0usize;
    for j in 1..k {
        let pos = (j * step - 1).min(len - 1);
        let c = sorted_sample[pos];
        candidates += 1;
        match splitters.last() {
            Some(last) if !model.less(last, &c) => {}
            _ => splitters.push(c),
        }
    }
    let use_equality = splitters.len() < candidates;
    let all_equal = use_equality && splitters.len() == 1;
    Ok(SplitterSelection {
        splitters,
        use_equality,
        all_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::ByLess;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    const LESS: ByLess<fn(&u32, &u32) -> bool> = ByLess(|a, b| a < b);

    #[test]
    fn equidistant_picks() {
        let s: Vec<u32> = (1..=8).collect();
        let sel = select_splitters(&s, 4, &LESS).unwrap();
        assert_eq!(sel.splitters, [2, 4, 6]);
        assert!(!sel.use_equality && !sel.all_equal);
    }

    #[test]
    fn all_equal_sample() {
        let sel = select_splitters(&[5u32; 7], 4, &LESS).unwrap();
        assert_eq!(sel.splitters, [5]);
        assert!(sel.all_equal && sel.use_equality);
    }

    #[test]
    fn duplicates_enable_equality_buckets() {
        let sel = select_splitters(&[1u32, 1, 1, 1, 9, 9, 9], 4, &LESS).unwrap();
        assert_eq!(sel.splitters, [1, 9]);
        assert!(sel.use_equality && !sel.all_equal);
    }

    #[test]
    fn empty_sample_rejected() {
        assert_eq!(select_splitters::<u32, _>(&[], 4, &LESS), Err(Error::EmptySample));
    }

    #[test]
    fn short_sample_still_valid() {
        let sel = select_splitters(&[3u32, 7], 16, &LESS).unwrap();
        assert_eq!(sel.splitters, [3, 7]);
        assert!(sel.splitters.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sampling_is_a_permutation() {
        let mut rng = SmallRng::seed_from_u64(4);
        let mut v: Vec<u32> = (0..100).collect();
        draw_sample(&mut v, 100, &mut rng);
        let mut w = v.clone();
        w.sort();
        assert_eq!(w, (0..100).collect::<Vec<_>>());

        let mut one = [42u32];
        draw_sample(&mut one, 1, &mut rng);
        assert_eq!(one, [42]);
    }

    #[test]
    fn sampling_is_reproducible() {
        let run = || {
            let mut rng = SmallRng::seed_from_u64(99);
            let mut v: Vec<u32> = (0..16).collect();
            draw_sample(&mut v, 4, &mut rng);
            v[..4].to_vec()
        };
        assert_eq!(run(), run());
    }
}
