//! The benchmark element types and what the harness needs to know about them.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

/// Scrambles a 64-bit word (the splitmix64 finalizer).
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Whether a generated key uses the full 64 bits or is a small integer.
/// Full-width keys are scaled into narrower types, small ones are cast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyWidth {
    Full,
    Small,
}

pub trait Element: Copy + Send + Sync + 'static {
    const DTYPE: DataType;

    /// Builds an element whose key order follows `key`. Payload fields are
    /// drawn from `rng`.
    fn from_key<R: Rng>(key: u64, width: KeyWidth, rng: &mut R) -> Self;

    fn less(a: &Self, b: &Self) -> bool;

    /// Order-preserving unsigned key, if the type has one.
    fn radix_key(&self) -> Option<u64>;

    /// Hash of the whole element, payload included.
    fn digest(&self) -> u64;
}

impl Element for u32 {
    const DTYPE: DataType = DataType::U32;

    fn from_key<R: Rng>(key: u64, width: KeyWidth, _: &mut R) -> Self {
        match width {
            KeyWidth::Full => (key >> 32) as u32,
            KeyWidth::Small => key as u32,
        }
    }

    #[inline(always)]
    fn less(a: &Self, b: &Self) -> bool {
        a < b
    }

    fn radix_key(&self) -> Option<u64> {
        Some(*self as u64)
    }

    fn digest(&self) -> u64 {
        mix64(*self as u64)
    }
}

impl Element for u64 {
    const DTYPE: DataType = DataType::U64;

    fn from_key<R: Rng>(key: u64, _: KeyWidth, _: &mut R) -> Self {
        key
    }

    #[inline(always)]
    fn less(a: &Self, b: &Self) -> bool {
        a < b
    }

    fn radix_key(&self) -> Option<u64> {
        Some(*self)
    }

    fn digest(&self) -> u64 {
        mix64(*self)
    }
}

impl Element for f64 {
    const DTYPE: DataType = DataType::F64;

    fn from_key<R: Rng>(key: u64, width: KeyWidth, _: &mut R) -> Self {
        match width {
            // top 53 bits scaled into [0, 1)
            KeyWidth::Full => (key >> 11) as f64 * (1.0 / (1u64 << 53) as f64),
            KeyWidth::Small => key as f64,
        }
    }

    #[inline(always)]
    fn less(a: &Self, b: &Self) -> bool {
        a < b
    }

    fn radix_key(&self) -> Option<u64> {
        // flips negatives so that unsigned order is float order
        let bits = self.to_bits();
        Some(if bits >> 63 == 1 { !bits } else { bits | 1 << 63 })
    }

    fn digest(&self) -> u64 {
        mix64(self.to_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub key: u64,
    pub payload: u64,
}

impl Element for Pair {
    const DTYPE: DataType = DataType::Pair;

    fn from_key<R: Rng>(key: u64, _: KeyWidth, rng: &mut R) -> Self {
        Pair { key, payload: rng.gen() }
    }

    #[inline(always)]
    fn less(a: &Self, b: &Self) -> bool {
        a.key < b.key
    }

    fn radix_key(&self) -> Option<u64> {
        Some(self.key)
    }

    fn digest(&self) -> u64 {
        mix64(self.key ^ mix64(self.payload))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quartet {
    pub key: [u64; 3],
    pub payload: u64,
}

impl Element for Quartet {
    const DTYPE: DataType = DataType::Quartet;

    fn from_key<R: Rng>(key: u64, _: KeyWidth, rng: &mut R) -> Self {
        // equal generated keys stay equal, the low words only break ties
        // between different ones
        Quartet {
            key: [key, mix64(key), mix64(!key)],
            payload: rng.gen(),
        }
    }

    #[inline(always)]
    fn less(a: &Self, b: &Self) -> bool {
        if a.key[0] != b.key[0] {
            return a.key[0] < b.key[0];
        }
        if a.key[1] != b.key[1] {
            return a.key[1] < b.key[1];
        }
        a.key[2] < b.key[2]
    }

    fn radix_key(&self) -> Option<u64> {
        None
    }

    fn digest(&self) -> u64 {
        let mut h = mix64(self.payload);
        for w in self.key {
            h = mix64(h ^ w);
        }
        h
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Bytes100 {
    pub key: [u8; 10],
    pub payload: [u8; 90],
}

impl fmt::Debug for Bytes100 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bytes100({:02x?})", self.key)
    }
}

impl Element for Bytes100 {
    const DTYPE: DataType = DataType::Bytes100;

    fn from_key<R: Rng>(key: u64, _: KeyWidth, rng: &mut R) -> Self {
        let mut k = [0u8; 10];
        k[..8].copy_from_slice(&key.to_be_bytes());
        k[8..].copy_from_slice(&(mix64(key) as u16).to_be_bytes());
        let mut payload = [0u8; 90];
        rng.fill(&mut payload[..]);
        Bytes100 { key: k, payload }
    }

    #[inline(always)]
    fn less(a: &Self, b: &Self) -> bool {
        for i in 0..10 {
            if a.key[i] != b.key[i] {
                return a.key[i] < b.key[i];
            }
        }
        false
    }

    fn radix_key(&self) -> Option<u64> {
        None
    }

    fn digest(&self) -> u64 {
        let mut h = 0u64;
        for chunk in self.key.chunks(8).chain(self.payload.chunks(8)) {
            let mut w = [0u8; 8];
            w[..chunk.len()].copy_from_slice(chunk);
            h = mix64(h ^ u64::from_le_bytes(w));
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataType {
    U32,
    U64,
    F64,
    Pair,
    Quartet,
    Bytes100,
}

impl DataType {
    pub const ALL: [DataType; 6] = [
        DataType::U32,
        DataType::U64,
        DataType::F64,
        DataType::Pair,
        DataType::Quartet,
        DataType::Bytes100,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DataType::U32 => "u32",
            DataType::U64 => "u64",
            DataType::F64 => "f64",
            DataType::Pair => "pair",
            DataType::Quartet => "quartet",
            DataType::Bytes100 => "100b",
        }
    }

    pub fn size_bytes(self) -> usize {
        match self {
            DataType::U32 => 4,
            DataType::U64 | DataType::F64 => 8,
            DataType::Pair => 16,
            DataType::Quartet => 32,
            DataType::Bytes100 => 100,
        }
    }

    pub fn has_radix_key(self) -> bool {
        !matches!(self, DataType::Quartet | DataType::Bytes100)
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        DataType::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown data type `{s}`"))
    }
}

/// Runs `$body` with `$t` bound to the element type of `$dtype`.
#[macro_export]
macro_rules! with_dtype {
    ($dtype:expr, $t:ident => $body:expr) => {
        match $dtype {
            $crate::DataType::U32 => {
                type $t = u32;
                $body
            }
            $crate::DataType::U64 => {
                type $t = u64;
                $body
            }
            $crate::DataType::F64 => {
                type $t = f64;
                $body
            }
            $crate::DataType::Pair => {
                type $t = $crate::Pair;
                $body
            }
            $crate::DataType::Quartet => {
                type $t = $crate::Quartet;
                $body
            }
            $crate::DataType::Bytes100 => {
                type $t = $crate::Bytes100;
                $body
            }
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    fn keys_keep_order<T: Element>(width: KeyWidth) {
        let mut rng = SmallRng::seed_from_u64(1);
        let mut keys: Vec<u64> = (0..2000).map(|_| rng.gen()).collect();
        if width == KeyWidth::Small {
            keys.iter_mut().for_each(|k| *k >>= 44);
        }
        keys.sort_unstable();
        let v: Vec<T> = keys.iter().map(|&k| T::from_key(k, width, &mut rng)).collect();
        assert!(v.windows(2).all(|w| !T::less(&w[1], &w[0])), "{:?}", T::DTYPE);
        for w in keys.windows(2).zip(v.windows(2)) {
            if w.0[0] == w.0[1] {
                assert!(!T::less(&w.1[0], &w.1[1]), "equal keys must compare equal");
            }
        }
    }

    #[test]
    fn construction_is_monotone() {
        for w in [KeyWidth::Full, KeyWidth::Small] {
            keys_keep_order::<u32>(w);
            keys_keep_order::<u64>(w);
            keys_keep_order::<f64>(w);
            keys_keep_order::<Pair>(w);
            keys_keep_order::<Quartet>(w);
            keys_keep_order::<Bytes100>(w);
        }
    }

    #[test]
    fn float_radix_key_is_monotone() {
        let xs = [-1e300, -2.5, -0.0, 0.0, 1e-300, 0.5, 3.0, f64::INFINITY];
        for w in xs.windows(2) {
            assert!(w[0].radix_key() <= w[1].radix_key(), "{w:?}");
        }
    }

    #[test]
    fn lexicographic_comparators() {
        let q = |a, b, c| Quartet { key: [a, b, c], payload: 0 };
        assert!(Quartet::less(&q(1, 9, 9), &q(2, 0, 0)));
        assert!(Quartet::less(&q(1, 1, 9), &q(1, 2, 0)));
        assert!(Quartet::less(&q(1, 1, 1), &q(1, 1, 2)));
        assert!(!Quartet::less(&q(1, 1, 1), &q(1, 1, 1)));
        let mut a = Bytes100 { key: [0; 10], payload: [0; 90] };
        let mut b = a;
        b.payload[0] = 1;
        assert!(!Bytes100::less(&a, &b) && !Bytes100::less(&b, &a));
        a.key[9] = 1;
        assert!(Bytes100::less(&b, &a));
        b.key[0] = 1;
        assert!(Bytes100::less(&a, &b));
    }

    #[test]
    fn names_round_trip() {
        for d in DataType::ALL {
            assert_eq!(d.name().parse::<DataType>(), Ok(d));
            assert_eq!(d.size_bytes(), match d {
                DataType::U32 => std::mem::size_of::<u32>(),
                DataType::U64 => std::mem::size_of::<u64>(),
                DataType::F64 => std::mem::size_of::<f64>(),
                DataType::Pair => std::mem::size_of::<Pair>(),
                DataType::Quartet => std::mem::size_of::<Quartet>(),
                DataType::Bytes100 => std::mem::size_of::<Bytes100>(),
            });
        }
        assert!("u128".parse::<DataType>().is_err());
    }
}
