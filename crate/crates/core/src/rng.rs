//! Seeded random streams with fixed sampling algorithms.
//!
//! Every random quantity in the crate is drawn from [`Rng64`], a ChaCha8
//! stream keyed by a 64-bit seed (`ChaCha8Rng::seed_from_u64`, whose output
//! is value-stable across `rand_chacha` releases). The samplers built on top
//! of it are implemented here rather than taken from `rand_distr` so that
//! instance files stay bit-identical across dependency upgrades:
//!
//! - uniform `[0, 1)`: top 53 bits of one `u64`, times `2^-53`;
//! - bounded integers: Lemire's multiply-and-reject on `u64`;
//! - standard normal: Box-Muller, both outputs used, cosine branch first;
//! - exponential with mean `m`: inversion, `-m * ln(1 - u)`.
//!
//! Derived streams use [`mix`], a chain of SplitMix64 finalizers, so that
//! `(master, tag, n, index)` maps to an independent seed regardless of the
//! order in which parallel workers consume them.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A 64-bit seed. Same seed and same parameters give identical output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Derive a child seed for a labelled sub-stream.
    pub fn derive(self, label: u64) -> RngSeed {
        RngSeed(mix(&[self.0, label]))
    }

    pub fn derive_str(self, label: &str) -> RngSeed {
        self.derive(fnv1a(label.as_bytes()))
    }
}

impl From<u64> for RngSeed {
    fn from(s: u64) -> Self {
        RngSeed(s)
    }
}

impl std::fmt::Display for RngSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Fold a list of words into one seed: `h = splitmix64(h ^ w)` starting from 0.
pub fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0u64, |h, &w| splitmix64(h ^ w))
}

/// 64-bit FNV-1a, used to turn string tags into stream labels.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub struct Rng64 {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Rng64 {
    pub fn new(seed: RngSeed) -> Self {
        Rng64 {
            inner: ChaCha8Rng::seed_from_u64(seed.0),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[a, b)`.
    pub fn uniform_in(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }

    /// Uniform integer in `0..bound`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn exponential(&mut self, mean: f64) -> f64 {
        -mean * (1.0 - self.uniform()).ln()
    }

    /// Fisher-Yates shuffle, last position first.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }
}
