//! Counter-based, splittable 64-bit generator.
//!
//! Output `k` (1-based) of the stream with key `K` is
//!
//! ```text
//! z = K + k * 0x9E3779B97F4A7C15          (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out = z ^ (z >> 31)
//! ```
//!
//! which is exactly the SplitMix64 sequence seeded with `K`, so any
//! language with 64-bit wrapping arithmetic reproduces it. Child streams are
//! keyed by `mix64(K ^ mix64(fnv1a64(label)))` or `mix64(K ^ mix64(index))`.
//!
//! Test vectors (key 0): `0xE220A8397B1DCDAF`, `0x6E789E6AA1B965F4`,
//! `0x06C45D188009454F`.
//!
//! Floats use the top 53 bits; Gaussians use one Box-Muller draw per pair of
//! uniforms (the sine branch is discarded).

use crate::matcore::C64;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the UTF-8 bytes of a label.
pub fn fnv1a64(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Output number `counter` (1-based) of stream `key`, without touching any state.
    #[inline]
    pub fn output_at(key: u64, counter: u64) -> u64 {
        mix64(key.wrapping_add(counter.wrapping_mul(GAMMA)))
    }

    /// Independent child stream named by `label`.
    pub fn split(&self, label: &str) -> Self {
        Self::new(mix64(self.key ^ mix64(fnv1a64(label))))
    }

    /// Independent child stream for trial or element number `index`.
    pub fn split_index(&self, index: u64) -> Self {
        Self::new(mix64(self.key ^ mix64(index.wrapping_add(GAMMA))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        Self::output_at(self.key, self.counter)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal draw.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Circular complex Gaussian with `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let re = self.gaussian();
        let im = self.gaussian();
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}
