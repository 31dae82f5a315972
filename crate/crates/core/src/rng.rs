//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`). A
//! generator is created with `ChaCha8Rng::seed_from_u64(seed)` and then moved
//! to the 64-bit stream `(purpose << 32) | sub`, where `purpose` is one of the
//! [`Stream`] discriminants and `sub` distinguishes e.g. layers or epochs.
//! Conversions from raw `u64` words are defined here rather than borrowed
//! from `rand`, so outputs are reproducible across platforms and crate
//! versions:
//!
//! * `uniform`: top 53 bits scaled by `2^-53`, giving `[0, 1)`.
//! * `below(n)`: rejection of words `>= u64::MAX - u64::MAX % n`, then `% n`.
//! * `normal`: Box-Muller on two uniforms, cosine branch only.
//! * `shuffle`: Fisher-Yates from the last index down.

use core::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Named purposes a top-level seed is expanded into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Shuffle = 2,
    RandomLayers = 3,
    Synth = 4,
    Split = 5,
}

#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64, stream: Stream, sub: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((stream as u64) << 32) | u64::from(sub));
        Self(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`. `n` must be non-zero.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let limit = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < limit {
                return (x % n) as usize;
            }
        }
    }

    /// Standard normal sample.
    pub fn normal(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(TAU * u2)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
