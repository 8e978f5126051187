//! Deterministic, splittable random number generation.
//!
//! A thin wrapper over ChaCha8 so that every stream is reproducible from a
//! 64-bit seed on all platforms, and independent child streams can be split
//! off for per-seed training runs.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::Scalar;

/// Seeded counter-based generator; same seed gives a bit-identical stream.
#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Splits off an independent child stream (keyed by the parent's state).
    pub fn split(&mut self) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(self.0.next_u64()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[lo, hi)`; sampled at f64 precision then narrowed.
    pub fn uniform<T: Scalar>(&mut self, lo: T, hi: T) -> T {
        let u: f64 = rand::Rng::random_range(&mut self.0, 0.0..1.0);
        lo + (hi - lo) * T::of(u)
    }

    /// Standard normal sample at f64 precision then narrowed.
    pub fn normal<T: Scalar>(&mut self) -> T {
        let v: f64 = StandardNormal.sample(&mut self.0);
        T::of(v)
    }

    pub fn uniform_usize(&mut self, n: usize) -> usize {
        rand::Rng::random_range(&mut self.0, 0..n)
    }

    /// Deterministic Fisher-Yates shuffle of indices 0..n.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.uniform_usize(i + 1);
            idx.swap(i, j);
        }
        idx
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}
