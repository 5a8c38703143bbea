//! Seeded pseudo-random numbers with a stream that is fully defined here.
//!
//! The generator is SplitMix64: a 64-bit Weyl counter advanced by
//! `0x9E3779B97F4A7C15` and passed through the finalizer
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! Uniforms on `[0, 1)` take the top 53 bits: `(next >> 11) * 2^-53`.
//! Gaussians use Box-Muller on two consecutive outputs `u1, u2`, with
//! `u1` mapped to `(0, 1]` as `((next >> 11) + 1) * 2^-53`:
//! `z0 = sqrt(-2 ln u1) cos(2 pi u2)`, `z1 = sqrt(-2 ln u1) sin(2 pi u2)`.
//! `z0` is returned first and `z1` is cached for the next call.

use std::f64::consts::PI;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

/// The SplitMix64 output finalizer, also used to derive independent seeds.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a list of labels.
///
/// Each label is folded in as `h = mix64(h ^ mix64(label + GOLDEN_GAMMA * (i + 1)))`,
/// so distinct label tuples give unrelated streams.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    let mut h = mix64(base);
    for (i, &label) in labels.iter().enumerate() {
        let salt = GOLDEN_GAMMA.wrapping_mul(i as u64 + 1);
        h = mix64(h ^ mix64(label.wrapping_add(salt)));
    }
    h
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * UNIT
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..bound` via `floor(uniform * bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        let v = (self.uniform() * bound as f64) as usize;
        v.min(bound - 1)
    }

    /// Standard normal variate.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * UNIT;
        let u2 = (self.next_u64() >> 11) as f64 * UNIT;
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn gaussian_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// `count` distinct indices drawn uniformly from `0..n` (partial Fisher-Yates),
    /// returned in draw order.
    pub fn sample_indices(&mut self, n: usize, count: usize) -> Vec<usize> {
        assert!(count <= n, "cannot draw {count} distinct indices from {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}
