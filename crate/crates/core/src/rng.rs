//! Seedable, portable random number generation.
//!
//! xoshiro256++ with a SplitMix64 seed expansion, and Box-Muller for normal
//! variates. The generator and the draw order are fixed so that a given seed
//! reproduces the same channels on every platform and in every run of this
//! build.

use num_complex::Complex64;

/// SplitMix64 output function. Used to expand seeds and to derive
/// independent per-trial seeds (`mix(seed ^ trial)`).
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for one Monte Carlo trial from the sweep seed.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ index)
}

/// xoshiro256++ generator.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut z = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
            *slot = splitmix64(z);
        }
        Rng { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = (self.s[0].wrapping_add(self.s[3]))
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// One Box-Muller pair of independent standard normals.
    #[inline]
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        // 1 - u in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// One standard normal. Consumes a full Box-Muller pair so the draw
    /// sequence stays position-independent.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.standard_normal_pair().0
    }

    /// Circularly-symmetric complex Gaussian CN(0, 1): real and imaginary
    /// parts independent N(0, 1/2).
    #[inline]
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.standard_normal_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}
