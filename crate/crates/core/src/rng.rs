//! Counter-based random streams.
//!
//! Each stream is identified by a 64-bit key derived from the render seed and
//! the coordinates of the consumer (pixel, sample, bounce, purpose). Output `i`
//! of a stream is a pure function of `(key, i)`, so images do not depend on
//! how pixels are scheduled across threads.

use crate::num::Real;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a stream is used for; keeps independent decisions decorrelated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    PixelJitter = 1,
    Bsdf = 2,
    Shadow = 3,
    Emitter = 4,
    Sampling = 5,
    Sign = 6,
}

#[derive(Clone, Debug)]
pub struct Rng {
    key: u64,
    counter: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GOLDEN),
            counter: 0,
        }
    }

    /// Stream keyed on an arbitrary tuple of coordinates.
    pub fn keyed(seed: u64, coords: &[u64]) -> Self {
        let mut key = mix64(seed ^ GOLDEN);
        for &c in coords {
            key = mix64(key ^ mix64(c.wrapping_add(GOLDEN)));
        }
        Self { key, counter: 0 }
    }

    /// Stream for one path vertex of one pixel sample.
    pub fn for_path(seed: u64, pixel: u64, sample: u64, bounce: u64, purpose: Purpose) -> Self {
        Self::keyed(seed, &[pixel, sample, bounce, purpose as u64])
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key ^ self.counter.wrapping_mul(GOLDEN))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, 1)` converted to the scalar type; never rounds up to 1.
    #[inline]
    pub fn uniform<S: Real>(&mut self) -> S {
        let u = S::lit(self.next_f64());
        if u >= S::one() {
            S::one() - S::epsilon()
        } else {
            u
        }
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}
