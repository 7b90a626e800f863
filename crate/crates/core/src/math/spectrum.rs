use std::ops::{Add, AddAssign, Mul, MulAssign};

use serde::{Deserialize, Serialize};

use crate::num::Real;

/// Linear RGB radiance triple.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<S> {
    pub r: S,
    pub g: S,
    pub b: S,
}

impl<S: Real> Spectrum<S> {
    #[inline]
    pub const fn new(r: S, g: S, b: S) -> Self {
        Self { r, g, b }
    }

    #[inline]
    pub fn black() -> Self {
        Self::splat(S::zero())
    }

    #[inline]
    pub fn splat(v: S) -> Self {
        Self::new(v, v, v)
    }

    pub fn from_f64(c: [f64; 3]) -> Self {
        Self::new(S::lit(c[0]), S::lit(c[1]), S::lit(c[2]))
    }

    pub fn to_f64(self) -> [f64; 3] {
        [
            self.r.to_f64_lossy(),
            self.g.to_f64_lossy(),
            self.b.to_f64_lossy(),
        ]
    }

    #[inline]
    pub fn channel(&self, c: usize) -> S {
        match c {
            0 => self.r,
            1 => self.g,
            2 => self.b,
            _ => panic!("channel {c} out of range"),
        }
    }

    #[inline]
    pub fn set_channel(&mut self, c: usize, v: S) {
        match c {
            0 => self.r = v,
            1 => self.g = v,
            2 => self.b = v,
            _ => panic!("channel {c} out of range"),
        }
    }

    #[inline]
    pub fn max_channel(&self) -> S {
        self.r.max(self.g).max(self.b)
    }

    /// Rec. 709 relative luminance.
    #[inline]
    pub fn luminance(&self) -> S {
        S::lit(0.2126) * self.r + S::lit(0.7152) * self.g + S::lit(0.0722) * self.b
    }

    #[inline]
    pub fn is_black(&self) -> bool {
        self.r == S::zero() && self.g == S::zero() && self.b == S::zero()
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }

    pub fn has_nan(&self) -> bool {
        self.r.is_nan() || self.g.is_nan() || self.b.is_nan()
    }

    /// Finite and non-negative in every channel.
    pub fn is_physical(&self) -> bool {
        self.is_finite() && self.r >= S::zero() && self.g >= S::zero() && self.b >= S::zero()
    }

    pub fn map(self, f: impl Fn(S) -> S) -> Self {
        Self::new(f(self.r), f(self.g), f(self.b))
    }
}

impl<S: Real> Add for Spectrum<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.r + o.r, self.g + o.g, self.b + o.b)
    }
}

impl<S: Real> AddAssign for Spectrum<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Real> Mul for Spectrum<S> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.r * o.r, self.g * o.g, self.b * o.b)
    }
}

impl<S: Real> MulAssign for Spectrum<S> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<S: Real> Mul<S> for Spectrum<S> {
    type Output = Self;
    #[inline]
    fn mul(self, s: S) -> Self {
        Self::new(self.r * s, self.g * s, self.b * s)
    }
}

impl<S: Real> MulAssign<S> for Spectrum<S> {
    #[inline]
    fn mul_assign(&mut self, s: S) {
        *self = *self * s;
    }
}
