//! Linear to display conversions.

use crate::math::Spectrum;
use crate::num::Real;

/// sRGB opto-electronic transfer function for one channel, clamped to `[0, 1]`.
#[inline]
pub fn srgb_oetf<S: Real>(x: S) -> S {
    debug_assert!(!x.is_nan(), "tone_map on NaN");
    let encoded = if x <= S::lit(0.0031308) {
        S::lit(12.92) * x
    } else {
        S::lit(1.055) * x.powf(S::one() / S::lit(2.4)) - S::lit(0.055)
    };
    encoded.clamp_to(S::zero(), S::one())
}

/// Maps linear radiance to clamped sRGB.
pub fn tone_map<S: Real>(c: Spectrum<S>) -> Spectrum<S> {
    c.map(srgb_oetf)
}

/// Quantizes a `[0, 1]` value to 8 bits, rounding half up.
#[inline]
pub fn quantize_u8<S: Real>(x: S) -> u8 {
    let v = (x.clamp_to(S::zero(), S::one()) * S::lit(255.0) + S::lit(0.5)).floor();
    v.to_u8().unwrap_or(255)
}
