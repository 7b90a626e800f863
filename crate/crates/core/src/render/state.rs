use crate::math::Spectrum;
use crate::num::Real;

/// Quantities carried along one camera path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathState<S> {
    /// Accumulated medium transmittance (scalar part of the throughput).
    pub t: S,
    /// Channel throughput: product of BSDF weights and transmittances.
    pub t_spec: Spectrum<S>,
    /// Radiance gathered so far.
    pub l: Spectrum<S>,
    /// Surface interactions so far.
    pub bounce: u32,
}

impl<S: Real> PathState<S> {
    /// Throughput one, radiance zero.
    pub fn new() -> Self {
        Self {
            t: S::one(),
            t_spec: Spectrum::splat(S::one()),
            l: Spectrum::black(),
            bounce: 0,
        }
    }
}

impl<S: Real> Default for PathState<S> {
    fn default() -> Self {
        Self::new()
    }
}
