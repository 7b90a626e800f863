//! Emission-absorption quadrature along ray segments.
//!
//! Segments are split into `n = ceil(len / Δt)` equal substeps and sampled at
//! substep midpoints. Substep `i` has opacity `a_i = 1 − exp(−σ_i Δ)`; the
//! gathered radiance is `Σ T_i a_i m_i r_i` and the transmittance `Π (1 − a_i)`.

use super::grid::Medium;
use crate::math::{Ray, Spectrum, Vec3};
use crate::num::Real;
use crate::render::PathState;

/// Effect of marching one segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarchResult<S> {
    /// Transmittance of the marched part, in `(0, 1]`.
    pub throughput_factor: S,
    /// Radiance added to the path over this segment.
    pub radiance_in: Spectrum<S>,
    /// The channel throughput fell below the cut-off before the segment end.
    pub terminated_early: bool,
}

/// Number and length of the substeps covering `[s0, s1]`.
#[inline]
pub fn substeps<S: Real>(s0: S, s1: S, dt: S) -> (usize, S) {
    let len = s1 - s0;
    if len <= S::zero() {
        return (0, S::zero());
    }
    // The tolerance keeps len/dt = 999.9999999 from becoming 1001 substeps.
    let n = (len / dt - S::lit(1e-9))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    (n, len / S::from_usize_lossy(n))
}

#[inline]
fn midpoint<S: Real>(ray: &Ray<S>, a: S, delta: S, i: usize) -> Vec3<S> {
    ray.at(a + (S::from_usize_lossy(i) + S::lit(0.5)) * delta)
}

/// Transmittance `exp(−∫σ)` over `[s0, s1]` by the midpoint product rule.
pub fn transmittance<S: Real, M: Medium<S> + ?Sized>(
    medium: &M,
    ray: &Ray<S>,
    s0: S,
    s1: S,
    dt: S,
) -> S {
    debug_assert!(dt > S::zero());
    let Some((a, b)) = medium.clip(ray, s0, s1) else {
        return S::one();
    };
    let (n, delta) = substeps(a, b, dt);
    let mut t = S::one();
    for i in 0..n {
        let (sigma, _) = medium.sample(midpoint(ray, a, delta, i));
        if sigma > S::zero() {
            t = t * (-sigma * delta).exp();
        }
    }
    t
}

/// Marches `[s0, s1]`, updating the path throughput and radiance.
///
/// `shadow` returns the mask `m ∈ [0, 1]` at a sample point; it only scales
/// the gathered radiance, never the absorption. It is not called at samples
/// with zero density. With `cutoff = Some(c)` the march stops once every
/// channel of the throughput is below `c`.
pub fn march_segment<S, M, F>(
    medium: &M,
    ray: &Ray<S>,
    s0: S,
    s1: S,
    dt: S,
    state: &mut PathState<S>,
    mut shadow: F,
    cutoff: Option<S>,
) -> MarchResult<S>
where
    S: Real,
    M: Medium<S> + ?Sized,
    F: FnMut(Vec3<S>) -> S,
{
    debug_assert!(dt > S::zero());
    let mut result = MarchResult {
        throughput_factor: S::one(),
        radiance_in: Spectrum::black(),
        terminated_early: false,
    };
    let Some((a, b)) = medium.clip(ray, s0, s1) else {
        return result;
    };
    let (n, delta) = substeps(a, b, dt);
    for i in 0..n {
        let p = midpoint(ray, a, delta, i);
        let (sigma, radiance) = medium.sample(p);
        if sigma <= S::zero() {
            continue;
        }
        let tau = (-sigma * delta).exp();
        let alpha = -(-sigma * delta).exp_m1();
        let m = shadow(p);
        debug_assert!(
            (S::zero()..=S::one()).contains(&m),
            "shadow mask {m} out of range"
        );
        let gathered = state.t_spec * (radiance * (alpha * m));
        state.l += gathered;
        result.radiance_in += gathered;
        state.t_spec *= tau;
        state.t = state.t * tau;
        result.throughput_factor = result.throughput_factor * tau;
        if let Some(c) = cutoff {
            if state.t_spec.max_channel() < c {
                result.terminated_early = true;
                break;
            }
        }
    }
    result
}
