use serde::{Deserialize, Serialize};

use crate::math::{Ray, UnitVec3, Vec3};
use crate::num::Real;
use crate::rng::Rng;
use crate::surface::{triangle_area, Bvh};

/// Smallest mask a blocked sample can receive.
pub const MASK_FLOOR: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct Emitter<S> {
    pub vertices: [Vec3<S>; 3],
    /// Source intensity `r_src` in `[0, 1]`.
    pub intensity: S,
}

/// Light-source triangles used only for shadow masks.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EmitterSet<S> {
    emitters: Vec<Emitter<S>>,
    cdf: Vec<S>,
}

impl<S: Real> EmitterSet<S> {
    /// Builds the set; intensities are clamped to `[0, 1]` and zero-area
    /// triangles are dropped from sampling.
    pub fn new(emitters: Vec<Emitter<S>>) -> Self {
        let emitters: Vec<Emitter<S>> = emitters
            .into_iter()
            .map(|e| Emitter {
                intensity: e.intensity.clamp_to(S::zero(), S::one()),
                ..e
            })
            .filter(|e| {
                let [a, b, c] = e.vertices;
                triangle_area(a, b, c) > S::zero()
            })
            .collect();
        let mut acc = S::zero();
        let cdf = emitters
            .iter()
            .map(|e| {
                let [a, b, c] = e.vertices;
                acc = acc + triangle_area(a, b, c);
                acc
            })
            .collect();
        Self { emitters, cdf }
    }

    pub fn empty() -> Self {
        Self {
            emitters: Vec::new(),
            cdf: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.emitters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.emitters.len()
    }

    pub fn emitters(&self) -> &[Emitter<S>] {
        &self.emitters
    }

    /// Copy with every intensity replaced by `r`.
    pub fn with_intensity(&self, r: S) -> Self {
        Self::new(
            self.emitters
                .iter()
                .map(|e| Emitter { intensity: r, ..*e })
                .collect(),
        )
    }

    /// Picks a triangle with probability proportional to area, then a
    /// uniform point on it.
    pub fn sample(&self, rng: &mut Rng) -> Option<(&Emitter<S>, Vec3<S>)> {
        let total = *self.cdf.last()?;
        let u = rng.uniform::<S>() * total;
        let i = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.emitters.len() - 1);
        let e = &self.emitters[i];
        let (u1, u2) = (rng.uniform::<S>(), rng.uniform::<S>());
        let su = u1.sqrt();
        let [a, b, c] = e.vertices;
        let p = a * (S::one() - su) + b * (su * (S::one() - u2)) + c * (su * u2);
        Some((e, p))
    }
}

/// Shadow mask at `p`: 1 when unblocked or without emitters, otherwise
/// `1 − r_src` of the sampled emitter, floored at [`MASK_FLOOR`].
///
/// `occluder` selects the meshes that can block; `gap` is kept free at the
/// emitter end so geometry coincident with the emitter does not count.
pub fn shadow_mask<S: Real>(
    p: Vec3<S>,
    emitters: &EmitterSet<S>,
    bvh: &Bvh<S>,
    occluder: impl Fn(usize) -> bool,
    gap: S,
    rng: &mut Rng,
) -> S {
    let Some((e, q)) = emitters.sample(rng) else {
        return S::one();
    };
    let d = q - p;
    let dist = d.length();
    if dist <= gap {
        return S::one();
    }
    let Some(dir) = UnitVec3::new(d) else {
        return S::one();
    };
    let ray = Ray::with_range(p, dir, S::zero(), dist - gap);
    if bvh.occluded(&ray, occluder) {
        (S::one() - e.intensity).clamp_to(S::lit(MASK_FLOOR), S::one())
    } else {
        S::one()
    }
}
