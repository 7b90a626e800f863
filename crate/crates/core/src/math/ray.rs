use super::{UnitVec3, Vec3};
use crate::num::Real;

/// Parametric ray `origin + t·dir`, `t ∈ [t_min, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray<S> {
    pub origin: Vec3<S>,
    pub dir: UnitVec3<S>,
    pub t_min: S,
    pub t_max: S,
}

impl<S: Real> Ray<S> {
    pub fn new(origin: Vec3<S>, dir: UnitVec3<S>) -> Self {
        Self {
            origin,
            dir,
            t_min: S::zero(),
            t_max: S::infinity(),
        }
    }

    pub fn with_range(origin: Vec3<S>, dir: UnitVec3<S>, t_min: S, t_max: S) -> Self {
        debug_assert!(t_min >= S::zero() && t_max > t_min);
        Self {
            origin,
            dir,
            t_min,
            t_max,
        }
    }

    #[inline]
    pub fn at(&self, t: S) -> Vec3<S> {
        self.origin + self.dir.get() * t
    }
}
