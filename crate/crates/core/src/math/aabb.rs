use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::num::Real;

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<S> {
    pub min: Vec3<S>,
    pub max: Vec3<S>,
}

impl<S: Real> Aabb<S> {
    pub fn new(min: Vec3<S>, max: Vec3<S>) -> Self {
        Self { min, max }
    }

    /// Box that contains nothing; the identity for [`Aabb::union`].
    pub fn empty() -> Self {
        Self {
            min: Vec3::splat(S::infinity()),
            max: Vec3::splat(S::neg_infinity()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    /// Every extent is strictly positive and finite.
    pub fn is_valid_volume(&self) -> bool {
        self.min.is_finite()
            && self.max.is_finite()
            && self.max.x > self.min.x
            && self.max.y > self.min.y
            && self.max.z > self.min.z
    }

    pub fn grow(&mut self, p: Vec3<S>) {
        self.min = self.min.min_elem(p);
        self.max = self.max.max_elem(p);
    }

    pub fn union(&self, o: &Self) -> Self {
        Self {
            min: self.min.min_elem(o.min),
            max: self.max.max_elem(o.max),
        }
    }

    pub fn extent(&self) -> Vec3<S> {
        self.max - self.min
    }

    pub fn diagonal(&self) -> S {
        if self.is_empty() {
            S::zero()
        } else {
            self.extent().length()
        }
    }

    pub fn center(&self) -> Vec3<S> {
        (self.min + self.max) * S::lit(0.5)
    }

    #[inline]
    pub fn contains(&self, p: Vec3<S>) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn clamp_point(&self, p: Vec3<S>) -> Vec3<S> {
        p.max_elem(self.min).min_elem(self.max)
    }

    /// Slab test on an arbitrary (not necessarily unit) direction; returns the
    /// overlap of `[t0, t1]` with the box interval.
    #[inline]
    pub fn intersect_param(&self, origin: Vec3<S>, dir: Vec3<S>, t0: S, t1: S) -> Option<(S, S)> {
        let mut lo = t0;
        let mut hi = t1;
        for a in 0..3 {
            let inv = S::one() / dir[a];
            let mut ta = (self.min[a] - origin[a]) * inv;
            let mut tb = (self.max[a] - origin[a]) * inv;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            // NaN from 0·inf (origin on a slab plane, parallel ray) keeps the bound.
            if ta > lo {
                lo = ta;
            }
            if tb < hi {
                hi = tb;
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }
}
