use thiserror::Error;

use super::lattice::Lattice;
use crate::math::{Aabb, Ray, Spectrum, Transform, Vec3};
use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid resolution {0:?} must be at least 2 nodes per axis")]
    Resolution([usize; 3]),
    #[error("grid bounding box must have positive finite extent")]
    BoundingBox,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("density at node {0} is negative or non-finite")]
    Density(usize),
    #[error("radiance at node {0} is negative or non-finite")]
    Radiance(usize),
    #[error("signed distance at node {0} is non-finite")]
    Distance(usize),
}

/// Dense grid of density and view-independent linear radiance, sampled at
/// lattice nodes and trilinearly interpolated. Vacuum outside its box.
#[derive(Clone, Debug, PartialEq)]
pub struct RadianceGrid<S> {
    lattice: Lattice<S>,
    sigma: Vec<S>,
    radiance: Vec<Spectrum<S>>,
    /// Placement of the field in the world; queries go through its inverse.
    pub world_from_field: Transform<S>,
}

impl<S: Real> RadianceGrid<S> {
    pub fn new(
        bbox: Aabb<S>,
        res: [usize; 3],
        sigma: Vec<S>,
        radiance: Vec<Spectrum<S>>,
    ) -> Result<Self, GridError> {
        let lattice = Lattice::new(bbox, res);
        if res.iter().any(|&n| n < 2) {
            return Err(GridError::Resolution(res));
        }
        if !bbox.is_valid_volume() {
            return Err(GridError::BoundingBox);
        }
        let n = lattice.len();
        if sigma.len() != n {
            return Err(GridError::Length {
                expected: n,
                got: sigma.len(),
            });
        }
        if radiance.len() != n {
            return Err(GridError::Length {
                expected: n,
                got: radiance.len(),
            });
        }
        if let Some(i) = sigma
            .iter()
            .position(|s| !(s.is_finite() && *s >= S::zero()))
        {
            return Err(GridError::Density(i));
        }
        if let Some(i) = radiance.iter().position(|r| !r.is_physical()) {
            return Err(GridError::Radiance(i));
        }
        Ok(Self {
            lattice,
            sigma,
            radiance,
            world_from_field: Transform::identity(),
        })
    }

    /// Grid whose node values come from a function of the node position.
    pub fn from_fn(
        bbox: Aabb<S>,
        res: [usize; 3],
        f: impl Fn(Vec3<S>) -> (S, Spectrum<S>),
    ) -> Result<Self, GridError> {
        let lattice = Lattice::new(bbox, res);
        if !lattice.is_valid() {
            return Err(if bbox.is_valid_volume() {
                GridError::Resolution(res)
            } else {
                GridError::BoundingBox
            });
        }
        let (sigma, radiance) = (0..lattice.len())
            .map(|idx| {
                let [i, j, k] = lattice.coords(idx);
                f(lattice.node_position(i, j, k))
            })
            .unzip();
        Self::new(bbox, res, sigma, radiance)
    }

    pub fn with_transform(mut self, world_from_field: Transform<S>) -> Self {
        self.world_from_field = world_from_field;
        self
    }

    pub fn lattice(&self) -> &Lattice<S> {
        &self.lattice
    }

    pub fn bbox(&self) -> Aabb<S> {
        self.lattice.bbox
    }

    pub fn res(&self) -> [usize; 3] {
        self.lattice.res
    }

    pub fn sigma(&self) -> &[S] {
        &self.sigma
    }

    pub fn radiance(&self) -> &[Spectrum<S>] {
        &self.radiance
    }

    pub fn max_sigma(&self) -> S {
        self.sigma.iter().fold(S::zero(), |m, &s| m.max(s))
    }

    /// Density and radiance in field coordinates. Radiance is black wherever
    /// the density is zero, since it contributes nothing there.
    #[inline]
    pub fn sample_local(&self, p: Vec3<S>) -> (S, Spectrum<S>) {
        let Some(cell) = self.lattice.locate(p) else {
            return (S::zero(), Spectrum::black());
        };
        let sigma = self.lattice.trilinear(&cell, |i| self.sigma[i]);
        if sigma <= S::zero() {
            return (S::zero(), Spectrum::black());
        }
        (sigma, self.lattice.trilinear(&cell, |i| self.radiance[i]))
    }

    /// Density and radiance at a world-space point.
    #[inline]
    pub fn sample(&self, p_world: Vec3<S>) -> (S, Spectrum<S>) {
        self.sample_local(self.world_from_field.transform_point(p_world, true))
    }

    /// World-space bounds of the transformed box.
    pub fn world_bounds(&self) -> Aabb<S> {
        let b = self.bbox();
        let mut out = Aabb::empty();
        for c in 0..8 {
            let p = Vec3::new(
                if c & 1 == 0 { b.min.x } else { b.max.x },
                if c & 2 == 0 { b.min.y } else { b.max.y },
                if c & 4 == 0 { b.min.z } else { b.max.z },
            );
            out.grow(self.world_from_field.transform_point(p, false));
        }
        out
    }

    /// Sub-interval of `[s0, s1]` along the ray that lies inside the box.
    pub fn clip(&self, ray: &Ray<S>, s0: S, s1: S) -> Option<(S, S)> {
        let o = self.world_from_field.transform_point(ray.origin, true);
        let d = self.world_from_field.transform_vector(ray.dir.get(), true);
        self.bbox().intersect_param(o, d, s0, s1)
    }
}

/// Something a ray can be marched through.
pub trait Medium<S: Real> {
    /// Density and radiance at a world-space point.
    fn sample(&self, p: Vec3<S>) -> (S, Spectrum<S>);
    /// Part of `[s0, s1]` where the density may be non-zero.
    fn clip(&self, ray: &Ray<S>, s0: S, s1: S) -> Option<(S, S)>;
}

impl<S: Real> Medium<S> for RadianceGrid<S> {
    #[inline]
    fn sample(&self, p: Vec3<S>) -> (S, Spectrum<S>) {
        RadianceGrid::sample(self, p)
    }

    fn clip(&self, ray: &Ray<S>, s0: S, s1: S) -> Option<(S, S)> {
        RadianceGrid::clip(self, ray, s0, s1)
    }
}

/// Several fields composited: densities add, radiance is density-weighted.
impl<S: Real> Medium<S> for [RadianceGrid<S>] {
    #[inline]
    fn sample(&self, p: Vec3<S>) -> (S, Spectrum<S>) {
        match self {
            [] => (S::zero(), Spectrum::black()),
            [only] => only.sample(p),
            many => {
                let mut sigma = S::zero();
                let mut weighted = Spectrum::black();
                for g in many {
                    let (s, r) = g.sample(p);
                    sigma = sigma + s;
                    weighted += r * s;
                }
                if sigma > S::zero() {
                    (sigma, weighted * (S::one() / sigma))
                } else {
                    (S::zero(), Spectrum::black())
                }
            }
        }
    }

    fn clip(&self, ray: &Ray<S>, s0: S, s1: S) -> Option<(S, S)> {
        self.iter()
            .filter_map(|g| g.clip(ray, s0, s1))
            .reduce(|(a0, a1), (b0, b1)| (a0.min(b0), a1.max(b1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{Quat, UnitVec3};

    fn unit_box() -> Aabb<f64> {
        Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0))
    }

    #[test]
    fn exterior_is_vacuum() {
        let g = RadianceGrid::from_fn(unit_box(), [4, 4, 4], |_| {
            (2.0, Spectrum::new(1.0, 0.0, 0.0))
        })
        .unwrap();
        assert_eq!(g.sample(Vec3::new(1.5, 0.0, 0.0)), (0.0, Spectrum::black()));
    }

    #[test]
    fn constant_grid_is_reproduced() {
        let g = RadianceGrid::from_fn(unit_box(), [5, 3, 4], |_| {
            (2.0, Spectrum::new(1.0, 0.0, 0.0))
        })
        .unwrap();
        for p in [
            Vec3::new(0.1, -0.3, 0.77),
            Vec3::new(-1.0, 1.0, 1.0),
            Vec3::zero(),
        ] {
            let (s, r) = g.sample(p);
            assert!((s - 2.0).abs() < 1e-14);
            assert!((r.r - 1.0).abs() < 1e-14 && r.g == 0.0 && r.b == 0.0);
        }
    }

    #[test]
    fn midpoint_between_nodes_is_mean() {
        // σ = 3 + 2x at the nodes; halfway between two nodes the trilinear
        // weights are (1/2, 1/2).
        let g = RadianceGrid::from_fn(unit_box(), [5, 2, 2], |p| {
            (3.0 + 2.0 * p.x, Spectrum::black())
        })
        .unwrap();
        let h = g.lattice().spacing().x;
        let x0 = -1.0 + h;
        let x1 = x0 + h;
        let (s, _) = g.sample(Vec3::new(0.5 * (x0 + x1), 0.2, -0.4));
        let mean = 0.5 * ((3.0 + 2.0 * x0) + (3.0 + 2.0 * x1));
        assert!((s - mean).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            RadianceGrid::new(
                unit_box(),
                [1, 2, 2],
                vec![0.0; 4],
                vec![Spectrum::black(); 4]
            ),
            Err(GridError::Resolution([1, 2, 2]))
        );
        assert_eq!(
            RadianceGrid::new(
                unit_box(),
                [2, 2, 2],
                vec![0.0; 7],
                vec![Spectrum::black(); 8]
            ),
            Err(GridError::Length {
                expected: 8,
                got: 7
            })
        );
        let mut s = vec![0.0; 8];
        s[3] = -1.0;
        assert_eq!(
            RadianceGrid::new(unit_box(), [2, 2, 2], s, vec![Spectrum::black(); 8]),
            Err(GridError::Density(3))
        );
    }

    #[test]
    fn rotated_field_is_queried_in_body_frame() {
        let g = RadianceGrid::from_fn(unit_box(), [9, 9, 9], |p| {
            (
                1.0 + p.x + 0.5 * p.y * p.y,
                Spectrum::new(p.z + 1.0, 0.5, 0.25),
            )
        })
        .unwrap();
        let q = Quat::from_axis_angle(Vec3::new(0.2, 1.0, -0.4), 1.1);
        let t = Transform::rigid(q, Vec3::new(0.5, -2.0, 3.0));
        let moved = g.clone().with_transform(t);
        for p in [Vec3::new(0.3, -0.2, 0.5), Vec3::new(-0.7, 0.6, 0.1)] {
            let (s0, r0) = g.sample(p);
            let (s1, r1) = moved.sample(t.transform_point(p, false));
            assert!((s0 - s1).abs() < 1e-9);
            assert!((r0.r - r1.r).abs() < 1e-9);
        }
    }

    #[test]
    fn clip_against_box() {
        let g = RadianceGrid::from_fn(unit_box(), [2, 2, 2], |_| (1.0, Spectrum::black())).unwrap();
        let ray = Ray::new(Vec3::new(0.0, 0.0, -5.0), UnitVec3::z_axis());
        let (a, b) = g.clip(&ray, 0.0, f64::INFINITY).unwrap();
        assert!((a - 4.0).abs() < 1e-12 && (b - 6.0).abs() < 1e-12);
        let miss = Ray::new(Vec3::new(3.0, 0.0, -5.0), UnitVec3::z_axis());
        assert!(g.clip(&miss, 0.0, f64::INFINITY).is_none());
    }
}
