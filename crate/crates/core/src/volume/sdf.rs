//! Signed distance grids: queries with penetration normals, and baking from
//! triangle meshes or thresholded density fields.

use std::collections::HashMap;

use rayon::prelude::*;

use super::grid::{GridError, RadianceGrid};
use super::lattice::Lattice;
use crate::math::{Aabb, UnitVec3, Vec3};
use crate::num::Real;
use crate::surface::{closest_point_on_triangle, intersect_triangle};

/// Dense signed distance samples (negative inside), trilinearly interpolated.
#[derive(Clone, Debug, PartialEq)]
pub struct SdfGrid<S> {
    lattice: Lattice<S>,
    phi: Vec<S>,
}

/// Distance and outward normal at a point. `normal` is `None` where the
/// gradient vanishes; callers treat that as no contact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdfSample<S> {
    pub phi: S,
    pub normal: Option<UnitVec3<S>>,
}

impl<S: Real> SdfGrid<S> {
    pub fn new(bbox: Aabb<S>, res: [usize; 3], phi: Vec<S>) -> Result<Self, GridError> {
        let lattice = Lattice::new(bbox, res);
        if res.iter().any(|&n| n < 2) {
            return Err(GridError::Resolution(res));
        }
        if !bbox.is_valid_volume() {
            return Err(GridError::BoundingBox);
        }
        if phi.len() != lattice.len() {
            return Err(GridError::Length {
                expected: lattice.len(),
                got: phi.len(),
            });
        }
        if let Some(i) = phi.iter().position(|v| !v.is_finite()) {
            return Err(GridError::Distance(i));
        }
        Ok(Self { lattice, phi })
    }

    /// Samples an analytic distance function at the lattice nodes.
    pub fn from_fn(
        bbox: Aabb<S>,
        res: [usize; 3],
        f: impl Fn(Vec3<S>) -> S + Sync,
    ) -> Result<Self, GridError> {
        let lattice = Lattice::new(bbox, res);
        if !lattice.is_valid() {
            return Err(if bbox.is_valid_volume() {
                GridError::Resolution(res)
            } else {
                GridError::BoundingBox
            });
        }
        let phi = (0..lattice.len())
            .into_par_iter()
            .map(|idx| {
                let [i, j, k] = lattice.coords(idx);
                f(lattice.node_position(i, j, k))
            })
            .collect();
        Self::new(bbox, res, phi)
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

    pub fn values(&self) -> &[S] {
        &self.phi
    }

    /// Interpolated distance. Outside the box: distance to the box plus the
    /// (non-negative part of the) boundary value, so the exterior is never
    /// reported as penetrating.
    pub fn distance(&self, p: Vec3<S>) -> S {
        let bbox = self.lattice.bbox;
        let q = bbox.clamp_point(p);
        let cell = self
            .lattice
            .locate(q)
            .expect("clamped point lies inside the lattice");
        let inside = self.lattice.trilinear(&cell, |i| self.phi[i]);
        if q == p {
            inside
        } else {
            inside.max(S::zero()) + (p - q).length()
        }
    }

    /// Distance and central-difference normal (one cell spacing).
    pub fn query(&self, p: Vec3<S>) -> SdfSample<S> {
        let phi = self.distance(p);
        let h = self.lattice.spacing();
        let mut grad = Vec3::zero();
        let bbox = self.lattice.bbox;
        let inside = bbox.contains(p);
        for a in 0..3 {
            let mut off = Vec3::zero();
            off[a] = h[a];
            let (mut lo, mut hi) = (p - off, p + off);
            // Stay on the sampled data near the faces; one-sided there.
            if inside {
                lo = bbox.clamp_point(lo);
                hi = bbox.clamp_point(hi);
            }
            let span = hi[a] - lo[a];
            if span > S::zero() {
                grad[a] = (self.distance(hi) - self.distance(lo)) / span;
            }
        }
        let normal = if grad.length() > S::lit(1e-9) {
            UnitVec3::new(grad)
        } else {
            None
        };
        SdfSample { phi, normal }
    }
}

fn is_watertight(indices: &[[u32; 3]]) -> bool {
    let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
    for tri in indices {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    !indices.is_empty() && edges.values().all(|&c| c == 2)
}

/// Directions for the inside test; skewed so they rarely graze edges.
fn parity_directions<S: Real>() -> [Vec3<S>; 3] {
    [
        Vec3::from_f64([0.5773, 0.5801, 0.5745]),
        Vec3::from_f64([-0.6112, 0.4987, 0.6143]),
        Vec3::from_f64([0.3021, -0.8127, 0.4981]),
    ]
}

/// Bakes a distance grid from a triangle mesh by brute force: unsigned
/// distance is the minimum point-triangle distance, the sign comes from a
/// majority vote of three crossing-parity rays. Non-watertight meshes get a
/// warning and an all-positive field.
pub fn bake_sdf_from_mesh<S: Real>(
    vertices: &[Vec3<S>],
    indices: &[[u32; 3]],
    bbox: Aabb<S>,
    res: [usize; 3],
) -> Result<SdfGrid<S>, GridError> {
    let watertight = is_watertight(indices);
    if !watertight {
        log::warn!("mesh is not watertight; baked distances are unsigned");
    }
    let tris: Vec<[Vec3<S>; 3]> = indices
        .iter()
        .map(|t| {
            [
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            ]
        })
        .collect();
    let dirs = parity_directions::<S>();
    SdfGrid::from_fn(bbox, res, |p| {
        let mut best = S::infinity();
        for t in &tris {
            let d = (closest_point_on_triangle(p, t[0], t[1], t[2]) - p).length_squared();
            if d < best {
                best = d;
            }
        }
        let dist = best.sqrt();
        if !watertight {
            return dist;
        }
        let votes = dirs
            .iter()
            .filter(|d| {
                let crossings = tris
                    .iter()
                    .filter(|t| {
                        intersect_triangle(p, **d, S::zero(), S::infinity(), t[0], t[1], t[2])
                            .is_some()
                    })
                    .count();
                crossings % 2 == 1
            })
            .count();
        if votes >= 2 {
            -dist
        } else {
            dist
        }
    })
}

/// Points where the density crosses `threshold` along lattice edges, in
/// field coordinates.
pub fn density_isosurface_points<S: Real>(field: &RadianceGrid<S>, threshold: S) -> Vec<Vec3<S>> {
    let lat = field.lattice();
    let sigma = field.sigma();
    let mut pts = Vec::new();
    for k in 0..lat.res[2] {
        for j in 0..lat.res[1] {
            for i in 0..lat.res[0] {
                let a = lat.index(i, j, k);
                let pa = lat.node_position(i, j, k);
                let neighbors = [
                    (i + 1 < lat.res[0]).then(|| (i + 1, j, k)),
                    (j + 1 < lat.res[1]).then(|| (i, j + 1, k)),
                    (k + 1 < lat.res[2]).then(|| (i, j, k + 1)),
                ];
                for (ni, nj, nk) in neighbors.into_iter().flatten() {
                    let b = lat.index(ni, nj, nk);
                    let (sa, sb) = (sigma[a], sigma[b]);
                    if (sa >= threshold) != (sb >= threshold) {
                        let w = ((threshold - sa) / (sb - sa)).clamp_to(S::zero(), S::one());
                        pts.push(pa.lerp(lat.node_position(ni, nj, nk), w));
                    }
                }
            }
        }
    }
    pts
}

/// Collision distance field for a radiance field: the density is thresholded
/// at `threshold_fraction · max σ` and redistanced to the crossing points.
/// Returns `None` when the threshold produces no surface.
pub fn bake_sdf_from_field<S: Real>(
    field: &RadianceGrid<S>,
    threshold_fraction: S,
) -> Option<SdfGrid<S>> {
    let threshold = field.max_sigma() * threshold_fraction;
    if threshold <= S::zero() {
        return None;
    }
    let surface = density_isosurface_points(field, threshold);
    if surface.is_empty() {
        return None;
    }
    let lat = *field.lattice();
    let sigma = field.sigma();
    let phi = (0..lat.len())
        .into_par_iter()
        .map(|idx| {
            let [i, j, k] = lat.coords(idx);
            let p = lat.node_position(i, j, k);
            let d = surface
                .iter()
                .map(|q| (*q - p).length_squared())
                .fold(S::infinity(), S::min)
                .sqrt();
            if sigma[idx] >= threshold {
                -d
            } else {
                d
            }
        })
        .collect();
    SdfGrid::new(lat.bbox, lat.res, phi).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Spectrum;
    use crate::surface::shapes;

    fn sphere_grid(res: usize) -> SdfGrid<f64> {
        SdfGrid::from_fn(
            Aabb::new(Vec3::splat(-1.5), Vec3::splat(1.5)),
            [res; 3],
            |p| p.length() - 1.0,
        )
        .unwrap()
    }

    #[test]
    fn analytic_sphere_outside_box() {
        let g = sphere_grid(64);
        let s = g.query(Vec3::new(2.0, 0.0, 0.0));
        assert!((s.phi - 1.0).abs() < 0.02);
        let n = s.normal.unwrap();
        assert!((n.get() - Vec3::unit_x()).length() < 0.02);
    }

    #[test]
    fn analytic_sphere_center() {
        let g = sphere_grid(64);
        // The centre is a node only for odd resolutions; use one.
        let g_odd = sphere_grid(65);
        assert!((g_odd.distance(Vec3::zero()) + 1.0).abs() < 0.02);
        // Off-node: trilinear error is bounded by the half cell diagonal.
        let h = g.lattice().spacing().x;
        assert!((g.distance(Vec3::zero()) + 1.0).abs() < 3f64.sqrt() * h / 2.0 + 1e-3);
    }

    #[test]
    fn plane_is_reproduced_exactly() {
        let g = SdfGrid::<f64>::from_fn(
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [9, 9, 9],
            |p| p.z,
        )
        .unwrap();
        for (x, y) in [(0.13, -0.77), (0.5, 0.5), (-0.99, 0.01)] {
            let s = g.query(Vec3::new(x, y, -0.3));
            assert!((s.phi + 0.3).abs() < 1e-12, "{}", s.phi);
            assert!((s.normal.unwrap().get() - Vec3::unit_z()).length() < 1e-9);
        }
    }

    #[test]
    fn flat_field_has_no_normal() {
        let g = SdfGrid::from_fn(
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [4, 4, 4],
            |_| -0.5,
        )
        .unwrap();
        assert!(g.query(Vec3::zero()).normal.is_none());
    }

    #[test]
    fn exterior_is_never_negative() {
        let g = SdfGrid::from_fn(
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [4, 4, 4],
            |p| p.z,
        )
        .unwrap();
        assert!(g.distance(Vec3::new(0.0, 3.0, -0.9)) >= 0.0);
    }

    #[test]
    fn eikonal_on_interior_samples() {
        let g = sphere_grid(48);
        let mut rng = crate::rng::Rng::new(5);
        for _ in 0..200 {
            let p = Vec3::new(
                rng.uniform::<f64>() * 2.0 - 1.0,
                rng.uniform::<f64>() * 2.0 - 1.0,
                rng.uniform::<f64>() * 2.0 - 1.0,
            );
            if p.length() < 0.15 {
                continue;
            }
            let h = g.lattice().spacing().x;
            let grad = Vec3::new(
                g.distance(p + Vec3::new(h, 0.0, 0.0)) - g.distance(p - Vec3::new(h, 0.0, 0.0)),
                g.distance(p + Vec3::new(0.0, h, 0.0)) - g.distance(p - Vec3::new(0.0, h, 0.0)),
                g.distance(p + Vec3::new(0.0, 0.0, h)) - g.distance(p - Vec3::new(0.0, 0.0, h)),
            ) / (2.0 * h);
            assert!((grad.length() - 1.0).abs() < 0.2);
        }
    }

    #[test]
    fn baked_cube() {
        let (v, f) = shapes::cube::<f64>(Vec3::splat(-0.5), Vec3::splat(0.5), false);
        let g = bake_sdf_from_mesh(
            &v,
            &f,
            Aabb::new(Vec3::splat(-2.0), Vec3::splat(2.0)),
            [17, 17, 17],
        )
        .unwrap();
        let diag = g.lattice().spacing().length();
        assert!((g.distance(Vec3::zero()) + 0.5).abs() <= diag);
        // (1.75, 0, 0) is a node; nearest face is x = 0.5.
        assert!((g.distance(Vec3::new(1.75, 0.0, 0.0)) - 1.25).abs() <= diag);
    }

    #[test]
    fn baked_icosphere_matches_sphere() {
        let (v, f) = shapes::icosphere::<f64>(Vec3::zero(), 1.0, 3);
        let g = bake_sdf_from_mesh(
            &v,
            &f,
            Aabb::new(Vec3::splat(-1.5), Vec3::splat(1.5)),
            [64; 3],
        )
        .unwrap();
        let mut rng = crate::rng::Rng::new(11);
        for _ in 0..200 {
            let p = Vec3::new(
                rng.uniform::<f64>() * 3.0 - 1.5,
                rng.uniform::<f64>() * 3.0 - 1.5,
                rng.uniform::<f64>() * 3.0 - 1.5,
            );
            let exact = p.length() - 1.0;
            assert!(
                (g.distance(p) - exact).abs() < 0.05,
                "p={p:?} got {} want {}",
                g.distance(p),
                exact
            );
        }
    }

    #[test]
    fn open_mesh_falls_back_to_unsigned() {
        let v = vec![
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let g = bake_sdf_from_mesh(
            &v,
            &[[0, 1, 2]],
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [5; 3],
        )
        .unwrap();
        assert!(g.values().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn field_threshold_redistance() {
        let field = RadianceGrid::<f64>::from_fn(
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [33; 3],
            |p| (if p.length() <= 0.6 { 4.0 } else { 0.0 }, Spectrum::black()),
        )
        .unwrap();
        let sdf = bake_sdf_from_field(&field, 0.5).unwrap();
        let h = sdf.lattice().spacing().x;
        assert!((sdf.distance(Vec3::zero()) + 0.6).abs() < 2.0 * h);
        assert!((sdf.distance(Vec3::new(0.9, 0.0, 0.0)) - 0.3).abs() < 2.0 * h);
        let empty = RadianceGrid::from_fn(
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [3; 3],
            |_| (0.0, Spectrum::black()),
        )
        .unwrap();
        assert!(bake_sdf_from_field(&empty, 0.5).is_none());
    }
}
