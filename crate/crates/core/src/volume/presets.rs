//! Analytic grids used by tests, examples and the asset generator.

use super::grid::{GridError, RadianceGrid};
use super::sdf::SdfGrid;
use crate::math::{Aabb, Spectrum, Vec3};
use crate::num::Real;

/// Constant density and radiance over a box.
pub fn uniform_box<S: Real>(
    bbox: Aabb<S>,
    res: [usize; 3],
    sigma: S,
    radiance: Spectrum<S>,
) -> Result<RadianceGrid<S>, GridError> {
    RadianceGrid::from_fn(bbox, res, |_| (sigma, radiance))
}

/// Slab `z ∈ [0, 1]`, `|x|, |y| ≤ 2`, σ = 1, white radiance.
pub fn smoke_slab<S: Real>() -> RadianceGrid<S> {
    uniform_box(
        Aabb::new(
            Vec3::from_f64([-2.0, -2.0, 0.0]),
            Vec3::from_f64([2.0, 2.0, 1.0]),
        ),
        [2, 2, 2],
        S::one(),
        Spectrum::splat(S::one()),
    )
    .expect("valid preset")
}

/// Solid emissive ball of radius `radius` centred in a cube of half-size `1.25·radius`.
pub fn sphere<S: Real>(
    radius: S,
    res: usize,
    sigma: S,
    radiance: Spectrum<S>,
) -> Result<RadianceGrid<S>, GridError> {
    let h = radius * S::lit(1.25);
    RadianceGrid::from_fn(Aabb::new(Vec3::splat(-h), Vec3::splat(h)), [res; 3], |p| {
        if p.length() <= radius {
            (sigma, radiance)
        } else {
            (S::zero(), Spectrum::black())
        }
    })
}

/// Emissive absorbing shell: vacuum inside `inner_radius`, density `sigma`
/// outside it up to the faces of a cube of half-size `half_extent`. Radiance
/// is uniform everywhere.
pub fn furnace_shell<S: Real>(
    inner_radius: S,
    half_extent: S,
    res: usize,
    sigma: S,
    radiance: Spectrum<S>,
) -> Result<RadianceGrid<S>, GridError> {
    RadianceGrid::from_fn(
        Aabb::new(Vec3::splat(-half_extent), Vec3::splat(half_extent)),
        [res; 3],
        |p| {
            if p.length() < inner_radius {
                (S::zero(), radiance)
            } else {
                (sigma, radiance)
            }
        },
    )
}

/// Two rooms side by side along x, separated by a dark partition: the left
/// room holds thin bluish haze, the right one a dense warm glow near its
/// ceiling.
pub fn two_room<S: Real>(res: usize) -> Result<RadianceGrid<S>, GridError> {
    let bbox = Aabb::new(
        Vec3::from_f64([-2.0, -1.0, 0.0]),
        Vec3::from_f64([2.0, 1.0, 2.0]),
    );
    let nx = res.max(4);
    let ny = (res / 2).max(2);
    let nz = (res / 2).max(2);
    RadianceGrid::from_fn(bbox, [nx, ny, nz], |p| {
        let wall = p.x.abs() < S::lit(0.1) && p.z < S::lit(1.6);
        if wall {
            (S::lit(40.0), Spectrum::from_f64([0.02, 0.02, 0.02]))
        } else if p.x < S::zero() {
            (S::lit(0.15), Spectrum::from_f64([0.3, 0.45, 0.9]))
        } else {
            let glow = (-(p.z - S::lit(1.7)).powi(2) * S::lit(8.0)).exp();
            (
                S::lit(0.1) + S::lit(2.0) * glow,
                Spectrum::from_f64([3.0, 2.0, 1.0]) * (S::lit(0.2) + glow),
            )
        }
    })
}

/// Exact sphere distance sampled on a cube of half-size `1.5·radius`.
pub fn sphere_sdf<S: Real>(radius: S, res: usize) -> Result<SdfGrid<S>, GridError> {
    let h = radius * S::lit(1.5);
    SdfGrid::from_fn(Aabb::new(Vec3::splat(-h), Vec3::splat(h)), [res; 3], |p| {
        p.length() - radius
    })
}

/// Exact box distance for half-sizes `half`, sampled on a cube twice as large.
pub fn box_sdf<S: Real>(half: Vec3<S>, res: usize) -> Result<SdfGrid<S>, GridError> {
    let ext = half * S::lit(2.0);
    SdfGrid::from_fn(Aabb::new(-ext, ext), [res; 3], |p| {
        let q = p.abs() - half;
        let outside = q.max_elem(Vec3::zero()).length();
        let inside = q.max_component().min(S::zero());
        outside + inside
    })
}

/// Ground plane `z = 0` (negative below) over `bbox`.
pub fn plane_sdf<S: Real>(bbox: Aabb<S>, res: [usize; 3]) -> Result<SdfGrid<S>, GridError> {
    SdfGrid::from_fn(bbox, res, |p| p.z)
}
