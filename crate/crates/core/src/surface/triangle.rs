use crate::math::Vec3;
use crate::num::Real;

/// Slack on barycentric bounds so rays through shared edges do not leak.
pub const BARY_EPS: f64 = 1e-7;

/// Möller–Trumbore. Returns `(t, u, v)` for `t` strictly inside `(t_min, t_max)`.
#[inline]
pub fn intersect_triangle<S: Real>(
    origin: Vec3<S>,
    dir: Vec3<S>,
    t_min: S,
    t_max: S,
    v0: Vec3<S>,
    v1: Vec3<S>,
    v2: Vec3<S>,
) -> Option<(S, S, S)> {
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let p = dir.cross(e2);
    let det = e1.dot(p);
    let scale = e1.length_squared().max(e2.length_squared());
    if det.abs() <= S::epsilon() * scale || det == S::zero() {
        return None;
    }
    let inv = S::one() / det;
    let s = origin - v0;
    let u = s.dot(p) * inv;
    let eps = S::lit(BARY_EPS);
    if u < -eps || u > S::one() + eps {
        return None;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v < -eps || u + v > S::one() + eps {
        return None;
    }
    let t = e2.dot(q) * inv;
    if t > t_min && t < t_max {
        Some((t, u, v))
    } else {
        None
    }
}

/// Closest point on triangle `abc` to `p` (Ericson, Real-Time Collision Detection).
pub fn closest_point_on_triangle<S: Real>(
    p: Vec3<S>,
    a: Vec3<S>,
    b: Vec3<S>,
    c: Vec3<S>,
) -> Vec3<S> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= S::zero() && d2 <= S::zero() {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= S::zero() && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= S::zero() && d1 >= S::zero() && d3 <= S::zero() {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= S::zero() && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= S::zero() && d2 >= S::zero() && d6 <= S::zero() {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= S::zero() && (d4 - d3) >= S::zero() && (d5 - d6) >= S::zero() {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = S::one() / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn triangle_area<S: Real>(a: Vec3<S>, b: Vec3<S>, c: Vec3<S>) -> S {
    (b - a).cross(c - a).length() * S::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_point_regions() {
        let a = Vec3::new(0.0f64, 0.0, 0.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        let c = Vec3::new(0.0, 1.0, 0.0);
        let q = closest_point_on_triangle(Vec3::new(0.2, 0.2, 3.0), a, b, c);
        assert!((q - Vec3::new(0.2, 0.2, 0.0)).length() < 1e-12);
        assert_eq!(
            closest_point_on_triangle(Vec3::new(-1.0, -1.0, 0.0), a, b, c),
            a
        );
        let q = closest_point_on_triangle(Vec3::new(0.5, -2.0, 1.0), a, b, c);
        assert!((q - Vec3::new(0.5, 0.0, 0.0)).length() < 1e-12);
        let q = closest_point_on_triangle(Vec3::new(1.0, 1.0, 0.0), a, b, c);
        assert!((q - Vec3::new(0.5, 0.5, 0.0)).length() < 1e-12);
    }

    #[test]
    fn ray_hits_and_misses() {
        let a = Vec3::new(-1.0f64, -1.0, 0.0);
        let b = Vec3::new(1.0, -1.0, 0.0);
        let c = Vec3::new(0.0, 1.0, 0.0);
        let hit = intersect_triangle(
            Vec3::new(0.0, 0.0, -2.0),
            Vec3::unit_z(),
            0.0,
            f64::INFINITY,
            a,
            b,
            c,
        );
        assert!((hit.unwrap().0 - 2.0).abs() < 1e-12);
        let parallel = intersect_triangle(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::unit_x(),
            0.0,
            f64::INFINITY,
            a,
            b,
            c,
        );
        assert!(parallel.is_none());
    }
}
