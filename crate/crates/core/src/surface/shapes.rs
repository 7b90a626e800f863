//! Procedural meshes: cubes, icospheres and quads.

use std::collections::HashMap;

use crate::math::Vec3;
use crate::num::Real;

/// Axis-aligned cube as 12 triangles over 8 shared vertices. Faces wind
/// outward, or inward when `inward` is set (a room seen from inside).
pub fn cube<S: Real>(min: Vec3<S>, max: Vec3<S>, inward: bool) -> (Vec<Vec3<S>>, Vec<[u32; 3]>) {
    let v = (0..8)
        .map(|c| {
            Vec3::new(
                if c & 1 == 0 { min.x } else { max.x },
                if c & 2 == 0 { min.y } else { max.y },
                if c & 4 == 0 { min.z } else { max.z },
            )
        })
        .collect();
    // Outward counter-clockwise quads: -x, +x, -y, +y, -z, +z.
    let quads: [[u32; 4]; 6] = [
        [0, 4, 6, 2],
        [1, 3, 7, 5],
        [0, 1, 5, 4],
        [2, 6, 7, 3],
        [0, 2, 3, 1],
        [4, 5, 7, 6],
    ];
    let mut f = Vec::with_capacity(12);
    for q in quads {
        let (t0, t1) = ([q[0], q[1], q[2]], [q[0], q[2], q[3]]);
        if inward {
            f.push([t0[0], t0[2], t0[1]]);
            f.push([t1[0], t1[2], t1[1]]);
        } else {
            f.push(t0);
            f.push(t1);
        }
    }
    (v, f)
}

/// Geodesic sphere: an icosahedron subdivided `level` times, vertices on the
/// sphere, faces wound outward, vertices shared (watertight).
pub fn icosphere<S: Real>(center: Vec3<S>, radius: S, level: u32) -> (Vec<Vec3<S>>, Vec<[u32; 3]>) {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3<f64>> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vec3::new(p[0], p[1], p[2]).try_normalize().unwrap())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Vec3<f64>>| -> u32 {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let p = (verts[a as usize] + verts[b as usize])
                    .try_normalize()
                    .unwrap();
                verts.push(p);
                (verts.len() - 1) as u32
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let v = verts
        .into_iter()
        .map(|p| center + Vec3::new(S::lit(p.x), S::lit(p.y), S::lit(p.z)) * radius)
        .collect();
    (v, faces)
}

/// Rectangle `center ± u ± v` as two triangles, front face along `u × v`.
pub fn quad<S: Real>(center: Vec3<S>, u: Vec3<S>, v: Vec3<S>) -> (Vec<Vec3<S>>, Vec<[u32; 3]>) {
    let verts = vec![
        center - u - v,
        center + u - v,
        center + u + v,
        center - u + v,
    ];
    (verts, vec![[0, 1, 2], [0, 2, 3]])
}

/// Regular `nx × ny` particle grid in the plane through `origin` spanned by
/// `u` and `v` (full edge vectors); returns vertices and triangles.
pub fn grid_sheet<S: Real>(
    origin: Vec3<S>,
    u: Vec3<S>,
    v: Vec3<S>,
    nx: usize,
    ny: usize,
) -> (Vec<Vec3<S>>, Vec<[u32; 3]>) {
    assert!(nx >= 2 && ny >= 2);
    let mut verts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let a = S::from_usize_lossy(i) / S::from_usize_lossy(nx - 1);
            let b = S::from_usize_lossy(j) / S::from_usize_lossy(ny - 1);
            verts.push(origin + u * a + v * b);
        }
    }
    let mut faces = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let i0 = (j * nx + i) as u32;
            let i1 = i0 + 1;
            let i2 = i0 + nx as u32;
            let i3 = i2 + 1;
            faces.push([i0, i1, i3]);
            faces.push([i0, i3, i2]);
        }
    }
    (verts, faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_normals_point_outward() {
        let (v, f) = cube::<f64>(Vec3::splat(-1.0), Vec3::splat(1.0), false);
        assert_eq!(f.len(), 12);
        for t in &f {
            let (a, b, c) = (v[t[0] as usize], v[t[1] as usize], v[t[2] as usize]);
            let n = (b - a).cross(c - a);
            let centroid = (a + b + c) / 3.0;
            assert!(n.dot(centroid) > 0.0);
        }
        let (vi, fi) = cube::<f64>(Vec3::splat(-1.0), Vec3::splat(1.0), true);
        for t in &fi {
            let (a, b, c) = (vi[t[0] as usize], vi[t[1] as usize], vi[t[2] as usize]);
            assert!((b - a).cross(c - a).dot(a + b + c) < 0.0);
        }
    }

    #[test]
    fn icosphere_counts_and_orientation() {
        let (v, f) = icosphere::<f64>(Vec3::zero(), 2.0, 2);
        assert_eq!(f.len(), 320);
        assert_eq!(v.len(), 162);
        for p in &v {
            assert!((p.length() - 2.0).abs() < 1e-12);
        }
        for t in &f {
            let (a, b, c) = (v[t[0] as usize], v[t[1] as usize], v[t[2] as usize]);
            assert!((b - a).cross(c - a).dot(a + b + c) > 0.0);
        }
    }
}
