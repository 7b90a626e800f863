use super::mesh::TriangleMesh;
use super::triangle::intersect_triangle;
use crate::math::{Aabb, Ray, UnitVec3, Vec3};
use crate::num::Real;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intersection<S> {
    pub t_hit: S,
    pub point: Vec3<S>,
    /// Geometric normal, flipped to face the incoming ray.
    pub normal: UnitVec3<S>,
    /// The ray struck the side the winding order faces.
    pub front_face: bool,
    pub face_id: usize,
    pub mesh_id: usize,
}

/// World-space triangle with its origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldTriangle<S> {
    pub v: [Vec3<S>; 3],
    pub mesh_id: usize,
    pub face_id: usize,
}

#[derive(Clone, Debug)]
struct Node<S> {
    bbox: Aabb<S>,
    /// Leaf: first primitive; interior: index of the right child (left is `self + 1`).
    offset: usize,
    /// Primitive count, 0 for interior nodes.
    count: usize,
}

/// Binary BVH over all triangles of a scene, flattened in depth-first order.
#[derive(Clone, Debug)]
pub struct Bvh<S> {
    tris: Vec<WorldTriangle<S>>,
    nodes: Vec<Node<S>>,
}

fn tri_bounds<S: Real>(t: &WorldTriangle<S>) -> Aabb<S> {
    let mut b = Aabb::empty();
    for v in t.v {
        b.grow(v);
    }
    b
}

fn centroid<S: Real>(t: &WorldTriangle<S>) -> Vec3<S> {
    (t.v[0] + t.v[1] + t.v[2]) / S::lit(3.0)
}

/// Pads a node box so the barycentric slack of the triangle test can never
/// reach outside it.
fn padded<S: Real>(b: Aabb<S>) -> Aabb<S> {
    let pad = Vec3::splat(b.diagonal() * S::lit(1e-6) + S::min_positive_value().sqrt());
    Aabb::new(b.min - pad, b.max + pad)
}

/// Hit order: nearer first, then lower primitive index.
fn closer<S: Real>(t: S, prim: usize, best: Option<(S, usize)>) -> bool {
    match best {
        None => true,
        Some((bt, bp)) => t < bt || (t == bt && prim < bp),
    }
}

fn make_hit<S: Real>(ray: &Ray<S>, tri: &WorldTriangle<S>, t: S) -> Intersection<S> {
    let n = (tri.v[1] - tri.v[0]).cross(tri.v[2] - tri.v[0]);
    let n = UnitVec3::new(n).unwrap_or(-ray.dir);
    let front_face = n.dot(ray.dir.get()) < S::zero();
    Intersection {
        t_hit: t,
        point: ray.at(t),
        normal: if front_face { n } else { -n },
        front_face,
        face_id: tri.face_id,
        mesh_id: tri.mesh_id,
    }
}

impl<S: Real> Bvh<S> {
    pub fn build(meshes: &[TriangleMesh<S>]) -> Self {
        let mut tris = Vec::new();
        for (mesh_id, m) in meshes.iter().enumerate() {
            for face_id in 0..m.face_count() {
                tris.push(WorldTriangle {
                    v: m.world_triangle(face_id),
                    mesh_id,
                    face_id,
                });
            }
        }
        Self::from_triangles(tris)
    }

    pub fn from_triangles(mut tris: Vec<WorldTriangle<S>>) -> Self {
        let mut nodes = Vec::new();
        if !tris.is_empty() {
            let n = tris.len();
            Self::split(&mut tris, 0, n, &mut nodes);
        }
        Self { tris, nodes }
    }

    fn split(
        tris: &mut [WorldTriangle<S>],
        start: usize,
        end: usize,
        nodes: &mut Vec<Node<S>>,
    ) -> usize {
        let slice = &mut tris[start..end];
        let mut bbox = Aabb::empty();
        let mut cbox = Aabb::empty();
        for t in slice.iter() {
            bbox = bbox.union(&tri_bounds(t));
            cbox.grow(centroid(t));
        }
        let me = nodes.len();
        nodes.push(Node {
            bbox: padded(bbox),
            offset: start,
            count: end - start,
        });
        if end - start <= LEAF_SIZE {
            return me;
        }
        let axis = cbox.extent().max_axis();
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |a, b| {
            centroid(a)[axis]
                .partial_cmp(&centroid(b)[axis])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self::split(tris, start, start + mid, nodes);
        let right = Self::split(tris, start + mid, end, nodes);
        nodes[me].offset = right;
        nodes[me].count = 0;
        me
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    /// Triangles in BVH order.
    pub fn triangles(&self) -> &[WorldTriangle<S>] {
        &self.tris
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn bounds(&self) -> Aabb<S> {
        self.nodes.first().map_or_else(Aabb::empty, |n| n.bbox)
    }

    /// Visits candidate primitives in front-to-back node order; `visit`
    /// returns the current far bound, or `None` to stop.
    fn traverse(&self, ray: &Ray<S>, mut visit: impl FnMut(usize, S) -> Option<S>) {
        if self.nodes.is_empty() {
            return;
        }
        let o = ray.origin;
        let d = ray.dir.get();
        let mut t_max = ray.t_max;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if node.bbox.intersect_param(o, d, ray.t_min, t_max).is_none() {
                continue;
            }
            if node.count > 0 {
                for p in node.offset..node.offset + node.count {
                    match visit(p, t_max) {
                        Some(t) => t_max = t,
                        None => return,
                    }
                }
            } else {
                let (l, r) = (i + 1, node.offset);
                let axis = self.nodes[i].bbox.extent().max_axis();
                if d[axis] < S::zero() {
                    stack.push(l);
                    stack.push(r);
                } else {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
    }

    /// Nearest hit in `(ray.t_min, ray.t_max)`.
    pub fn intersect(&self, ray: &Ray<S>) -> Option<Intersection<S>> {
        let mut best: Option<(S, usize)> = None;
        let o = ray.origin;
        let d = ray.dir.get();
        self.traverse(ray, |p, t_max| {
            let tri = &self.tris[p];
            // Inclusive upper bound so equal-t ties still reach the tie-break.
            let far = if best.is_some() {
                t_max * (S::one() + S::epsilon()) + S::epsilon()
            } else {
                t_max
            };
            if let Some((t, _, _)) =
                intersect_triangle(o, d, ray.t_min, far, tri.v[0], tri.v[1], tri.v[2])
            {
                if t < ray.t_max && closer(t, self.key(p), best.map(|(bt, bp)| (bt, self.key(bp))))
                {
                    best = Some((t, p));
                    return Some(t);
                }
            }
            Some(t_max)
        });
        best.map(|(t, p)| make_hit(ray, &self.tris[p], t))
    }

    /// Any hit in range on a mesh accepted by `filter`.
    pub fn occluded(&self, ray: &Ray<S>, filter: impl Fn(usize) -> bool) -> bool {
        let mut hit = false;
        let o = ray.origin;
        let d = ray.dir.get();
        self.traverse(ray, |p, t_max| {
            let tri = &self.tris[p];
            if filter(tri.mesh_id)
                && intersect_triangle(o, d, ray.t_min, t_max, tri.v[0], tri.v[1], tri.v[2])
                    .is_some()
            {
                hit = true;
                return None;
            }
            Some(t_max)
        });
        hit
    }

    /// Stable ordering key shared with the brute-force oracle.
    fn key(&self, p: usize) -> usize {
        let t = &self.tris[p];
        (t.mesh_id << 32) | t.face_id
    }
}

/// Reference nearest hit by testing every triangle.
pub fn intersect_brute_force<S: Real>(
    tris: &[WorldTriangle<S>],
    ray: &Ray<S>,
) -> Option<Intersection<S>> {
    let mut best: Option<(S, usize, usize)> = None;
    for (i, tri) in tris.iter().enumerate() {
        if let Some((t, _, _)) = intersect_triangle(
            ray.origin,
            ray.dir.get(),
            ray.t_min,
            ray.t_max,
            tri.v[0],
            tri.v[1],
            tri.v[2],
        ) {
            let key = (tri.mesh_id << 32) | tri.face_id;
            if closer(t, key, best.map(|(bt, bk, _)| (bt, bk))) {
                best = Some((t, key, i));
            }
        }
    }
    best.map(|(t, _, i)| make_hit(ray, &tris[i], t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Spectrum;
    use crate::rng::Rng;
    use crate::surface::bsdf::Bsdf;
    use crate::surface::shapes::{cube, icosphere, quad};

    fn mesh(v: Vec<Vec3<f64>>, f: Vec<[u32; 3]>) -> TriangleMesh<f64> {
        TriangleMesh::new(v, f, Bsdf::lambertian(Spectrum::splat(0.5)).unwrap()).unwrap()
    }

    fn ray(o: [f64; 3], d: [f64; 3]) -> Ray<f64> {
        Ray::new(Vec3::from_f64(o), UnitVec3::new(Vec3::from_f64(d)).unwrap())
    }

    #[test]
    fn empty_scene_misses() {
        let bvh = Bvh::<f64>::build(&[]);
        assert!(bvh.is_empty());
        assert!(bvh.intersect(&ray([0.0; 3], [0.0, 0.0, 1.0])).is_none());
        assert!(!bvh.occluded(&ray([0.0; 3], [0.0, 0.0, 1.0]), |_| true));
    }

    #[test]
    fn single_triangle_is_one_leaf() {
        let bvh = Bvh::build(&[mesh(
            vec![Vec3::zero(), Vec3::unit_x(), Vec3::unit_y()],
            vec![[0, 1, 2]],
        )]);
        assert_eq!(bvh.node_count(), 1);
        let hit = bvh
            .intersect(&ray([0.2, 0.2, 1.0], [0.0, 0.0, -1.0]))
            .unwrap();
        assert!((hit.t_hit - 1.0).abs() < 1e-12);
        assert!(hit.front_face);
    }

    #[test]
    fn sphere_hit_distance() {
        let (v, f) = icosphere(Vec3::zero(), 1.0, 3);
        let bvh = Bvh::build(&[mesh(v, f)]);
        let hit = bvh
            .intersect(&ray([0.0, 0.0, -5.0], [0.0, 0.0, 1.0]))
            .unwrap();
        assert!((hit.t_hit - 4.0).abs() / 4.0 < 0.01);
        assert!(hit.normal.z < 0.0);
    }

    #[test]
    fn parallel_ray_misses_plane() {
        let (v, f) = quad(Vec3::zero(), Vec3::unit_x(), Vec3::unit_y());
        let bvh = Bvh::build(&[mesh(v, f)]);
        assert!(bvh
            .intersect(&ray([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]))
            .is_none());
    }

    #[test]
    fn inside_box_normals_face_ray() {
        let (v, f) = cube(Vec3::splat(-1.0), Vec3::splat(1.0), false);
        let bvh = Bvh::build(&[mesh(v, f)]);
        let mut rng = Rng::new(5);
        for _ in 0..1000 {
            let d = Vec3::new(
                rng.uniform::<f64>() - 0.5,
                rng.uniform::<f64>() - 0.5,
                rng.uniform::<f64>() - 0.5,
            );
            let Some(d) = UnitVec3::new(d) else { continue };
            let hit = bvh.intersect(&Ray::new(Vec3::splat(0.1), d)).unwrap();
            assert!(hit.normal.dot(d.get()) <= 0.0);
            assert!(!hit.front_face);
        }
    }

    #[test]
    fn matches_brute_force_on_triangle_soup() {
        let mut rng = Rng::new(17);
        let mut u = || rng.uniform::<f64>();
        let mut v = Vec::new();
        let mut f = Vec::new();
        for i in 0..1000u32 {
            let c = Vec3::new(u() * 10.0 - 5.0, u() * 10.0 - 5.0, u() * 10.0 - 5.0);
            for _ in 0..3 {
                v.push(c + Vec3::new(u() - 0.5, u() - 0.5, u() - 0.5));
            }
            f.push([3 * i, 3 * i + 1, 3 * i + 2]);
        }
        let bvh = Bvh::build(&[mesh(v, f)]);
        let mut hits = 0;
        for _ in 0..10_000 {
            let o = Vec3::new(u() * 16.0 - 8.0, u() * 16.0 - 8.0, u() * 16.0 - 8.0);
            let Some(d) = UnitVec3::new(Vec3::new(u() - 0.5, u() - 0.5, u() - 0.5)) else {
                continue;
            };
            let r = Ray::new(o, d);
            let a = bvh.intersect(&r);
            let b = intersect_brute_force(bvh.triangles(), &r);
            match (a, b) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    hits += 1;
                    assert_eq!((a.mesh_id, a.face_id), (b.mesh_id, b.face_id));
                    assert!((a.t_hit - b.t_hit).abs() <= 1e-6);
                }
                _ => panic!("hit mismatch for {r:?}"),
            }
            assert_eq!(bvh.occluded(&r, |_| true), b.is_some());
        }
        assert!(hits > 1000);
    }
}
