//! Triangle meshes, BVH traversal and BSDF sampling.

mod bsdf;
mod bvh;
mod mesh;
pub mod obj;
pub mod shapes;
mod triangle;

pub use bsdf::{reflect, schlick, Bsdf, BsdfError, BsdfSample, PdfKind};
pub use bvh::{intersect_brute_force, Bvh, Intersection, WorldTriangle};
pub use mesh::{MeshError, TriangleMesh};
pub use triangle::{closest_point_on_triangle, intersect_triangle, triangle_area};
