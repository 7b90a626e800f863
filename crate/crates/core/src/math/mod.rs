//! Vectors, colors, rays and rigid transforms shared by every module.

mod aabb;
mod mat3;
mod quat;
mod ray;
mod spectrum;
mod transform;
mod vec3;

pub use aabb::Aabb;
pub use mat3::Mat3;
pub use quat::Quat;
pub use ray::Ray;
pub use spectrum::Spectrum;
pub use transform::{Transform, TransformError};
pub use vec3::{orthonormal_basis, UnitVec3, Vec3};
