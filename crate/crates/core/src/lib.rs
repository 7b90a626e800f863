//! Hybrid renderer that marches emissive, absorbing radiance grids between
//! the surface bounces of a Monte Carlo path tracer, plus HDR calibration,
//! per-face emitter recovery and SDF-based position dynamics.
//!
//! Numeric code is generic over [`num::Real`]; the aliases below fix the
//! scalar for callers that do not care.

pub mod color;
pub mod config;
pub mod estimate;
pub mod hdr;
pub mod image;
pub mod math;
pub mod num;
pub mod render;
pub mod rng;
pub mod scenes;
pub mod sim;
pub mod surface;
pub mod volume;

pub use num::Real;

/// Scalar used by the command line tool.
pub type Float = f64;

pub type Vec3 = math::Vec3<Float>;
pub type UnitVec3 = math::UnitVec3<Float>;
pub type Spectrum = math::Spectrum<Float>;
pub type Ray = math::Ray<Float>;
pub type Transform = math::Transform<Float>;
pub type Quat = math::Quat<Float>;
pub type Aabb = math::Aabb<Float>;
pub type RadianceGrid = volume::RadianceGrid<Float>;
pub type SdfGrid = volume::SdfGrid<Float>;
pub type TriangleMesh = surface::TriangleMesh<Float>;
pub type Bsdf = surface::Bsdf<Float>;
pub type Scene = render::Scene<Float>;
pub type Camera = render::Camera<Float>;
pub type RenderSettings = render::RenderSettings<Float>;
pub type EmitterSet = render::EmitterSet<Float>;
pub type HdrImage = image::HdrImage<Float>;
pub type CrfTable = hdr::CrfTable<Float>;
pub type World = sim::World<Float>;
pub type RigidBody = sim::RigidBody<Float>;

/// Single-precision variants.
pub mod f32 {
    use super::{image, math, render, sim, volume};

    pub type Vec3 = math::Vec3<f32>;
    pub type Spectrum = math::Spectrum<f32>;
    pub type RadianceGrid = volume::RadianceGrid<f32>;
    pub type Scene = render::Scene<f32>;
    pub type Camera = render::Camera<f32>;
    pub type HdrImage = image::HdrImage<f32>;
    pub type World = sim::World<f32>;
}
