//! Position-based dynamics for cloth and rigid bodies colliding with signed
//! distance fields, and the hand-off of the results to the renderer.

mod body;
mod collider;
mod world;

use thiserror::Error;

pub use body::{couple_impulse, BodyError, BodyShape, RigidBody};
pub use collider::{Attachment, Collider, ColliderShape};
pub use world::{Contact, ContactSource, DistanceConstraint, ParticleSystem, SimSettings, World};

use crate::math::Vec3;
use crate::num::Real;
use crate::render::Scene;
use crate::surface::shapes::grid_sheet;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid simulation setup: {0}")]
    Invalid(String),
    #[error("simulation unstable at t={time}: {dump}")]
    Unstable { time: f64, dump: String },
    #[error(transparent)]
    Body(#[from] BodyError),
}

/// Links simulated state to renderer assets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    /// Particles `first..first + count` are the vertices of mesh `mesh`.
    Cloth {
        mesh: usize,
        first: usize,
        count: usize,
    },
    /// Mesh `mesh` follows body `body`.
    BodyMesh { body: usize, mesh: usize },
    /// Field `field` follows body `body`.
    BodyField { body: usize, field: usize },
}

/// What a sync changed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SyncReport {
    pub meshes: usize,
    pub fields: usize,
    pub bvh_rebuilt: bool,
}

impl<S: Real> World<S> {
    /// Copies bound state into `scene`. Only assets whose vertices or
    /// transforms actually differ are touched, and the BVH is rebuilt only
    /// when a mesh changed.
    pub fn sync_to_renderer(&self, scene: &mut Scene<S>) -> Result<SyncReport, SimError> {
        let mut report = SyncReport::default();
        for b in &self.bindings {
            match *b {
                Binding::Cloth { mesh, first, count } => {
                    let m = scene.meshes.get_mut(mesh).ok_or_else(|| {
                        SimError::Invalid(format!("cloth binding names missing mesh {mesh}"))
                    })?;
                    let xs = self
                        .particles
                        .positions
                        .get(first..first + count)
                        .ok_or_else(|| {
                            SimError::Invalid(format!(
                                "cloth binding particles {first}..{} out of range",
                                first + count
                            ))
                        })?;
                    let local: Vec<Vec3<S>> = xs
                        .iter()
                        .map(|p| m.world_from_object.transform_point(*p, true))
                        .collect();
                    if local.as_slice() != m.vertices() {
                        m.set_vertices(local)
                            .map_err(|e| SimError::Invalid(format!("mesh {mesh}: {e}")))?;
                        report.meshes += 1;
                    }
                }
                Binding::BodyMesh { body, mesh } => {
                    let t = self.body(body)?.asset_transform();
                    let m = scene.meshes.get_mut(mesh).ok_or_else(|| {
                        SimError::Invalid(format!("body binding names missing mesh {mesh}"))
                    })?;
                    if m.world_from_object != t {
                        m.world_from_object = t;
                        report.meshes += 1;
                    }
                }
                Binding::BodyField { body, field } => {
                    let t = self.body(body)?.asset_transform();
                    let f = scene.fields.get_mut(field).ok_or_else(|| {
                        SimError::Invalid(format!("body binding names missing field {field}"))
                    })?;
                    if f.world_from_field != t {
                        f.world_from_field = t;
                        report.fields += 1;
                    }
                }
            }
        }
        if report.meshes > 0 {
            scene.rebuild();
            report.bvh_rebuilt = true;
        } else if report.fields > 0 {
            scene.refresh_bounds();
        }
        Ok(report)
    }

    fn body(&self, i: usize) -> Result<&RigidBody<S>, SimError> {
        self.bodies
            .get(i)
            .ok_or_else(|| SimError::Invalid(format!("binding names missing body {i}")))
    }
}

/// A rectangular cloth added to a world.
#[derive(Clone, Debug, PartialEq)]
pub struct ClothPatch<S> {
    pub first: usize,
    pub nx: usize,
    pub ny: usize,
    /// Rest positions, also the initial mesh vertices.
    pub vertices: Vec<Vec3<S>>,
    pub triangles: Vec<[u32; 3]>,
}

/// Adds an `nx × ny` sheet spanning `origin + a·u + b·v`, with a distance
/// constraint on every triangle edge. `pinned` lists grid `(i, j)` corners
/// held in place.
#[allow(clippy::too_many_arguments)]
pub fn add_cloth<S: Real>(
    world: &mut World<S>,
    origin: Vec3<S>,
    u: Vec3<S>,
    v: Vec3<S>,
    nx: usize,
    ny: usize,
    total_mass: S,
    compliance: S,
    pinned: &[(usize, usize)],
) -> Result<ClothPatch<S>, SimError> {
    if nx < 2 || ny < 2 {
        return Err(SimError::Invalid(
            "cloth needs at least 2x2 particles".into(),
        ));
    }
    if !(total_mass > S::zero()) {
        return Err(SimError::Invalid("cloth mass must be positive".into()));
    }
    let (verts, tris) = grid_sheet(origin, u, v, nx, ny);
    let w = S::from_usize_lossy(nx * ny) / total_mass;
    let first = world.particles.len();
    for p in &verts {
        world.particles.push(*p, w);
    }
    for &(i, j) in pinned {
        if i >= nx || j >= ny {
            return Err(SimError::Invalid(format!(
                "pinned particle ({i}, {j}) outside the {nx}x{ny} grid"
            )));
        }
        world.particles.pin(first + j * nx + i);
    }
    let mut edges: Vec<(u32, u32)> = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    for (a, b) in edges {
        let rest = (verts[a as usize] - verts[b as usize]).length();
        world.constraints.push(DistanceConstraint::new(
            first + a as usize,
            first + b as usize,
            rest,
            compliance,
        )?);
    }
    Ok(ClothPatch {
        first,
        nx,
        ny,
        vertices: verts,
        triangles: tris,
    })
}
