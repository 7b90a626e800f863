use std::path::Path;

use super::{
    BodyDesc, BsdfDesc, CameraDesc, ColliderKind, ConfigError, FieldPreset, RenderDesc,
    SceneConfig, ShapeDesc, TransformDesc,
};
use crate::estimate::read_emitters;
use crate::math::{Aabb, Mat3, Quat, Spectrum, Transform, Vec3};
use crate::num::Real;
use crate::render::{Camera, Emitter, EmitterSet, RenderSettings, Scene};
use crate::sim::{add_cloth, Binding, Collider, RigidBody, SimSettings, World};
use crate::surface::obj::read_obj;
use crate::surface::shapes::{cube, icosphere, quad};
use crate::surface::{Bsdf, TriangleMesh};
use crate::volume::io::read_rfgrid;
use crate::volume::presets::{furnace_shell, smoke_slab, sphere, two_room, uniform_box};
use crate::volume::{bake_sdf_from_field, bake_sdf_from_mesh, RadianceGrid};

/// Collision vertices kept per rigid body.
pub const DEFAULT_MAX_COLLISION_VERTICES: usize = 512;

/// Runtime objects described by a scene file.
#[derive(Clone, Debug)]
pub struct Built<S> {
    pub scene: Scene<S>,
    pub camera: Camera<S>,
    /// Bodies, cloth and colliders, bound to `scene` assets.
    pub world: World<S>,
}

fn v3<S: Real>(a: [f64; 3]) -> Vec3<S> {
    Vec3::from_f64(a)
}

impl TransformDesc {
    pub fn rotation<S: Real>(&self) -> Quat<S> {
        Quat::from_axis_angle(v3(self.axis), S::lit(self.angle_deg.to_radians()))
    }

    pub fn to_transform<S: Real>(&self) -> Transform<S> {
        let rigid = Transform::rigid(self.rotation(), v3(self.translate));
        if self.scale == 1.0 {
            return rigid;
        }
        let s = S::lit(self.scale);
        let (o, z) = (S::one(), S::zero());
        let scale =
            Transform::from_matrix([[s, z, z, z], [z, s, z, z], [z, z, s, z], [z, z, z, o]])
                .expect("positive scale is invertible");
        rigid.compose(&scale)
    }
}

impl CameraDesc {
    pub fn to_camera<S: Real>(&self) -> Result<Camera<S>, ConfigError> {
        Camera::look_at(
            v3(self.position),
            v3(self.target),
            v3(self.up),
            S::lit(self.vfov_deg.to_radians()),
            self.width,
            self.height,
        )
        .map_err(|e| ConfigError::invalid("camera", e.to_string()))
    }
}

impl RenderDesc {
    pub fn to_settings<S: Real>(&self) -> RenderSettings<S> {
        RenderSettings {
            spp: self.spp,
            n_bounces: self.n_bounces,
            threshold: S::lit(self.threshold),
            march_step: S::lit(self.march_step),
            seed: self.seed,
        }
    }
}

impl BsdfDesc {
    pub fn to_bsdf<S: Real>(&self) -> Result<Bsdf<S>, String> {
        let r = match self {
            BsdfDesc::Lambertian { albedo } => Bsdf::lambertian(Spectrum::from_f64(*albedo)),
            BsdfDesc::Mirror { reflectance } => Bsdf::mirror(Spectrum::from_f64(*reflectance)),
            BsdfDesc::Dielectric { ior, tint } => {
                Bsdf::dielectric(S::lit(*ior), Spectrum::from_f64(*tint))
            }
        };
        r.map_err(|e| e.to_string())
    }
}

impl FieldPreset {
    pub fn build<S: Real>(&self) -> Result<RadianceGrid<S>, String> {
        let r = match self {
            FieldPreset::SmokeSlab {} => Ok(smoke_slab()),
            FieldPreset::Sphere {
                radius,
                res,
                sigma,
                radiance,
            } => sphere(
                S::lit(*radius),
                *res,
                S::lit(*sigma),
                Spectrum::from_f64(*radiance),
            ),
            FieldPreset::FurnaceShell {
                inner_radius,
                half_extent,
                res,
                sigma,
                radiance,
            } => furnace_shell(
                S::lit(*inner_radius),
                S::lit(*half_extent),
                *res,
                S::lit(*sigma),
                Spectrum::from_f64(*radiance),
            ),
            FieldPreset::TwoRoom { res } => two_room(*res),
            FieldPreset::UniformBox {
                min,
                max,
                res,
                sigma,
                radiance,
            } => uniform_box(
                Aabb::new(v3(*min), v3(*max)),
                *res,
                S::lit(*sigma),
                Spectrum::from_f64(*radiance),
            ),
        };
        r.map_err(|e| e.to_string())
    }
}

fn place_body<S: Real>(
    mut body: RigidBody<S>,
    desc: &BodyDesc,
    offset: Vec3<S>,
    t: &TransformDesc,
) -> RigidBody<S> {
    body.asset_offset = offset;
    body.orientation = t.rotation::<S>().normalized();
    body.com = t.to_transform::<S>().transform_point(offset, false);
    body.lin_vel = v3(desc.velocity);
    body.ang_vel = v3(desc.angular_velocity);
    body
}

fn padded_bounds<S: Real>(verts: &[Vec3<S>]) -> Aabb<S> {
    let mut b = Aabb::empty();
    for v in verts {
        b.grow(*v);
    }
    let pad = b.diagonal() * S::lit(0.1) + S::lit(1e-3);
    Aabb::new(b.min - Vec3::splat(pad), b.max + Vec3::splat(pad))
}

impl SceneConfig {
    /// Loads assets (relative to `base`) and assembles the scene, camera and
    /// simulation world.
    pub fn build<S: Real>(&self, base: &Path) -> Result<Built<S>, ConfigError> {
        self.validate()?;
        self.check_files(base)?;
        let settings = self.render.to_settings();
        let camera = self.camera.to_camera()?;
        let s = &self.sim;
        let mut world = World::new(SimSettings {
            gravity: v3(s.gravity),
            dt: S::lit(s.dt),
            substeps: s.substeps,
            iterations: s.iterations,
            restitution: S::lit(s.restitution),
            friction: S::lit(s.friction),
            max_speed: S::lit(s.max_speed),
            damping: S::lit(s.damping),
        });
        if let Some(h) = s.ground {
            world.add_collider(Collider::ground(S::lit(h)));
        }
        let threshold = S::lit(s.field_sdf_threshold);

        let mut fields = Vec::new();
        if let Some(f) = &self.field {
            let mut grid = match (&f.path, &f.preset) {
                (Some(p), _) => {
                    let full = base.join(p);
                    read_rfgrid(&full).map_err(|e| ConfigError::Asset {
                        key: "field.path".into(),
                        path: full.display().to_string(),
                        msg: e.to_string(),
                    })?
                }
                (None, Some(p)) => p
                    .build()
                    .map_err(|e| ConfigError::invalid("field.preset", e))?,
                (None, None) => unreachable!("validated"),
            };
            match &f.dynamic {
                Some(b) => {
                    let body = RigidBody::from_field(
                        &grid,
                        S::lit(b.mass),
                        threshold,
                        Vec3::zero(),
                        DEFAULT_MAX_COLLISION_VERTICES,
                    )
                    .map_err(|e| ConfigError::invalid("field.dynamic", e.to_string()))?;
                    let offset = body.asset_offset;
                    let body = place_body(body, b, offset, &f.transform);
                    let sdf = bake_sdf_from_field(&grid, threshold).ok_or_else(|| {
                        ConfigError::invalid(
                            "sim.field_sdf_threshold",
                            "threshold leaves no field surface",
                        )
                    })?;
                    grid.world_from_field = body.asset_transform();
                    let idx = world.add_body(body);
                    world.add_collider(Collider::on_body(sdf, idx));
                    world.bindings.push(Binding::BodyField {
                        body: idx,
                        field: 0,
                    });
                }
                None => grid.world_from_field = f.transform.to_transform(),
            }
            fields.push(grid);
        }

        let mut meshes = Vec::new();
        for (i, m) in self.meshes.iter().enumerate() {
            let key = format!("meshes[{i}]");
            let bsdf = m
                .bsdf
                .to_bsdf::<S>()
                .map_err(|e| ConfigError::invalid(format!("{key}.bsdf"), e))?;
            let invalid = |k: &str, e: String| ConfigError::invalid(format!("{key}{k}"), e);
            let (verts, faces, cloth) = match (&m.path, &m.shape) {
                (Some(p), _) => {
                    let full = base.join(p);
                    let (v, f) = read_obj::<S>(&full).map_err(|e| ConfigError::Asset {
                        key: format!("{key}.path"),
                        path: full.display().to_string(),
                        msg: e.to_string(),
                    })?;
                    (v, f, None)
                }
                (
                    None,
                    Some(ShapeDesc::Icosphere {
                        center,
                        radius,
                        level,
                    }),
                ) => {
                    let (v, f) = icosphere(v3(*center), S::lit(*radius), *level);
                    (v, f, None)
                }
                (None, Some(ShapeDesc::Cube { min, max, inward })) => {
                    let (v, f) = cube(v3(*min), v3(*max), *inward);
                    (v, f, None)
                }
                (None, Some(ShapeDesc::Quad { center, u, v })) => {
                    let (vs, f) = quad(v3(*center), v3(*u), v3(*v));
                    (vs, f, None)
                }
                (
                    None,
                    Some(ShapeDesc::Cloth {
                        origin,
                        u,
                        v,
                        nx,
                        ny,
                        mass,
                        compliance,
                        pinned,
                    }),
                ) => {
                    let pins: Vec<(usize, usize)> = pinned.iter().map(|p| (p[0], p[1])).collect();
                    let patch = add_cloth(
                        &mut world,
                        v3(*origin),
                        v3(*u),
                        v3(*v),
                        *nx,
                        *ny,
                        S::lit(*mass),
                        S::lit(*compliance),
                        &pins,
                    )
                    .map_err(|e| invalid(".shape", e.to_string()))?;
                    world.bindings.push(Binding::Cloth {
                        mesh: i,
                        first: patch.first,
                        count: nx * ny,
                    });
                    (patch.vertices, patch.triangles, Some(()))
                }
                (None, None) => unreachable!("validated"),
            };
            let mut mesh = TriangleMesh::new(verts, faces, bsdf)
                .map_err(|e| invalid("", e.to_string()))?
                .with_transform(m.transform.to_transform());
            if let Some(e) = m.emission {
                mesh = mesh
                    .with_uniform_emission(Spectrum::from_f64(e))
                    .map_err(|e| invalid(".emission", e.to_string()))?;
            }
            if let (Some(b), None) = (&m.dynamic, cloth) {
                let verts = mesh.vertices();
                let n = S::from_usize_lossy(verts.len());
                let centroid = verts.iter().fold(Vec3::zero(), |a, v| a + *v) / n;
                let body = match b.collider {
                    ColliderKind::Sphere => {
                        let r = verts
                            .iter()
                            .map(|v| (*v - centroid).length())
                            .fold(S::zero(), S::max);
                        RigidBody::sphere(Vec3::zero(), r, S::lit(b.mass))
                            .map_err(|e| invalid(".dynamic", e.to_string()))?
                    }
                    ColliderKind::Sdf => {
                        let mut bb = Aabb::empty();
                        for v in verts {
                            bb.grow(*v);
                        }
                        let e = bb.extent();
                        let k = S::lit(b.mass) / S::lit(12.0);
                        let inertia = Mat3::diagonal(Vec3::new(
                            k * (e.y * e.y + e.z * e.z),
                            k * (e.x * e.x + e.z * e.z),
                            k * (e.x * e.x + e.y * e.y),
                        ));
                        let mut body = RigidBody::new(
                            Vec3::zero(),
                            S::lit(b.mass),
                            inertia,
                            crate::sim::BodyShape::Points,
                        )
                        .map_err(|e| invalid(".dynamic", e.to_string()))?;
                        let stride = verts.len().div_ceil(DEFAULT_MAX_COLLISION_VERTICES).max(1);
                        body.collision_vertices = verts
                            .iter()
                            .step_by(stride)
                            .map(|v| *v - centroid)
                            .collect();
                        body
                    }
                };
                let body = place_body(body, b, centroid, &m.transform);
                mesh.world_from_object = body.asset_transform();
                let sdf = match b.collider {
                    ColliderKind::Sdf => Some(
                        bake_sdf_from_mesh(
                            mesh.vertices(),
                            mesh.indices(),
                            padded_bounds(mesh.vertices()),
                            [s.sdf_res; 3],
                        )
                        .map_err(|e| invalid(".dynamic", e.to_string()))?,
                    ),
                    ColliderKind::Sphere => None,
                };
                let idx = world.add_body(body);
                if let Some(sdf) = sdf {
                    world.add_collider(Collider::on_body(sdf, idx));
                }
                world
                    .bindings
                    .push(Binding::BodyMesh { body: idx, mesh: i });
            }
            if m.collider {
                let wv = mesh.world_vertices();
                let sdf =
                    bake_sdf_from_mesh(&wv, mesh.indices(), padded_bounds(&wv), [s.sdf_res; 3])
                        .map_err(|e| invalid(".collider", e.to_string()))?;
                world.add_collider(Collider::static_sdf(sdf, Transform::identity()));
            }
            meshes.push(mesh);
        }

        let mut emitters: Vec<Emitter<S>> = self
            .emitters
            .iter()
            .map(|e| Emitter {
                vertices: e.vertices.map(|v| Vec3::from_f64(v.to_f64())),
                intensity: S::lit(e.intensity),
            })
            .collect();
        if let Some(p) = &self.emitters_file {
            let full = base.join(p);
            let set = read_emitters::<S>(&full).map_err(|e| ConfigError::Asset {
                key: "emitters_file".into(),
                path: full.display().to_string(),
                msg: e.to_string(),
            })?;
            emitters.extend_from_slice(set.emitters());
        }
        Ok(Built {
            scene: Scene::new(fields, meshes, EmitterSet::new(emitters), settings),
            camera,
            world,
        })
    }
}
