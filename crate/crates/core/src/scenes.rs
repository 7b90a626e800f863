//! Ready-made scenes shared by tests, benchmarks and `gen-assets`.

use crate::math::{Aabb, Spectrum, Vec3};
use crate::num::Real;
use crate::render::{Camera, EmitterSet, RenderSettings, Scene};
use crate::surface::shapes::{cube, icosphere, quad};
use crate::surface::{Bsdf, TriangleMesh};
use crate::volume::presets::{furnace_shell, smoke_slab, two_room};

/// A scene with the camera it is meant to be viewed from.
#[derive(Clone, Debug)]
pub struct Preset<S> {
    pub scene: Scene<S>,
    pub camera: Camera<S>,
}

fn lambertian<S: Real>(a: f64) -> Bsdf<S> {
    Bsdf::lambertian(Spectrum::splat(S::lit(a))).expect("albedo in range")
}

fn mesh<S: Real>((v, f): (Vec<Vec3<S>>, Vec<[u32; 3]>), bsdf: Bsdf<S>) -> TriangleMesh<S> {
    TriangleMesh::new(v, f, bsdf).expect("preset geometry is valid")
}

fn v<S: Real>(x: f64, y: f64, z: f64) -> Vec3<S> {
    Vec3::from_f64([x, y, z])
}

/// Unit-density white slab `z ∈ [0, 1]` seen straight down the z axis, so the
/// central ray crosses exactly one unit of medium.
pub fn slab_scene<S: Real>(width: usize, height: usize, settings: RenderSettings<S>) -> Preset<S> {
    let camera = Camera::look_at(
        v(0.0, 0.0, -1.0),
        v(0.0, 0.0, 1.0),
        v(0.0, 1.0, 0.0),
        S::lit(0.1f64.to_radians()),
        width,
        height,
    )
    .expect("valid camera");
    Preset {
        scene: Scene::new(
            vec![smoke_slab()],
            Vec::new(),
            EmitterSet::empty(),
            settings,
        ),
        camera,
    }
}

/// White furnace: an albedo-1 Lambertian sphere of radius 0.5 inside a
/// vacuum pocket of radius 2, surrounded by a dense emissive shell of
/// radiance `r_env`. Every path ends in the shell, so every pixel converges
/// to `r_env`.
pub fn furnace<S: Real>(
    r_env: S,
    res: usize,
    width: usize,
    height: usize,
    settings: RenderSettings<S>,
) -> Preset<S> {
    let field = furnace_shell(
        S::lit(2.0),
        S::lit(3.0),
        res,
        S::lit(20.0),
        Spectrum::splat(r_env),
    )
    .expect("valid shell");
    let sphere = mesh(icosphere(Vec3::zero(), S::lit(0.5), 3), lambertian(1.0));
    let camera = Camera::look_at(
        v(0.0, -1.5, 0.0),
        Vec3::zero(),
        v(0.0, 0.0, 1.0),
        S::lit(30f64.to_radians()),
        width,
        height,
    )
    .expect("valid camera");
    Preset {
        scene: Scene::new(vec![field], vec![sphere], EmitterSet::empty(), settings),
        camera,
    }
}

/// Two field-filled rooms with a floor, a mirror ball and a glass ball.
pub fn two_room_scene<S: Real>(
    res: usize,
    width: usize,
    height: usize,
    settings: RenderSettings<S>,
) -> Preset<S> {
    let field = two_room(res).expect("valid field");
    let floor = mesh(
        quad(v(0.0, 0.0, 0.0), v(2.5, 0.0, 0.0), v(0.0, 1.5, 0.0)),
        lambertian(0.6),
    );
    let mirror = mesh(
        icosphere(v(-1.0, 0.0, 0.45), S::lit(0.4), 2),
        Bsdf::mirror(Spectrum::splat(S::lit(0.9))).expect("valid"),
    );
    let glass = mesh(
        icosphere(v(1.0, 0.0, 0.45), S::lit(0.4), 2),
        Bsdf::dielectric(S::lit(1.5), Spectrum::splat(S::one())).expect("valid"),
    );
    let camera = Camera::look_at(
        v(0.0, -4.0, 1.2),
        v(0.0, 0.0, 0.6),
        v(0.0, 0.0, 1.0),
        S::lit(50f64.to_radians()),
        width,
        height,
    )
    .expect("valid camera");
    Preset {
        scene: Scene::new(
            vec![field],
            vec![floor, mirror, glass],
            EmitterSet::empty(),
            settings,
        ),
        camera,
    }
}

/// Small high-dynamic-range scene: a bright glowing slab over a dim floor
/// with a grey ball, lit only by the field.
pub fn hdr_toy<S: Real>(width: usize, height: usize, settings: RenderSettings<S>) -> Preset<S> {
    let field = crate::volume::RadianceGrid::from_fn(
        Aabb::new(v(-1.5, -1.5, 0.0), v(1.5, 1.5, 1.5)),
        [16, 16, 16],
        |p: Vec3<S>| {
            let glow = (-(p.x * p.x + p.y * p.y) * S::lit(2.0)).exp();
            let sigma = S::lit(0.05) + S::lit(3.0) * glow * (p.z - S::lit(0.75)).max(S::zero());
            (
                sigma,
                Spectrum::from_f64([6.0, 4.0, 2.5]) * (S::lit(0.05) + glow),
            )
        },
    )
    .expect("valid field");
    let floor = mesh(
        quad(Vec3::zero(), v(1.5, 0.0, 0.0), v(0.0, 1.5, 0.0)),
        lambertian(0.5),
    );
    let ball = mesh(
        icosphere(v(0.4, 0.2, 0.35), S::lit(0.35), 2),
        lambertian(0.7),
    );
    let camera = Camera::look_at(
        v(0.0, -3.0, 1.0),
        v(0.0, 0.0, 0.5),
        v(0.0, 0.0, 1.0),
        S::lit(55f64.to_radians()),
        width,
        height,
    )
    .expect("valid camera");
    Preset {
        scene: Scene::new(
            vec![field],
            vec![floor, ball],
            EmitterSet::empty(),
            settings,
        ),
        camera,
    }
}

/// Exposure times that cover the range of [`hdr_toy`].
pub const HDR_TOY_TIMES: [f64; 5] = [1.0 / 16.0, 0.25, 1.0, 4.0, 16.0];

/// Gamma-2.2 camera response, exposure to normalized code.
pub fn gamma_response(e: f64) -> f64 {
    e.max(0.0).powf(1.0 / 2.2)
}

/// Closed 12-triangle room used for emitter recovery.
#[derive(Clone, Debug)]
pub struct ToyRoom<S> {
    /// The room; its emission holds the ground truth.
    pub room: TriangleMesh<S>,
    pub poses: Vec<Camera<S>>,
    pub emitting_faces: Vec<usize>,
}

pub const TOY_ROOM_EMISSION: f64 = 5.0;
pub const TOY_ROOM_VFOV_DEG: f64 = 100.0;

/// `(position, target, up)` of the interior poses.
pub const TOY_ROOM_VIEWS: [([f64; 3], [f64; 3], [f64; 3]); 8] = [
    ([0.3, 0.2, 0.1], [1.0, 0.2, 0.1], [0.0, 0.0, 1.0]),
    ([0.3, 0.2, 0.1], [-1.0, 0.2, 0.1], [0.0, 0.0, 1.0]),
    ([0.1, 0.3, -0.2], [0.1, 1.0, -0.2], [0.0, 0.0, 1.0]),
    ([0.1, 0.3, -0.2], [0.1, -1.0, -0.2], [0.0, 0.0, 1.0]),
    ([-0.2, 0.1, 0.2], [-0.2, 0.1, 1.0], [0.0, 1.0, 0.0]),
    ([-0.2, 0.1, 0.2], [-0.2, 0.1, -1.0], [0.0, 1.0, 0.0]),
    ([0.6, 0.6, 0.6], [-1.0, -1.0, -1.0], [0.0, 0.0, 1.0]),
    ([-0.6, -0.6, -0.6], [1.0, 1.0, 1.0], [0.0, 0.0, 1.0]),
];

/// Inward-facing box `[-1, 1]³` with grey walls, two emitting triangles
/// (one on the ceiling, one on the −x wall) and eight interior poses.
pub fn toy_room<S: Real>(res: usize) -> ToyRoom<S> {
    let emitting_faces = vec![10, 0];
    let mut room = mesh(
        cube(Vec3::splat(-S::one()), Vec3::splat(S::one()), true),
        lambertian(0.5),
    );
    let e = (0..room.face_count())
        .map(|f| {
            if emitting_faces.contains(&f) {
                Spectrum::splat(S::lit(TOY_ROOM_EMISSION))
            } else {
                Spectrum::black()
            }
        })
        .collect();
    room.set_emission(Some(e)).expect("valid emission");
    let fov = S::lit(TOY_ROOM_VFOV_DEG.to_radians());
    let views = TOY_ROOM_VIEWS;
    let poses = views
        .iter()
        .map(|(p, t, u)| {
            Camera::look_at(
                v(p[0], p[1], p[2]),
                v(t[0], t[1], t[2]),
                v(u[0], u[1], u[2]),
                fov,
                res,
                res,
            )
            .expect("valid camera")
        })
        .collect();
    ToyRoom {
        room,
        poses,
        emitting_faces,
    }
}
