use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use hybridrt::config::{CameraDesc, RenderDesc, SceneConfig};
use hybridrt::estimate::DEFAULT_MAX_DEPTH;
use hybridrt::hdr::io::write_bracket;
use hybridrt::hdr::synthesize_bracket;
use hybridrt::math::{Spectrum, Vec3};
use hybridrt::render::EmitterSet;
use hybridrt::scenes::{
    gamma_response, hdr_toy, toy_room, HDR_TOY_TIMES, TOY_ROOM_VFOV_DEG, TOY_ROOM_VIEWS,
};
use hybridrt::surface::obj::write_obj;
use hybridrt::surface::shapes::icosphere;
use hybridrt::volume::io::{write_rfgrid, write_sdfgrid};
use hybridrt::volume::presets::{box_sdf, furnace_shell, smoke_slab, sphere, sphere_sdf, two_room};
use hybridrt::{RadianceGrid, Scene, SdfGrid};

use crate::commands::{render_image, write_file};
use crate::error::CliError;
use crate::{AssetKind, GenAssetsArgs};

fn default_name(kind: AssetKind) -> &'static str {
    match kind {
        AssetKind::SphereSdf => "sphere.sdfgrid",
        AssetKind::BoxSdf => "box.sdfgrid",
        AssetKind::SphereField => "sphere.rfgrid",
        AssetKind::SmokeSlab => "smoke_slab.rfgrid",
        AssetKind::FurnaceShell => "furnace_shell.rfgrid",
        AssetKind::TwoRoom => "two_room.rfgrid",
        AssetKind::IcosphereObj => "icosphere.obj",
        AssetKind::HdrBracket => "bracket",
        AssetKind::ToyRoom => "toy_room",
        AssetKind::Scenes => "scenes",
    }
}

fn save_sdf(path: &Path, sdf: Result<SdfGrid, impl std::fmt::Display>) -> Result<(), CliError> {
    let sdf = sdf.map_err(|e| CliError::Config(e.to_string()))?;
    mkparent(path)?;
    write_sdfgrid(path, &sdf).map_err(|e| CliError::io(path, e))
}

fn save_field(
    path: &Path,
    grid: Result<RadianceGrid, impl std::fmt::Display>,
) -> Result<(), CliError> {
    let grid = grid.map_err(|e| CliError::Config(e.to_string()))?;
    mkparent(path)?;
    write_rfgrid(path, &grid).map_err(|e| CliError::io(path, e))
}

fn mkparent(path: &Path) -> Result<(), CliError> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(d) => fs::create_dir_all(d).map_err(|e| CliError::io(d, e)),
        None => Ok(()),
    }
}

fn mkdir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn generate(a: &GenAssetsArgs) -> Result<(), CliError> {
    if a.res < 2 {
        return Err(CliError::Config("--res must be at least 2".into()));
    }
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return Err(CliError::Config("--radius must be positive".into()));
    }
    if a.spp == 0 {
        return Err(CliError::Config("--spp must be at least 1".into()));
    }
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name(a.kind)));
    let (r, res) = (a.radius, a.res);
    match a.kind {
        AssetKind::SphereSdf => save_sdf(&out, sphere_sdf(r, res)),
        AssetKind::BoxSdf => save_sdf(&out, box_sdf(Vec3::splat(r), res)),
        AssetKind::SphereField => save_field(&out, sphere(r, res, 10.0, Spectrum::splat(1.0))),
        AssetKind::SmokeSlab => save_field(&out, Ok::<_, String>(smoke_slab())),
        AssetKind::FurnaceShell => save_field(
            &out,
            furnace_shell(2.0 * r, 3.0 * r, res, 20.0, Spectrum::splat(1.0)),
        ),
        AssetKind::TwoRoom => save_field(&out, two_room(res)),
        AssetKind::IcosphereObj => {
            let (v, f) = icosphere(Vec3::zero(), r, 3);
            mkparent(&out)?;
            write_obj(&out, &v, &f).map_err(|e| CliError::io(&out, e))
        }
        AssetKind::HdrBracket => hdr_bracket(&out, a),
        AssetKind::ToyRoom => toy_room_assets(&out, a),
        AssetKind::Scenes => example_scenes(&out),
    }
}

fn settings(a: &GenAssetsArgs, n_bounces: u32) -> RenderDesc {
    RenderDesc {
        spp: a.spp,
        seed: a.seed,
        n_bounces,
        ..RenderDesc::default()
    }
}

/// Renders the HDR toy scene and photographs it with a gamma-2.2 camera.
fn hdr_bracket(dir: &Path, a: &GenAssetsArgs) -> Result<(), CliError> {
    mkdir(dir)?;
    let preset = hdr_toy(
        a.res,
        a.res,
        settings(a, RenderDesc::default().n_bounces).to_settings(),
    );
    let radiance = render_image(&preset.scene, &preset.camera, None)?;
    write_file(&dir.join("radiance.pfm"), &radiance.encode_pfm())?;
    let bracket = synthesize_bracket(&radiance, &HDR_TOY_TIMES, gamma_response)?;
    write_bracket(dir, &bracket)?;
    Ok(())
}

fn toy_room_assets(dir: &Path, a: &GenAssetsArgs) -> Result<(), CliError> {
    mkdir(dir)?;
    let tr = toy_room::<f64>(a.res);
    let obj = dir.join("room.obj");
    write_obj(&obj, tr.room.vertices(), tr.room.indices()).map_err(|e| CliError::io(&obj, e))?;
    let poses: Vec<CameraDesc> = TOY_ROOM_VIEWS
        .iter()
        .map(|&(position, target, up)| CameraDesc {
            position,
            target,
            up,
            vfov_deg: TOY_ROOM_VFOV_DEG,
            width: a.res,
            height: a.res,
        })
        .collect();
    let render = settings(a, DEFAULT_MAX_DEPTH);
    let scene = json!({
        "meshes": [{"path": "room.obj", "bsdf": {"kind": "lambertian", "albedo": [0.5, 0.5, 0.5]}}],
        "camera": poses[0],
        "render": render,
    });
    write_scene(&dir.join("scene.json"), &scene)?;
    let gt = Scene::new(
        Vec::new(),
        vec![tr.room.clone()],
        EmitterSet::empty(),
        render.to_settings(),
    );
    let mut images = Vec::new();
    for (i, cam) in tr.poses.iter().enumerate() {
        let name = format!("target_{i:02}.pfm");
        write_file(
            &dir.join(&name),
            &render_image(&gt, cam, None)?.encode_pfm(),
        )?;
        images.push(name);
    }
    let manifest = json!({ "poses": poses, "images": images });
    write_file(
        &dir.join("targets.json"),
        serde_json::to_string_pretty(&manifest)
            .expect("manifest serializes")
            .as_bytes(),
    )?;
    let truth: Vec<_> = tr
        .emitting_faces
        .iter()
        .map(|f| json!({"mesh": 0, "face": f}))
        .collect();
    write_file(
        &dir.join("truth.json"),
        serde_json::to_string_pretty(
            &json!({ "emitting": truth, "emission": hybridrt::scenes::TOY_ROOM_EMISSION }),
        )
        .expect("truth serializes")
        .as_bytes(),
    )
}

fn write_scene(path: &Path, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("scene serializes");
    // Catch typos here rather than when the scene is first used.
    SceneConfig::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    write_file(path, text.as_bytes())
}

fn example_scenes(dir: &Path) -> Result<(), CliError> {
    mkdir(dir)?;
    let scenes = [
        (
            "slab.json",
            json!({
                "field": {"preset": {"kind": "smoke_slab"}},
                "camera": {"position": [0, 0, -1], "target": [0, 0, 1], "up": [0, 1, 0], "vfov_deg": 0.1, "width": 8, "height": 8},
                "render": {"spp": 16}
            }),
        ),
        (
            "furnace.json",
            json!({
                "field": {"preset": {"kind": "furnace_shell", "inner_radius": 2, "half_extent": 3, "res": 32, "sigma": 20, "radiance": [0.5, 0.5, 0.5]}},
                "meshes": [{"shape": {"kind": "icosphere", "center": [0, 0, 0], "radius": 0.5, "level": 3},
                            "bsdf": {"kind": "lambertian", "albedo": [1, 1, 1]}}],
                "camera": {"position": [0, -1.5, 0], "target": [0, 0, 0], "vfov_deg": 30, "width": 64, "height": 64},
                "render": {"spp": 64, "n_bounces": 64}
            }),
        ),
        (
            "two_room.json",
            json!({
                "field": {"preset": {"kind": "two_room", "res": 48}},
                "meshes": [
                    {"shape": {"kind": "quad", "center": [0, 0, 0], "u": [2.5, 0, 0], "v": [0, 1.5, 0]}, "bsdf": {"kind": "lambertian", "albedo": [0.6, 0.6, 0.6]}},
                    {"shape": {"kind": "icosphere", "center": [-1, 0, 0.45], "radius": 0.4, "level": 2}, "bsdf": {"kind": "mirror", "reflectance": [0.9, 0.9, 0.9]}},
                    {"shape": {"kind": "icosphere", "center": [1, 0, 0.45], "radius": 0.4, "level": 2}, "bsdf": {"kind": "dielectric", "ior": 1.5, "tint": [1, 1, 1]}}
                ],
                "camera": {"position": [0, -4, 1.2], "target": [0, 0, 0.6], "vfov_deg": 50, "width": 64, "height": 64},
                "render": {"spp": 16}
            }),
        ),
        (
            "cloth_drop.json",
            json!({
                "meshes": [
                    {"shape": {"kind": "cloth", "origin": [-0.6, -0.6, 1.2], "u": [1.2, 0, 0], "v": [0, 1.2, 0], "nx": 12, "ny": 12, "mass": 0.2, "compliance": 1e-6},
                     "bsdf": {"kind": "lambertian", "albedo": [0.8, 0.3, 0.3]}},
                    {"shape": {"kind": "icosphere", "center": [0, 0, 0.4], "radius": 0.4, "level": 2}, "collider": true},
                    {"shape": {"kind": "quad", "center": [0, 0, 0], "u": [2, 0, 0], "v": [0, 2, 0]}}
                ],
                "emitters": [{"vertices": [[-1, -1, 3], [1, -1, 3], [0, 1, 3]], "intensity": 1}],
                "camera": {"position": [0, -3, 1.5], "target": [0, 0, 0.5], "width": 64, "height": 48},
                "sim": {"ground": 0, "substeps": 10, "iterations": 10, "damping": 1}
            }),
        ),
        (
            "ball_hits_field.json",
            json!({
                "field": {"preset": {"kind": "sphere", "radius": 0.5, "res": 24, "sigma": 8, "radiance": [1.0, 0.6, 0.3]},
                          "transform": {"translate": [0, 0, 0.5]},
                          "dynamic": {"mass": 1}},
                "meshes": [
                    {"shape": {"kind": "icosphere", "center": [0, 0, 0], "radius": 0.2, "level": 2},
                     "transform": {"translate": [-2, 0, 0.5]},
                     "dynamic": {"mass": 0.5, "velocity": [4, 0, 0], "collider": "sphere"}},
                    {"shape": {"kind": "quad", "center": [0, 0, 0], "u": [3, 0, 0], "v": [0, 3, 0]}}
                ],
                "camera": {"position": [0, -4, 1.5], "target": [0, 0, 0.5], "width": 64, "height": 48},
                "sim": {"gravity": [0, 0, 0], "restitution": 0.8}
            }),
        ),
    ];
    for (name, v) in scenes {
        write_scene(&dir.join(name), &v)?;
    }
    Ok(())
}
