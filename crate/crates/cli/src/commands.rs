use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;
use serde_json::json;

use hybridrt::config::{load_scene, CameraDesc, SceneConfig};
use hybridrt::estimate::{
    build_transport, optimize_emission, prune_emitters, write_emitters, write_loss_csv,
    EstimatorConfig,
};
use hybridrt::hdr::io::{read_bracket, read_crf_csv, write_crf_csv};
use hybridrt::hdr::{merge_hdr, normalize_radiance, recover_crf};
use hybridrt::image::finalize;
use hybridrt::render::render;
use hybridrt::rng::Rng;
use hybridrt::sim::Binding;
use hybridrt::surface::obj::write_obj;
use hybridrt::{Camera, HdrImage, Scene, World};

use crate::error::CliError;
use crate::{
    Cli, Command, EstimateArgs, HdrMergeArgs, HdrRecoverArgs, Overrides, RenderArgs, SimulateArgs,
};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Render(a) => cmd_render(a, cli.threads),
        Command::Simulate(a) => cmd_simulate(a, cli.threads),
        Command::HdrRecover(a) => cmd_hdr_recover(a),
        Command::HdrMerge(a) => cmd_hdr_merge(a),
        Command::EstimateEmitters(a) => cmd_estimate(a),
        Command::GenAssets(a) => crate::assets::generate(a),
    }
}

fn apply_overrides(cfg: &mut SceneConfig, o: &Overrides) -> Result<(), CliError> {
    if let Some(spp) = o.spp {
        cfg.render.spp = spp;
    }
    if let Some(seed) = o.seed {
        cfg.render.seed = seed;
    }
    if let Some(w) = o.width {
        cfg.camera.width = w;
    }
    if let Some(h) = o.height {
        cfg.camera.height = h;
    }
    cfg.validate()?;
    Ok(())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn render_image(
    scene: &Scene,
    camera: &Camera,
    threads: Option<usize>,
) -> Result<HdrImage, CliError> {
    let img = render(scene, camera, threads).map_err(|e| CliError::Config(e.to_string()))?;
    if img
        .pixels()
        .iter()
        .any(|p| !(p.r.is_finite() && p.g.is_finite() && p.b.is_finite()))
    {
        return Err(CliError::Numeric(
            "render produced non-finite pixels".into(),
        ));
    }
    Ok(img)
}

fn cmd_render(a: &RenderArgs, threads: Option<usize>) -> Result<(), CliError> {
    let mut loaded = load_scene(&a.scene)?;
    apply_overrides(&mut loaded.config, &a.overrides)?;
    let built = loaded.config.build::<f64>(&loaded.base)?;
    let t0 = Instant::now();
    let img = render_image(&built.scene, &built.camera, threads)?;
    log::info!(
        "rendered {}x{} in {:.2?}",
        img.width(),
        img.height(),
        t0.elapsed()
    );
    write_file(&a.out, &finalize(&img, a.hdr))
}

fn snapshot(world: &World, scene: &Scene, frame: usize) -> serde_json::Value {
    let bodies: Vec<_> = world
        .bodies
        .iter()
        .map(|b| {
            let q = b.orientation;
            json!({
                "com": b.com,
                "orientation": [q.w, q.x, q.y, q.z],
                "lin_vel": b.lin_vel,
                "ang_vel": b.ang_vel,
            })
        })
        .collect();
    let fields: Vec<_> = scene
        .fields
        .iter()
        .map(|f| f.world_from_field.matrix())
        .collect();
    let meshes: Vec<_> = scene
        .meshes
        .iter()
        .map(|m| m.world_from_object.matrix())
        .collect();
    json!({
        "frame": frame,
        "time": world.time,
        "energy": world.energy(),
        "bodies": bodies,
        "field_transforms": fields,
        "mesh_transforms": meshes,
    })
}

fn bound_meshes(world: &World) -> Vec<usize> {
    let mut out: Vec<usize> = world
        .bindings
        .iter()
        .filter_map(|b| match b {
            Binding::Cloth { mesh, .. } | Binding::BodyMesh { mesh, .. } => Some(*mesh),
            Binding::BodyField { .. } => None,
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn write_frame(
    a: &SimulateArgs,
    world: &World,
    scene: &Scene,
    camera: &Camera,
    frame: usize,
    threads: Option<usize>,
) -> Result<(), CliError> {
    let stem = format!("frame_{frame:04}");
    let text =
        serde_json::to_string_pretty(&snapshot(world, scene, frame)).expect("snapshot serializes");
    write_file(&a.out.join(format!("{stem}.json")), text.as_bytes())?;
    for m in bound_meshes(world) {
        let mesh = &scene.meshes[m];
        let path = a.out.join(format!("{stem}_mesh{m:02}.obj"));
        write_obj(&path, &mesh.world_vertices(), mesh.indices())
            .map_err(|e| CliError::io(&path, e))?;
    }
    if a.render {
        let img = render_image(scene, camera, threads)?;
        let ext = if a.hdr { "pfm" } else { "ppm" };
        write_file(&a.out.join(format!("{stem}.{ext}")), &finalize(&img, a.hdr))?;
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, threads: Option<usize>) -> Result<(), CliError> {
    let mut loaded = load_scene(&a.scene)?;
    apply_overrides(&mut loaded.config, &a.overrides)?;
    let mut built = loaded.config.build::<f64>(&loaded.base)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    write_frame(a, &built.world, &built.scene, &built.camera, 0, threads)?;
    let t0 = Instant::now();
    for frame in 1..=a.frames {
        built.world.step()?;
        let report = built.world.sync_to_renderer(&mut built.scene)?;
        log::debug!("frame {frame}: {report:?}");
        write_frame(a, &built.world, &built.scene, &built.camera, frame, threads)?;
    }
    log::info!("simulated {} frames in {:.2?}", a.frames, t0.elapsed());
    Ok(())
}

fn cmd_hdr_recover(a: &HdrRecoverArgs) -> Result<(), CliError> {
    let bracket = read_bracket(&a.bracket)?;
    if !(a.lambda >= 0.0 && a.lambda.is_finite()) {
        return Err(CliError::Config(
            "--lambda must be finite and non-negative".into(),
        ));
    }
    let crf = recover_crf::<f64>(&bracket, a.lambda, a.samples, &mut Rng::new(a.seed))?;
    if !crf.is_monotone() {
        log::warn!("recovered response is not monotone");
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    write_crf_csv(&a.out, &crf)?;
    Ok(())
}

fn cmd_hdr_merge(a: &HdrMergeArgs) -> Result<(), CliError> {
    let bracket = read_bracket(&a.bracket)?;
    let crf = read_crf_csv::<f64>(&a.crf)?;
    let mut img = merge_hdr(&bracket, &crf);
    if a.normalize {
        img = normalize_radiance(&img);
    }
    write_file(&a.out, &img.encode_pfm())
}

/// Target images and the poses they were taken from.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetManifest {
    pub poses: Vec<CameraDesc>,
    pub images: Vec<PathBuf>,
}

fn cmd_estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let mut loaded = load_scene(&a.scene)?;
    let o = Overrides {
        spp: a.spp,
        seed: a.seed,
        ..Overrides::default()
    };
    apply_overrides(&mut loaded.config, &o)?;
    let built = loaded.config.build::<f64>(&loaded.base)?;
    let text = fs::read_to_string(&a.targets).map_err(|e| CliError::io(&a.targets, e))?;
    let manifest: TargetManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", a.targets.display())))?;
    if manifest.poses.len() != manifest.images.len() {
        return Err(CliError::Config(format!(
            "{} poses but {} images",
            manifest.poses.len(),
            manifest.images.len()
        )));
    }
    let poses = manifest
        .poses
        .iter()
        .map(|p| p.to_camera::<f64>())
        .collect::<Result<Vec<_>, _>>()?;
    let base = a.targets.parent().unwrap_or(Path::new("."));
    let images = manifest
        .images
        .iter()
        .map(|p| {
            let full = base.join(p);
            HdrImage::read_pfm(&full).map_err(|e| CliError::io(&full, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str::<EstimatorConfig>(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => EstimatorConfig::default(),
    };
    cfg.validate()?;

    let t0 = Instant::now();
    let op = build_transport(
        &built.scene.meshes,
        &poses,
        built.scene.settings,
        a.max_depth,
    )?;
    log::info!(
        "transport over {} faces built in {:.2?}",
        op.face_count(),
        t0.elapsed()
    );
    let target = op.flatten_images(&images)?;
    let est = optimize_emission(&cfg, &op, &target)?;
    let set = prune_emitters(
        &built.scene.meshes,
        op.faces(),
        &est.emission,
        cfg.brightness_threshold,
    );
    log::info!("kept {} of {} faces", set.len(), op.face_count());

    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    write_emitters(&a.out.join("emitters.json"), &set)?;
    write_loss_csv(&a.out.join("loss.csv"), &est.history)?;
    let faces: Vec<_> = op
        .faces()
        .iter()
        .zip(&est.emission)
        .map(|(f, e)| json!({"mesh": f.mesh, "face": f.face, "rgb": [e.r, e.g, e.b]}))
        .collect();
    let text =
        serde_json::to_string_pretty(&json!({ "faces": faces })).expect("emission serializes");
    write_file(&a.out.join("emission.json"), text.as_bytes())
}
