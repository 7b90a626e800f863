//! JSON scene description: schema, defaults, validation and loading. Paths
//! inside a scene file are relative to the file.

mod build;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{Built, DEFAULT_MAX_COLLISION_VERTICES};

use crate::render::Emitter;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{key}: {msg}")]
    Parse { key: String, msg: String },
    #[error("{key}: {msg}")]
    Invalid { key: String, msg: String },
    #[error("{key}: file not found: {path}")]
    MissingFile { key: String, path: String },
    #[error("{key}: {path}: {msg}")]
    Asset {
        key: String,
        path: String,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl ConfigError {
    pub(crate) fn invalid(key: impl Into<String>, msg: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// The offending key, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Parse { key, .. }
            | ConfigError::Invalid { key, .. }
            | ConfigError::MissingFile { key, .. }
            | ConfigError::Asset { key, .. } => Some(key),
            ConfigError::Io { .. } => None,
        }
    }
}

type V3 = [f64; 3];

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meshes: Vec<MeshDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub emitters: Vec<Emitter<f64>>,
    /// Emitter JSON as written by `estimate-emitters`; appended to `emitters`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emitters_file: Option<PathBuf>,
    pub camera: CameraDesc,
    #[serde(default, skip_serializing_if = "is_default")]
    pub render: RenderDesc,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sim: SimDesc,
}

/// A radiance field from a `.rfgrid` file or an analytic preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<FieldPreset>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub transform: TransformDesc,
    /// Makes the field a rigid body.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamic: Option<BodyDesc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldPreset {
    SmokeSlab {},
    Sphere {
        radius: f64,
        res: usize,
        sigma: f64,
        radiance: V3,
    },
    FurnaceShell {
        inner_radius: f64,
        half_extent: f64,
        res: usize,
        sigma: f64,
        radiance: V3,
    },
    TwoRoom {
        res: usize,
    },
    UniformBox {
        min: V3,
        max: V3,
        res: [usize; 3],
        sigma: f64,
        radiance: V3,
    },
}

/// Scale, then rotation by `angle_deg` about `axis`, then translation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformDesc {
    pub translate: V3,
    pub axis: V3,
    pub angle_deg: f64,
    pub scale: f64,
}

impl Default for TransformDesc {
    fn default() -> Self {
        Self {
            translate: [0.0; 3],
            axis: [0.0, 0.0, 1.0],
            angle_deg: 0.0,
            scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshDesc {
    /// Wavefront OBJ file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeDesc>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub bsdf: BsdfDesc,
    /// Uniform per-face emission.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission: Option<V3>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub transform: TransformDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamic: Option<BodyDesc>,
    /// Static obstacle for the simulation (needs a closed mesh).
    #[serde(default, skip_serializing_if = "is_default")]
    pub collider: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDesc {
    Icosphere {
        center: V3,
        radius: f64,
        #[serde(default = "default_level")]
        level: u32,
    },
    Cube {
        min: V3,
        max: V3,
        #[serde(default)]
        inward: bool,
    },
    /// Parallelogram `center ± u ± v`.
    Quad { center: V3, u: V3, v: V3 },
    /// Simulated sheet of `nx × ny` particles spanning `origin + a·u + b·v`.
    Cloth {
        origin: V3,
        u: V3,
        v: V3,
        nx: usize,
        ny: usize,
        mass: f64,
        #[serde(default)]
        compliance: f64,
        #[serde(default)]
        pinned: Vec<[usize; 2]>,
    },
}

fn default_level() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BsdfDesc {
    Lambertian { albedo: V3 },
    Mirror { reflectance: V3 },
    Dielectric { ior: f64, tint: V3 },
}

impl Default for BsdfDesc {
    fn default() -> Self {
        BsdfDesc::Lambertian { albedo: [0.5; 3] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColliderKind {
    /// Distance field baked from the asset; vertices probe other colliders.
    #[default]
    Sdf,
    /// Bounding sphere around the centroid.
    Sphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDesc {
    pub mass: f64,
    #[serde(default, skip_serializing_if = "is_default")]
    pub velocity: V3,
    #[serde(default, skip_serializing_if = "is_default")]
    pub angular_velocity: V3,
    #[serde(default, skip_serializing_if = "is_default")]
    pub collider: ColliderKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraDesc {
    pub position: V3,
    pub target: V3,
    #[serde(default = "default_up")]
    pub up: V3,
    #[serde(default = "default_vfov")]
    pub vfov_deg: f64,
    pub width: usize,
    pub height: usize,
}

fn default_up() -> V3 {
    [0.0, 0.0, 1.0]
}

fn default_vfov() -> f64 {
    45.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderDesc {
    pub spp: u32,
    pub n_bounces: u32,
    pub threshold: f64,
    pub march_step: f64,
    pub seed: u64,
}

impl Default for RenderDesc {
    fn default() -> Self {
        Self {
            spp: 16,
            n_bounces: 8,
            threshold: 1e-3,
            march_step: 0.01,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimDesc {
    pub gravity: V3,
    pub dt: f64,
    pub substeps: usize,
    pub iterations: usize,
    pub restitution: f64,
    pub friction: f64,
    pub max_speed: f64,
    pub damping: f64,
    /// Fraction of the peak density where field colliders are cut.
    pub field_sdf_threshold: f64,
    /// Resolution of distance fields baked from meshes.
    pub sdf_res: usize,
    /// Height of an unbounded ground plane.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground: Option<f64>,
}

impl Default for SimDesc {
    fn default() -> Self {
        Self {
            gravity: [0.0, 0.0, -9.81],
            dt: 1.0 / 60.0,
            substeps: 4,
            iterations: 8,
            restitution: 0.3,
            friction: 0.5,
            max_speed: 1000.0,
            damping: 0.0,
            field_sdf_threshold: 0.5,
            sdf_res: 32,
            ground: None,
        }
    }
}

fn finite3(key: &str, v: &V3) -> Result<(), ConfigError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, "components must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn color(key: &str, v: &V3) -> Result<(), ConfigError> {
    if v.iter().all(|x| x.is_finite() && *x >= 0.0) {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            key,
            "channels must be finite and non-negative",
        ))
    }
}

impl TransformDesc {
    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        finite3(&format!("{key}.translate"), &self.translate)?;
        finite3(&format!("{key}.axis"), &self.axis)?;
        if self.angle_deg != 0.0 && self.axis.iter().all(|x| *x == 0.0) {
            return Err(ConfigError::invalid(
                format!("{key}.axis"),
                "rotation axis must be non-zero",
            ));
        }
        if !self.angle_deg.is_finite() {
            return Err(ConfigError::invalid(
                format!("{key}.angle_deg"),
                "must be finite",
            ));
        }
        positive(&format!("{key}.scale"), self.scale)
    }
}

impl BodyDesc {
    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        positive(&format!("{key}.mass"), self.mass)?;
        finite3(&format!("{key}.velocity"), &self.velocity)?;
        finite3(&format!("{key}.angular_velocity"), &self.angular_velocity)
    }
}

impl SceneConfig {
    /// Parses and validates a scene document (no file checks).
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SceneConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            ConfigError::Parse {
                key: if key == "." { "(root)".into() } else { key },
                msg: e.into_inner().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.camera;
        finite3("camera.position", &c.position)?;
        finite3("camera.target", &c.target)?;
        finite3("camera.up", &c.up)?;
        if c.width == 0 {
            return Err(ConfigError::invalid(
                "camera.width",
                "resolution must be positive",
            ));
        }
        if c.height == 0 {
            return Err(ConfigError::invalid(
                "camera.height",
                "resolution must be positive",
            ));
        }
        if !(c.vfov_deg > 0.0 && c.vfov_deg < 180.0) {
            return Err(ConfigError::invalid(
                "camera.vfov_deg",
                "must lie in (0, 180)",
            ));
        }
        let r = &self.render;
        if r.spp == 0 {
            return Err(ConfigError::invalid("render.spp", "must be at least 1"));
        }
        if !(r.threshold >= 0.0 && r.threshold.is_finite()) {
            return Err(ConfigError::invalid(
                "render.threshold",
                "must be finite and non-negative",
            ));
        }
        positive("render.march_step", r.march_step)?;
        let s = &self.sim;
        finite3("sim.gravity", &s.gravity)?;
        positive("sim.dt", s.dt)?;
        if s.substeps == 0 {
            return Err(ConfigError::invalid("sim.substeps", "must be at least 1"));
        }
        if s.iterations == 0 {
            return Err(ConfigError::invalid("sim.iterations", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&s.restitution) {
            return Err(ConfigError::invalid(
                "sim.restitution",
                "must lie in [0, 1]",
            ));
        }
        if !(s.friction >= 0.0 && s.friction.is_finite()) {
            return Err(ConfigError::invalid("sim.friction", "must be non-negative"));
        }
        positive("sim.max_speed", s.max_speed)?;
        if !(s.damping >= 0.0 && s.damping.is_finite()) {
            return Err(ConfigError::invalid("sim.damping", "must be non-negative"));
        }
        if !(s.field_sdf_threshold > 0.0 && s.field_sdf_threshold < 1.0) {
            return Err(ConfigError::invalid(
                "sim.field_sdf_threshold",
                "must lie in (0, 1)",
            ));
        }
        if s.sdf_res < 2 {
            return Err(ConfigError::invalid("sim.sdf_res", "must be at least 2"));
        }
        if let Some(g) = s.ground {
            if !g.is_finite() {
                return Err(ConfigError::invalid("sim.ground", "must be finite"));
            }
        }
        if let Some(f) = &self.field {
            match (&f.path, &f.preset) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(ConfigError::invalid(
                        "field",
                        "give exactly one of `path` or `preset`",
                    ));
                }
                _ => {}
            }
            f.transform.validate("field.transform")?;
            if f.transform.scale != 1.0 {
                return Err(ConfigError::invalid(
                    "field.transform.scale",
                    "fields only take rigid transforms",
                ));
            }
            if let Some(b) = &f.dynamic {
                b.validate("field.dynamic")?;
                if b.collider != ColliderKind::Sdf {
                    return Err(ConfigError::invalid(
                        "field.dynamic.collider",
                        "fields collide through their distance field",
                    ));
                }
            }
            if let Some(p) = &f.preset {
                validate_preset(p)?;
            }
        }
        for (i, m) in self.meshes.iter().enumerate() {
            let key = format!("meshes[{i}]");
            match (&m.path, &m.shape) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(ConfigError::invalid(
                        key,
                        "give exactly one of `path` or `shape`",
                    ));
                }
                _ => {}
            }
            m.transform.validate(&format!("{key}.transform"))?;
            if let Some(e) = &m.emission {
                color(&format!("{key}.emission"), e)?;
            }
            match &m.bsdf {
                BsdfDesc::Lambertian { albedo } => {
                    albedo_range(&format!("{key}.bsdf.albedo"), albedo)?
                }
                BsdfDesc::Mirror { reflectance } => {
                    albedo_range(&format!("{key}.bsdf.reflectance"), reflectance)?
                }
                BsdfDesc::Dielectric { ior, tint } => {
                    positive(&format!("{key}.bsdf.ior"), *ior)?;
                    albedo_range(&format!("{key}.bsdf.tint"), tint)?;
                }
            }
            if let Some(b) = &m.dynamic {
                b.validate(&format!("{key}.dynamic"))?;
                if m.transform.scale != 1.0 {
                    return Err(ConfigError::invalid(
                        format!("{key}.transform.scale"),
                        "dynamic meshes only take rigid transforms",
                    ));
                }
                if m.collider {
                    return Err(ConfigError::invalid(
                        format!("{key}.collider"),
                        "a mesh cannot be both dynamic and a static collider",
                    ));
                }
            }
            if let Some(shape) = &m.shape {
                validate_shape(&key, shape, m)?;
            }
        }
        for (i, e) in self.emitters.iter().enumerate() {
            for v in &e.vertices {
                if !v.is_finite() {
                    return Err(ConfigError::invalid(
                        format!("emitters[{i}].vertices"),
                        "must be finite",
                    ));
                }
            }
            if !(0.0..=1.0).contains(&e.intensity) {
                return Err(ConfigError::invalid(
                    format!("emitters[{i}].intensity"),
                    "must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }

    /// Checks that every referenced file exists, relative to `base`.
    pub fn check_files(&self, base: &Path) -> Result<(), ConfigError> {
        let check = |key: String, p: &Path| {
            let full = base.join(p);
            if full.is_file() {
                Ok(())
            } else {
                Err(ConfigError::MissingFile {
                    key,
                    path: full.display().to_string(),
                })
            }
        };
        if let Some(FieldDesc { path: Some(p), .. }) = &self.field {
            check("field.path".into(), p)?;
        }
        for (i, m) in self.meshes.iter().enumerate() {
            if let Some(p) = &m.path {
                check(format!("meshes[{i}].path"), p)?;
            }
        }
        if let Some(p) = &self.emitters_file {
            check("emitters_file".into(), p)?;
        }
        Ok(())
    }
}

fn albedo_range(key: &str, v: &V3) -> Result<(), ConfigError> {
    if v.iter().all(|x| (0.0..=1.0).contains(x)) {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, "channels must lie in [0, 1]"))
    }
}

fn validate_preset(p: &FieldPreset) -> Result<(), ConfigError> {
    let key = "field.preset";
    let res_ok = |r: usize| r >= 2;
    match p {
        FieldPreset::SmokeSlab {} => Ok(()),
        FieldPreset::Sphere {
            radius,
            res,
            sigma,
            radiance,
        } => {
            positive(&format!("{key}.radius"), *radius)?;
            if !res_ok(*res) {
                return Err(ConfigError::invalid(
                    format!("{key}.res"),
                    "must be at least 2",
                ));
            }
            positive(&format!("{key}.sigma"), *sigma)?;
            color(&format!("{key}.radiance"), radiance)
        }
        FieldPreset::FurnaceShell {
            inner_radius,
            half_extent,
            res,
            sigma,
            radiance,
        } => {
            positive(&format!("{key}.inner_radius"), *inner_radius)?;
            positive(&format!("{key}.half_extent"), *half_extent)?;
            if !res_ok(*res) {
                return Err(ConfigError::invalid(
                    format!("{key}.res"),
                    "must be at least 2",
                ));
            }
            positive(&format!("{key}.sigma"), *sigma)?;
            color(&format!("{key}.radiance"), radiance)
        }
        FieldPreset::TwoRoom { res } => {
            if !res_ok(*res) {
                return Err(ConfigError::invalid(
                    format!("{key}.res"),
                    "must be at least 2",
                ));
            }
            Ok(())
        }
        FieldPreset::UniformBox {
            min,
            max,
            res,
            sigma,
            radiance,
        } => {
            finite3(&format!("{key}.min"), min)?;
            finite3(&format!("{key}.max"), max)?;
            if (0..3).any(|i| min[i] >= max[i]) {
                return Err(ConfigError::invalid(
                    format!("{key}.max"),
                    "must exceed min on every axis",
                ));
            }
            if !res.iter().all(|r| res_ok(*r)) {
                return Err(ConfigError::invalid(
                    format!("{key}.res"),
                    "must be at least 2 per axis",
                ));
            }
            if !(*sigma >= 0.0 && sigma.is_finite()) {
                return Err(ConfigError::invalid(
                    format!("{key}.sigma"),
                    "must be finite and non-negative",
                ));
            }
            color(&format!("{key}.radiance"), radiance)
        }
    }
}

fn validate_shape(key: &str, shape: &ShapeDesc, m: &MeshDesc) -> Result<(), ConfigError> {
    let key = format!("{key}.shape");
    match shape {
        ShapeDesc::Icosphere {
            center,
            radius,
            level,
        } => {
            finite3(&format!("{key}.center"), center)?;
            positive(&format!("{key}.radius"), *radius)?;
            if *level > 6 {
                return Err(ConfigError::invalid(format!("{key}.level"), "at most 6"));
            }
            Ok(())
        }
        ShapeDesc::Cube { min, max, .. } => {
            finite3(&format!("{key}.min"), min)?;
            finite3(&format!("{key}.max"), max)?;
            if (0..3).any(|i| min[i] >= max[i]) {
                return Err(ConfigError::invalid(
                    format!("{key}.max"),
                    "must exceed min on every axis",
                ));
            }
            Ok(())
        }
        ShapeDesc::Quad { center, u, v } => {
            finite3(&format!("{key}.center"), center)?;
            finite3(&format!("{key}.u"), u)?;
            finite3(&format!("{key}.v"), v)
        }
        ShapeDesc::Cloth {
            origin,
            u,
            v,
            nx,
            ny,
            mass,
            compliance,
            pinned,
        } => {
            finite3(&format!("{key}.origin"), origin)?;
            finite3(&format!("{key}.u"), u)?;
            finite3(&format!("{key}.v"), v)?;
            if *nx < 2 || *ny < 2 {
                return Err(ConfigError::invalid(
                    format!("{key}.nx"),
                    "cloth needs at least 2x2 particles",
                ));
            }
            positive(&format!("{key}.mass"), *mass)?;
            if !(*compliance >= 0.0 && compliance.is_finite()) {
                return Err(ConfigError::invalid(
                    format!("{key}.compliance"),
                    "must be non-negative",
                ));
            }
            if let Some(p) = pinned.iter().find(|p| p[0] >= *nx || p[1] >= *ny) {
                return Err(ConfigError::invalid(
                    format!("{key}.pinned"),
                    format!("({}, {}) outside the grid", p[0], p[1]),
                ));
            }
            if m.dynamic.is_some() || m.collider {
                return Err(ConfigError::invalid(
                    key,
                    "cloth is simulated on its own; drop `dynamic`/`collider`",
                ));
            }
            if m.transform != TransformDesc::default() {
                return Err(ConfigError::invalid(
                    format!("{}.transform", key.trim_end_matches(".shape")),
                    "cloth is placed by its origin; no transform",
                ));
            }
            Ok(())
        }
    }
}

/// Parses `text` and checks referenced files relative to `base`.
pub fn parse_scene(text: &str, base: &Path) -> Result<SceneConfig, ConfigError> {
    let cfg = SceneConfig::from_json(text)?;
    cfg.check_files(base)?;
    Ok(cfg)
}

/// A parsed scene plus the directory its relative paths resolve against.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedScene {
    pub config: SceneConfig,
    pub base: PathBuf,
}

pub fn load_scene(path: &Path) -> Result<LoadedScene, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let config = parse_scene(&text, &base)?;
    Ok(LoadedScene { config, base })
}
