//! Per-face emission recovery from rendered targets: a dense linear
//! transport operator, an L1-regularized projected gradient descent with a
//! clip/boost schedule, and pruning into a shadow-ray emitter set.

mod optimize;
mod transport;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use optimize::{
    clip_emission, gradient, loss, optimize_emission, Estimate, EstimatorConfig, LossRecord,
    ScheduleEvent,
};
pub use transport::{
    build_transport, FaceRef, TransportOperator, DEFAULT_MAX_DEPTH, MAX_TRANSPORT_ENTRIES,
};

use crate::math::{Spectrum, Vec3};
use crate::num::Real;
use crate::render::{Emitter, EmitterSet};
use crate::surface::TriangleMesh;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("invalid estimator settings: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("dense transport for {faces} faces over {pixels} pixels exceeds the size limit; reduce resolution or poses, or use finite differences")]
    TooLarge { faces: usize, pixels: usize },
    #[error("diverged at epoch {epoch}: loss {loss:.6e} exceeds 10x the initial {initial:.6e} (step {step:.3e})")]
    Diverged {
        epoch: usize,
        loss: f64,
        initial: f64,
        step: f64,
    },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

/// Keeps faces whose brightest channel reaches `threshold`. Intensities are
/// luminance relative to the brightest kept face.
pub fn prune_emitters<S: Real>(
    meshes: &[TriangleMesh<S>],
    faces: &[FaceRef],
    emission: &[Spectrum<S>],
    threshold: S,
) -> EmitterSet<S> {
    let kept: Vec<(FaceRef, Spectrum<S>)> = faces
        .iter()
        .zip(emission)
        .filter(|(_, e)| e.max_channel() >= threshold && !e.is_black())
        .map(|(f, e)| (*f, *e))
        .collect();
    let lum_max = kept
        .iter()
        .map(|(_, e)| e.luminance())
        .fold(S::zero(), S::max);
    EmitterSet::new(
        kept.into_iter()
            .map(|(f, e)| Emitter {
                vertices: meshes[f.mesh].world_triangle(f.face),
                intensity: if lum_max > S::zero() {
                    (e.luminance() / lum_max).clamp_to(S::zero(), S::one())
                } else {
                    S::zero()
                },
            })
            .collect(),
    )
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmitterFile {
    emitters: Vec<Emitter<f64>>,
}

/// `{"emitters": [{"vertices": [[x,y,z], ×3], "intensity": r}, …]}`
pub fn emitters_to_json<S: Real>(set: &EmitterSet<S>) -> String {
    let file = EmitterFile {
        emitters: set
            .emitters()
            .iter()
            .map(|e| Emitter {
                vertices: e.vertices.map(|v| Vec3::from_f64(v.to_f64())),
                intensity: e.intensity.to_f64_lossy(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("emitters serialize")
}

pub fn emitters_from_json<S: Real>(text: &str) -> Result<EmitterSet<S>, serde_json::Error> {
    let file: EmitterFile = serde_json::from_str(text)?;
    Ok(EmitterSet::new(
        file.emitters
            .into_iter()
            .map(|e| Emitter {
                vertices: e.vertices.map(|v| Vec3::from_f64(v.to_f64())),
                intensity: S::lit(e.intensity),
            })
            .collect(),
    ))
}

pub fn write_emitters<S: Real>(path: &Path, set: &EmitterSet<S>) -> Result<(), EstimateError> {
    fs::write(path, emitters_to_json(set)).map_err(|e| EstimateError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn read_emitters<S: Real>(path: &Path) -> Result<EmitterSet<S>, EstimateError> {
    let text = fs::read_to_string(path).map_err(|e| EstimateError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    emitters_from_json(&text).map_err(|e| EstimateError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// `epoch,event,loss` rows.
pub fn write_loss_csv(path: &Path, history: &[LossRecord]) -> Result<(), EstimateError> {
    let io = |e: &dyn std::fmt::Display| EstimateError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    for r in history {
        w.serialize(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}
