//! Hybrid path construction: volume marching between surface bounces.

mod camera;
mod emitters;
mod path;
mod scene;
mod state;

use rayon::prelude::*;
use thiserror::Error;

pub use camera::{Camera, CameraError};
pub use emitters::{shadow_mask, Emitter, EmitterSet, MASK_FLOOR};
pub use path::{trace_emission_weights, trace_path, trace_path_observed, PathKey};
pub use scene::{RenderSettings, Scene, SPAWN_OFFSET};
pub use state::PathState;

pub use crate::image::{finalize, HdrImage};
use crate::math::Spectrum;
use crate::num::Real;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("spp must be at least 1")]
    Spp,
    #[error("could not start worker pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

fn render_row<S: Real>(scene: &Scene<S>, camera: &Camera<S>, y: usize) -> Vec<Spectrum<S>> {
    let s = &scene.settings;
    let inv = S::one() / S::from_usize_lossy(s.spp as usize);
    (0..camera.width())
        .map(|x| {
            let pixel = (y * camera.width() + x) as u64;
            let mut acc = Spectrum::black();
            for sample in 0..s.spp {
                let ray = camera.pixel_ray(s.seed, x, y, sample, s.spp);
                let key = PathKey {
                    seed: s.seed,
                    pixel,
                    sample: sample as u64,
                };
                acc += trace_path(scene, ray, key);
            }
            acc * inv
        })
        .collect()
}

/// Renders with the scene's settings. `threads = None` uses the global
/// pool; the image does not depend on the worker count.
pub fn render<S: Real>(
    scene: &Scene<S>,
    camera: &Camera<S>,
    threads: Option<usize>,
) -> Result<HdrImage<S>, RenderError> {
    if scene.settings.spp == 0 {
        return Err(RenderError::Spp);
    }
    let run = || -> Vec<Spectrum<S>> {
        (0..camera.height())
            .into_par_iter()
            .flat_map_iter(|y| render_row(scene, camera, y))
            .collect()
    };
    let pixels = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(run),
        None => run(),
    };
    Ok(
        HdrImage::from_pixels(camera.width(), camera.height(), pixels)
            .expect("one value per pixel"),
    )
}
