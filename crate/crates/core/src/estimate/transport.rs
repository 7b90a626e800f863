use rayon::prelude::*;

use super::EstimateError;
use crate::image::HdrImage;
use crate::math::Spectrum;
use crate::num::Real;
use crate::render::{trace_emission_weights, Camera, EmitterSet, PathKey, RenderSettings, Scene};
use crate::surface::TriangleMesh;

/// Largest dense operator (faces × pixel values) built before refusing.
pub const MAX_TRANSPORT_ENTRIES: usize = 50_000_000;

/// Path depth used when building transport columns.
pub const DEFAULT_MAX_DEPTH: u32 = 3;

/// A face of a mesh in a multi-mesh scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceRef {
    pub mesh: usize,
    pub face: usize,
}

/// Dense linear map from per-face RGB emission to rendered pixels of every
/// pose. Column `f` holds the images produced by unit white emission on face
/// `f`; channel `c` of a pixel responds only to channel `c` of emission.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportOperator<S> {
    width: usize,
    height: usize,
    poses: usize,
    faces: Vec<FaceRef>,
    /// `columns[f][pose·w·h + y·w + x]`.
    columns: Vec<Vec<Spectrum<S>>>,
}

impl<S: Real> TransportOperator<S> {
    pub fn faces(&self) -> &[FaceRef] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn pose_count(&self) -> usize {
        self.poses
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Number of pixels over all poses.
    pub fn pixel_count(&self) -> usize {
        self.poses * self.width * self.height
    }

    pub fn column(&self, f: usize) -> &[Spectrum<S>] {
        &self.columns[f]
    }

    /// Rendered pixels (all poses, pose-major) for per-face emission `e`.
    pub fn apply(&self, e: &[Spectrum<S>]) -> Vec<Spectrum<S>> {
        assert_eq!(e.len(), self.faces.len());
        let mut out = vec![Spectrum::black(); self.pixel_count()];
        for (col, ef) in self.columns.iter().zip(e) {
            if ef.is_black() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(col) {
                *o += *a * *ef;
            }
        }
        out
    }

    /// Splits pose-major pixels into one image per pose.
    pub fn to_images(&self, pixels: &[Spectrum<S>]) -> Vec<HdrImage<S>> {
        pixels
            .chunks(self.width * self.height)
            .map(|c| {
                HdrImage::from_pixels(self.width, self.height, c.to_vec())
                    .expect("chunk matches resolution")
            })
            .collect()
    }

    /// Flattens per-pose images into the operator's pixel order.
    pub fn flatten_images(
        &self,
        images: &[HdrImage<S>],
    ) -> Result<Vec<Spectrum<S>>, EstimateError> {
        if images.len() != self.poses {
            return Err(EstimateError::Shape(format!(
                "{} target images for {} poses",
                images.len(),
                self.poses
            )));
        }
        let mut out = Vec::with_capacity(self.pixel_count());
        for (i, im) in images.iter().enumerate() {
            if (im.width(), im.height()) != (self.width, self.height) {
                return Err(EstimateError::Shape(format!(
                    "target image {i} is {}x{}, poses render at {}x{}",
                    im.width(),
                    im.height(),
                    self.width,
                    self.height
                )));
            }
            out.extend_from_slice(im.pixels());
        }
        Ok(out)
    }
}

/// Builds the operator by tracing each pose once and crediting every
/// front-facing surface hit to its face. Paths do not depend on emission,
/// so this equals rendering unit emission on each face separately with the
/// same seeds. Fields and shadow emitters are not part of the model.
pub fn build_transport<S: Real>(
    meshes: &[TriangleMesh<S>],
    poses: &[Camera<S>],
    settings: RenderSettings<S>,
    max_depth: u32,
) -> Result<TransportOperator<S>, EstimateError> {
    let Some(first) = poses.first() else {
        return Err(EstimateError::Shape("no poses".into()));
    };
    let (w, h) = (first.width(), first.height());
    if poses.iter().any(|c| (c.width(), c.height()) != (w, h)) {
        return Err(EstimateError::Shape(
            "all poses must share one resolution".into(),
        ));
    }
    if settings.spp == 0 {
        return Err(EstimateError::Config("spp must be at least 1".into()));
    }
    let mut faces = Vec::new();
    let mut offsets = Vec::with_capacity(meshes.len());
    for (mesh, m) in meshes.iter().enumerate() {
        offsets.push(faces.len());
        faces.extend((0..m.face_count()).map(|face| FaceRef { mesh, face }));
    }
    let pixels = poses.len() * w * h;
    let entries = faces.len().saturating_mul(pixels).saturating_mul(3);
    if entries > MAX_TRANSPORT_ENTRIES {
        return Err(EstimateError::TooLarge {
            faces: faces.len(),
            pixels,
        });
    }
    let scene = Scene::new(
        Vec::new(),
        meshes.to_vec(),
        EmitterSet::empty(),
        RenderSettings {
            n_bounces: max_depth,
            ..settings
        },
    );
    let nf = faces.len();
    let inv = S::one() / S::from_usize_lossy(settings.spp as usize);
    // Per pixel: dense weights over faces.
    let per_pixel: Vec<Vec<Spectrum<S>>> = (0..pixels)
        .into_par_iter()
        .map(|idx| {
            let (pose, rest) = (idx / (w * h), idx % (w * h));
            let (x, y) = (rest % w, rest / w);
            let cam = &poses[pose];
            let mut acc = vec![Spectrum::black(); nf];
            for sample in 0..settings.spp {
                let ray = cam.pixel_ray(settings.seed, x, y, sample, settings.spp);
                let key = PathKey {
                    seed: settings.seed,
                    pixel: rest as u64,
                    sample: sample as u64,
                };
                trace_emission_weights(&scene, ray, key, |hit, t| {
                    acc[offsets[hit.mesh_id] + hit.face_id] += t;
                });
            }
            for a in acc.iter_mut() {
                *a *= inv;
            }
            acc
        })
        .collect();
    let columns = (0..nf)
        .map(|f| per_pixel.iter().map(|p| p[f]).collect())
        .collect();
    Ok(TransportOperator {
        width: w,
        height: h,
        poses: poses.len(),
        faces,
        columns,
    })
}
