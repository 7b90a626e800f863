//! Camera response recovery from bracketed 8-bit exposures and merging of
//! the bracket into a linear radiance image.

mod crf;
pub mod io;

use thiserror::Error;

pub use crf::{
    hat_weight, monotone_projection, recover_crf, sample_positions, CrfTable, DEFAULT_LAMBDA,
    DEFAULT_SAMPLES, GAUGE_CODE,
};

use crate::color::quantize_u8;
use crate::image::{HdrImage, LdrImage};
use crate::math::Spectrum;
use crate::num::Real;

#[derive(Debug, Error)]
pub enum HdrError {
    #[error("a bracket needs at least 3 images, got {0}")]
    TooFewImages(usize),
    #[error("expected {images} exposure times, got {times}")]
    TimeCount { images: usize, times: usize },
    #[error("exposure times must be positive and strictly increasing")]
    Times,
    #[error("image {index} is {got:?}, expected {expected:?}")]
    Dimensions {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("rank-deficient response system: {0}")]
    RankDeficient(String),
}

/// Pixel-aligned exposures of one scene, ordered by exposure time.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposureBracket {
    images: Vec<LdrImage>,
    exposure_times: Vec<f64>,
}

impl ExposureBracket {
    pub fn new(images: Vec<LdrImage>, exposure_times: Vec<f64>) -> Result<Self, HdrError> {
        if images.len() < 3 {
            return Err(HdrError::TooFewImages(images.len()));
        }
        if exposure_times.len() != images.len() {
            return Err(HdrError::TimeCount {
                images: images.len(),
                times: exposure_times.len(),
            });
        }
        let ordered = exposure_times.windows(2).all(|w| w[0] < w[1]);
        if !ordered || !exposure_times.iter().all(|t| t.is_finite() && *t > 0.0) {
            return Err(HdrError::Times);
        }
        let expected = (images[0].width, images[0].height);
        for (index, im) in images.iter().enumerate() {
            if (im.width, im.height) != expected {
                return Err(HdrError::Dimensions {
                    index,
                    expected,
                    got: (im.width, im.height),
                });
            }
        }
        Ok(Self {
            images,
            exposure_times,
        })
    }

    pub fn images(&self) -> &[LdrImage] {
        &self.images
    }

    pub fn exposure_times(&self) -> &[f64] {
        &self.exposure_times
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.images[0].width, self.images[0].height)
    }

    /// Same images with every exposure time multiplied by `c`.
    pub fn scaled_times(&self, c: f64) -> Result<Self, HdrError> {
        Self::new(
            self.images.clone(),
            self.exposure_times.iter().map(|t| t * c).collect(),
        )
    }
}

/// Simulates a camera: code = round(255·response(E·Δt)) per channel, with
/// `response` mapping exposure to `[0, 1]` (values outside are clipped).
pub fn synthesize_bracket<S: Real>(
    radiance: &HdrImage<S>,
    exposure_times: &[f64],
    response: impl Fn(f64) -> f64,
) -> Result<ExposureBracket, HdrError> {
    let images = exposure_times
        .iter()
        .map(|&t| LdrImage {
            width: radiance.width(),
            height: radiance.height(),
            data: radiance
                .pixels()
                .iter()
                .map(|p| {
                    let f = |v: S| quantize_u8(response(v.to_f64_lossy() * t).clamp(0.0, 1.0));
                    [f(p.r), f(p.g), f(p.b)]
                })
                .collect(),
        })
        .collect();
    ExposureBracket::new(images, exposure_times.to_vec())
}

/// Weighted average of per-image log exposure estimates. Pixels whose codes
/// all carry zero weight are black if every code is 0, otherwise they take
/// the estimate of the code nearest mid-range.
pub fn merge_hdr<S: Real>(bracket: &ExposureBracket, crf: &CrfTable<S>) -> HdrImage<S> {
    let (w, h) = bracket.dimensions();
    let ln_t: Vec<f64> = bracket.exposure_times.iter().map(|t| t.ln()).collect();
    let g: [Vec<f64>; 3] =
        std::array::from_fn(|c| crf.g[c].iter().map(|v| v.to_f64_lossy()).collect());
    let mut out = HdrImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut px = Spectrum::black();
            for (c, gc) in g.iter().enumerate() {
                let mut num = 0.0;
                let mut den = 0.0;
                for (j, im) in bracket.images.iter().enumerate() {
                    let z = im.get(x, y)[c];
                    let wz = hat_weight(z);
                    num += wz * (gc[z as usize] - ln_t[j]);
                    den += wz;
                }
                let e = if den > 0.0 {
                    (num / den).exp()
                } else {
                    let codes: Vec<u8> = bracket.images.iter().map(|im| im.get(x, y)[c]).collect();
                    if codes.iter().all(|&z| z == 0) {
                        0.0
                    } else {
                        let (j, &z) = codes
                            .iter()
                            .enumerate()
                            .min_by(|a, b| {
                                (*a.1 as f64 - 127.5)
                                    .abs()
                                    .total_cmp(&(*b.1 as f64 - 127.5).abs())
                            })
                            .expect("non-empty bracket");
                        (gc[z as usize] - ln_t[j]).exp()
                    }
                };
                px.set_channel(c, S::lit(e));
            }
            out.set(x, y, px);
        }
    }
    out
}

/// Scales so the largest channel value becomes 255 (floating point, not
/// quantized). An all-zero image is returned unchanged.
pub fn normalize_radiance<S: Real>(img: &HdrImage<S>) -> HdrImage<S> {
    let m = img.max_value();
    if m <= S::zero() {
        return img.clone();
    }
    let k = S::lit(255.0) / m;
    img.map(|p| p * k)
}

/// 4×4 box filter; partial blocks at the right and bottom edges average
/// the pixels they contain.
pub fn downsample4<S: Real>(img: &HdrImage<S>) -> HdrImage<S> {
    let (w, h) = (img.width().div_ceil(4), img.height().div_ceil(4));
    let mut out = HdrImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = Spectrum::black();
            let mut n = 0usize;
            for yy in 4 * y..(4 * y + 4).min(img.height()) {
                for xx in 4 * x..(4 * x + 4).min(img.width()) {
                    acc += img.get(xx, yy);
                    n += 1;
                }
            }
            out.set(x, y, acc * (S::one() / S::from_usize_lossy(n)));
        }
    }
    out
}
