use nalgebra::{DMatrix, DVector};

use super::{ExposureBracket, HdrError};
use crate::num::Real;
use crate::rng::Rng;

/// Reference code pinned to `g = 0`.
pub const GAUGE_CODE: usize = 128;
pub const DEFAULT_LAMBDA: f64 = 50.0;
pub const DEFAULT_SAMPLES: usize = 256;

/// Triangle weight peaking mid-range; zero at both ends of the code range.
pub fn hat_weight(z: u8) -> f64 {
    if z <= 127 {
        z as f64
    } else {
        (255 - z) as f64
    }
}

/// Inverse camera response: `g[c][z]` is the log exposure producing code `z`
/// in channel `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrfTable<S> {
    pub g: [Vec<S>; 3],
    pub lambda: S,
}

impl<S: Real> CrfTable<S> {
    /// `g(z) = ln(z / 128)` in every channel, with `g(0)` taken from code 0.5.
    pub fn linear() -> Self {
        let ch: Vec<S> = (0..256)
            .map(|z| S::lit((f64::from(z).max(0.5) / GAUGE_CODE as f64).ln()))
            .collect();
        Self {
            g: [ch.clone(), ch.clone(), ch],
            lambda: S::zero(),
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.g.iter().all(|c| c.windows(2).all(|w| w[0] <= w[1]))
    }
}

/// Pixel positions on a jittered uniform grid of roughly `n` cells.
pub fn sample_positions(
    width: usize,
    height: usize,
    n: usize,
    rng: &mut Rng,
) -> Vec<(usize, usize)> {
    let n = n.max(1);
    let aspect = width as f64 / height as f64;
    let nx = ((n as f64 * aspect).sqrt().ceil() as usize).clamp(1, width);
    let ny = n.div_ceil(nx).clamp(1, height);
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = ((i as f64 + rng.next_f64()) * width as f64 / nx as f64) as usize;
            let y = ((j as f64 + rng.next_f64()) * height as f64 / ny as f64) as usize;
            out.push((x.min(width - 1), y.min(height - 1)));
        }
    }
    out
}

/// Least-squares isotonic (non-decreasing) fit by pooling adjacent violators.
pub fn monotone_projection(g: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(g.len());
    for &v in g {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let n = na + nb;
            *blocks.last_mut().unwrap() = ((a * na as f64 + b * nb as f64) / n as f64, n);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

fn solve_channel(
    bracket: &ExposureBracket,
    channel: usize,
    positions: &[(usize, usize)],
    lambda: f64,
) -> Result<Vec<f64>, HdrError> {
    let ln_t: Vec<f64> = bracket.exposure_times().iter().map(|t| t.ln()).collect();
    // Samples saturated or black everywhere carry no information.
    let samples: Vec<Vec<u8>> = positions
        .iter()
        .map(|&(x, y)| {
            bracket
                .images()
                .iter()
                .map(|im| im.get(x, y)[channel])
                .collect::<Vec<u8>>()
        })
        .filter(|codes| codes.iter().any(|&z| hat_weight(z) > 0.0))
        .collect();
    let n = samples.len();
    let data_rows: usize = samples
        .iter()
        .map(|c| c.iter().filter(|&&z| hat_weight(z) > 0.0).count())
        .sum();
    let cols = 256 + n;
    let rows = data_rows + 1 + 254;
    if data_rows < 256 || rows < cols {
        return Err(HdrError::RankDeficient(format!(
            "channel {channel}: {data_rows} usable observations from {n} samples"
        )));
    }
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    let mut r = 0;
    for (i, codes) in samples.iter().enumerate() {
        for (j, &z) in codes.iter().enumerate() {
            let w = hat_weight(z);
            if w == 0.0 {
                continue;
            }
            a[(r, z as usize)] = w;
            a[(r, 256 + i)] = -w;
            b[r] = w * ln_t[j];
            r += 1;
        }
    }
    a[(r, GAUGE_CODE)] = 1.0;
    r += 1;
    for z in 1..255u8 {
        let w = lambda * hat_weight(z);
        let zi = z as usize;
        a[(r, zi - 1)] = w;
        a[(r, zi)] = -2.0 * w;
        a[(r, zi + 1)] = w;
        r += 1;
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * 1e-12) {
        return Err(HdrError::RankDeficient(format!(
            "channel {channel}: singular system (condition {:.3e})",
            smax / smin
        )));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| HdrError::RankDeficient(e.to_string()))?;
    let g = monotone_projection(&x.as_slice()[..256]);
    let g0 = g[GAUGE_CODE];
    Ok(g.into_iter().map(|v| v - g0).collect())
}

/// Recovers the inverse response from a bracket by the weighted
/// least-squares formulation with second-difference smoothing, one channel
/// at a time, followed by a monotone projection and re-gauging.
pub fn recover_crf<S: Real>(
    bracket: &ExposureBracket,
    lambda: S,
    n_samples: usize,
    rng: &mut Rng,
) -> Result<CrfTable<S>, HdrError> {
    let p = bracket.images().len();
    if n_samples * (p - 1) < 256 {
        return Err(HdrError::RankDeficient(format!(
            "{n_samples} samples over {p} images cannot determine 256 codes"
        )));
    }
    let (w, h) = bracket.dimensions();
    let positions = sample_positions(w, h, n_samples, rng);
    let lam = lambda.to_f64_lossy();
    let mut g: [Vec<S>; 3] = Default::default();
    for (c, slot) in g.iter_mut().enumerate() {
        *slot = solve_channel(bracket, c, &positions, lam)?
            .into_iter()
            .map(S::lit)
            .collect();
    }
    Ok(CrfTable { g, lambda })
}
