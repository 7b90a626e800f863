//! Linear float images and 8-bit RGB images with PFM / binary PPM codecs.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::color::{quantize_u8, tone_map};
use crate::math::Spectrum;
use crate::num::Real;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {kind} data: {msg}")]
    Format { kind: &'static str, msg: String },
    #[error("expected {expected} pixels, got {got}")]
    Size { expected: usize, got: usize },
}

fn format_err(kind: &'static str, msg: impl Into<String>) -> ImageError {
    ImageError::Format {
        kind,
        msg: msg.into(),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, ImageError> {
    fs::read(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), ImageError> {
    fs::write(path, bytes).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Splits off `count` whitespace-separated ASCII header tokens, skipping
/// `#` comments, and returns them with the offset just past the single
/// whitespace byte that ends the last token.
fn header_tokens(
    bytes: &[u8],
    count: usize,
    kind: &'static str,
) -> Result<(Vec<String>, usize), ImageError> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < count {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return Err(format_err(kind, "truncated header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
    }
    if i >= bytes.len() {
        return Err(format_err(kind, "missing pixel data"));
    }
    Ok((tokens, i + 1))
}

fn parse_dim(tok: &str, kind: &'static str) -> Result<usize, ImageError> {
    match tok.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format_err(kind, format!("bad dimension {tok:?}"))),
    }
}

/// Linear-radiance image, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct HdrImage<S> {
    width: usize,
    height: usize,
    pixels: Vec<Spectrum<S>>,
}

impl<S: Real> HdrImage<S> {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![Spectrum::black(); width * height],
        }
    }

    pub fn from_pixels(
        width: usize,
        height: usize,
        pixels: Vec<Spectrum<S>>,
    ) -> Result<Self, ImageError> {
        if pixels.len() != width * height {
            return Err(ImageError::Size {
                expected: width * height,
                got: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Spectrum<S>] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Spectrum<S>] {
        &mut self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Spectrum<S> {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Spectrum<S>) {
        self.pixels[y * self.width + x] = c;
    }

    pub fn max_value(&self) -> S {
        self.pixels
            .iter()
            .map(Spectrum::max_channel)
            .fold(S::zero(), S::max)
    }

    /// Per-channel mean over all pixels.
    pub fn mean(&self) -> Spectrum<S> {
        let mut acc = Spectrum::black();
        for p in &self.pixels {
            acc += *p;
        }
        acc * (S::one() / S::from_usize_lossy(self.pixels.len().max(1)))
    }

    pub fn map(&self, f: impl Fn(Spectrum<S>) -> Spectrum<S>) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Little-endian PFM, rows stored bottom-up.
    pub fn encode_pfm(&self) -> Vec<u8> {
        let mut out = format!("PF\n{} {}\n-1.0\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 12);
        for y in (0..self.height).rev() {
            for p in &self.pixels[y * self.width..(y + 1) * self.width] {
                for c in [p.r, p.g, p.b] {
                    out.extend_from_slice(&c.to_f32_lossy().to_le_bytes());
                }
            }
        }
        out
    }

    pub fn decode_pfm(bytes: &[u8]) -> Result<Self, ImageError> {
        let (tok, off) = header_tokens(bytes, 4, "PFM")?;
        if tok[0] != "PF" {
            return Err(format_err("PFM", format!("unsupported magic {:?}", tok[0])));
        }
        let w = parse_dim(&tok[1], "PFM")?;
        let h = parse_dim(&tok[2], "PFM")?;
        let scale: f64 = tok[3].parse().map_err(|_| format_err("PFM", "bad scale"))?;
        let little = scale < 0.0;
        let data = &bytes[off..];
        if data.len() != w * h * 12 {
            return Err(format_err(
                "PFM",
                format!("expected {} data bytes, found {}", w * h * 12, data.len()),
            ));
        }
        let mut pixels = vec![Spectrum::black(); w * h];
        for (k, chunk) in data.chunks_exact(12).enumerate() {
            let f = |i: usize| {
                let b: [u8; 4] = chunk[i * 4..i * 4 + 4].try_into().unwrap();
                let v = if little {
                    f32::from_le_bytes(b)
                } else {
                    f32::from_be_bytes(b)
                };
                S::lit(v as f64)
            };
            let (row, x) = (k / w, k % w);
            pixels[(h - 1 - row) * w + x] = Spectrum::new(f(0), f(1), f(2));
        }
        Ok(Self {
            width: w,
            height: h,
            pixels,
        })
    }

    pub fn write_pfm(&self, path: &Path) -> Result<(), ImageError> {
        write_bytes(path, &self.encode_pfm())
    }

    pub fn read_pfm(path: &Path) -> Result<Self, ImageError> {
        Self::decode_pfm(&read_bytes(path)?)
    }

    /// sRGB tone map then 8-bit quantization.
    pub fn to_ldr(&self) -> LdrImage {
        let data = self
            .pixels
            .iter()
            .map(|&p| {
                let t = tone_map(p);
                [quantize_u8(t.r), quantize_u8(t.g), quantize_u8(t.b)]
            })
            .collect();
        LdrImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

/// Final output bytes: PFM when `hdr_output`, tone-mapped P6 PPM otherwise.
pub fn finalize<S: Real>(img: &HdrImage<S>, hdr_output: bool) -> Vec<u8> {
    if hdr_output {
        img.encode_pfm()
    } else {
        img.to_ldr().encode_ppm()
    }
}

/// 8-bit RGB image, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdrImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[u8; 3]>,
}

impl LdrImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![[0; 3]; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }

    pub fn encode_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.data.iter().flatten());
        out
    }

    pub fn decode_ppm(bytes: &[u8]) -> Result<Self, ImageError> {
        let (tok, off) = header_tokens(bytes, 4, "PPM")?;
        if tok[0] != "P6" {
            return Err(format_err("PPM", format!("unsupported magic {:?}", tok[0])));
        }
        let w = parse_dim(&tok[1], "PPM")?;
        let h = parse_dim(&tok[2], "PPM")?;
        if tok[3] != "255" {
            return Err(format_err("PPM", "only maxval 255 is supported"));
        }
        let data = &bytes[off..];
        if data.len() != w * h * 3 {
            return Err(format_err(
                "PPM",
                format!("expected {} data bytes, found {}", w * h * 3, data.len()),
            ));
        }
        Ok(Self {
            width: w,
            height: h,
            data: data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        })
    }

    pub fn write_ppm(&self, path: &Path) -> Result<(), ImageError> {
        write_bytes(path, &self.encode_ppm())
    }

    pub fn read_ppm(path: &Path) -> Result<Self, ImageError> {
        Self::decode_ppm(&read_bytes(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldr_codes_for_reference_values() {
        let img = HdrImage::from_pixels(
            3,
            1,
            vec![
                Spectrum::splat(0.0f64),
                Spectrum::splat(1.0),
                Spectrum::splat(0.5),
            ],
        )
        .unwrap();
        let ldr = img.to_ldr();
        assert_eq!(ldr.data, vec![[0; 3], [255; 3], [188; 3]]);
        let bytes = finalize(&img, false);
        assert!(bytes.starts_with(b"P6\n3 1\n255\n"));
        assert_eq!(&bytes[bytes.len() - 3..], &[188, 188, 188]);
    }

    #[test]
    fn pfm_layout_is_bottom_up_little_endian() {
        let mut img = HdrImage::<f32>::new(2, 2);
        img.set(0, 0, Spectrum::new(1.0, 2.0, 3.0));
        img.set(1, 1, Spectrum::new(4.0, 5.0, 6.0));
        let bytes = img.encode_pfm();
        let header = b"PF\n2 2\n-1.0\n";
        assert!(bytes.starts_with(header));
        assert_eq!(bytes.len(), header.len() + 48);
        // First stored row is the bottom one: (0,1) then (1,1).
        let d = &bytes[header.len()..];
        assert_eq!(&d[12..16], &4.0f32.to_le_bytes());
        // Top-left pixel is the first pixel of the last stored row.
        assert_eq!(&d[24..28], &1.0f32.to_le_bytes());
        assert_eq!(HdrImage::<f32>::decode_pfm(&bytes).unwrap(), img);
    }

    #[test]
    fn ppm_round_trip_and_comments() {
        let mut img = LdrImage::new(2, 1);
        img.data[1] = [7, 8, 9];
        assert_eq!(LdrImage::decode_ppm(&img.encode_ppm()).unwrap(), img);
        let commented = b"P6\n# made by hand\n2 1\n255\n\x00\x00\x00\x07\x08\x09";
        assert_eq!(LdrImage::decode_ppm(commented).unwrap(), img);
        assert!(LdrImage::decode_ppm(b"P6\n2 1\n255\n\x00").is_err());
    }
}
