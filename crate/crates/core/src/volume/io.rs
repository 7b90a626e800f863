//! `.rfgrid` / `.sdfgrid` binary containers.
//!
//! Layout, all little-endian:
//!
//! | field          | type        | count         |
//! |----------------|-------------|---------------|
//! | `nx, ny, nz`   | `u32`       | 3             |
//! | bbox min, max  | `f32`       | 6             |
//! | σ (rfgrid) / φ (sdfgrid) | `f32` | nx·ny·nz |
//! | RGB (rfgrid only, interleaved per node) | `f32` | 3·nx·ny·nz |
//!
//! Node arrays are x-fastest.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::grid::{GridError, RadianceGrid};
use super::sdf::SdfGrid;
use crate::math::{Aabb, Spectrum, Vec3};
use crate::num::Real;

#[derive(Debug, Error)]
pub enum GridIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("file is truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("file has {0} trailing bytes")]
    Trailing(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

const HEADER_BYTES: usize = 3 * 4 + 6 * 4;

fn write_header<W: Write, S: Real>(w: &mut W, res: [usize; 3], bbox: &Aabb<S>) -> io::Result<()> {
    for n in res {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for v in [bbox.min, bbox.max] {
        for a in 0..3 {
            w.write_all(&v[a].to_f32_lossy().to_le_bytes())?;
        }
    }
    Ok(())
}

fn write_f32s<W: Write, S: Real>(w: &mut W, values: impl Iterator<Item = S>) -> io::Result<()> {
    for v in values {
        w.write_all(&v.to_f32_lossy().to_le_bytes())?;
    }
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn u32(&mut self) -> u32 {
        let v = u32::from_le_bytes(self.buf[self.pos..self.pos + 4].try_into().unwrap());
        self.pos += 4;
        v
    }

    fn f32(&mut self) -> f32 {
        let v = f32::from_le_bytes(self.buf[self.pos..self.pos + 4].try_into().unwrap());
        self.pos += 4;
        v
    }
}

fn read_header<S: Real>(
    bytes: &[u8],
    values_per_node: usize,
) -> Result<(Reader<'_>, [usize; 3], Aabb<S>), GridIoError> {
    if bytes.len() < HEADER_BYTES {
        return Err(GridIoError::Truncated {
            expected: HEADER_BYTES,
            found: bytes.len(),
        });
    }
    let mut r = Reader { buf: bytes, pos: 0 };
    let res = [r.u32() as usize, r.u32() as usize, r.u32() as usize];
    let mut corners = [Vec3::zero(); 2];
    for c in corners.iter_mut() {
        *c = Vec3::new(
            S::lit(r.f32() as f64),
            S::lit(r.f32() as f64),
            S::lit(r.f32() as f64),
        );
    }
    let expected = res
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .and_then(|n| n.checked_mul(values_per_node * 4))
        .and_then(|n| n.checked_add(HEADER_BYTES))
        .unwrap_or(usize::MAX);
    if bytes.len() < expected {
        return Err(GridIoError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(GridIoError::Trailing(bytes.len() - expected));
    }
    Ok((r, res, Aabb::new(corners[0], corners[1])))
}

pub fn encode_rfgrid<S: Real>(grid: &RadianceGrid<S>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + grid.sigma().len() * 16);
    write_header(&mut out, grid.res(), &grid.bbox()).unwrap();
    write_f32s(&mut out, grid.sigma().iter().copied()).unwrap();
    write_f32s(
        &mut out,
        grid.radiance().iter().flat_map(|c| [c.r, c.g, c.b]),
    )
    .unwrap();
    out
}

pub fn decode_rfgrid<S: Real>(bytes: &[u8]) -> Result<RadianceGrid<S>, GridIoError> {
    let (mut r, res, bbox) = read_header::<S>(bytes, 4)?;
    let n = res[0] * res[1] * res[2];
    let sigma: Vec<S> = (0..n).map(|_| S::lit(r.f32() as f64)).collect();
    let radiance = (0..n)
        .map(|_| {
            let (cr, cg, cb) = (r.f32(), r.f32(), r.f32());
            Spectrum::new(S::lit(cr as f64), S::lit(cg as f64), S::lit(cb as f64))
        })
        .collect();
    Ok(RadianceGrid::new(bbox, res, sigma, radiance)?)
}

pub fn encode_sdfgrid<S: Real>(sdf: &SdfGrid<S>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + sdf.values().len() * 4);
    write_header(&mut out, sdf.res(), &sdf.bbox()).unwrap();
    write_f32s(&mut out, sdf.values().iter().copied()).unwrap();
    out
}

pub fn decode_sdfgrid<S: Real>(bytes: &[u8]) -> Result<SdfGrid<S>, GridIoError> {
    let (mut r, res, bbox) = read_header::<S>(bytes, 1)?;
    let n = res[0] * res[1] * res[2];
    let phi = (0..n).map(|_| S::lit(r.f32() as f64)).collect();
    Ok(SdfGrid::new(bbox, res, phi)?)
}

fn read_file(path: &Path) -> Result<Vec<u8>, GridIoError> {
    let mut buf = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|source| GridIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(buf)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), GridIoError> {
    fs::write(path, bytes).map_err(|source| GridIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_rfgrid<S: Real>(path: &Path) -> Result<RadianceGrid<S>, GridIoError> {
    decode_rfgrid(&read_file(path)?)
}

pub fn write_rfgrid<S: Real>(path: &Path, grid: &RadianceGrid<S>) -> Result<(), GridIoError> {
    write_file(path, &encode_rfgrid(grid))
}

pub fn read_sdfgrid<S: Real>(path: &Path) -> Result<SdfGrid<S>, GridIoError> {
    decode_sdfgrid(&read_file(path)?)
}

pub fn write_sdfgrid<S: Real>(path: &Path, sdf: &SdfGrid<S>) -> Result<(), GridIoError> {
    write_file(path, &encode_sdfgrid(sdf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let g = RadianceGrid::<f64>::from_fn(
            Aabb::new(Vec3::new(-1.0, -2.0, 0.0), Vec3::new(1.0, 2.0, 0.5)),
            [2, 3, 2],
            |p| (p.z, Spectrum::new(0.25, 0.5, 1.0)),
        )
        .unwrap();
        let bytes = encode_rfgrid(&g);
        assert_eq!(bytes.len(), 36 + 12 * 4 + 12 * 12);
        assert_eq!(&bytes[0..4], &2u32.to_le_bytes());
        assert_eq!(&bytes[4..8], &3u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &(-1.0f32).to_le_bytes());
        assert_eq!(&bytes[32..36], &0.5f32.to_le_bytes());
        // First RGB triple follows the σ block.
        let rgb0 = 36 + 12 * 4;
        assert_eq!(&bytes[rgb0..rgb0 + 4], &0.25f32.to_le_bytes());
        let back: RadianceGrid<f64> = decode_rfgrid(&bytes).unwrap();
        assert_eq!(back.res(), g.res());
        assert_eq!(back.sigma(), g.sigma());
    }

    #[test]
    fn truncated_and_trailing_rejected() {
        let sdf = SdfGrid::<f32>::from_fn(
            Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)),
            [2, 2, 2],
            |p| p.x,
        )
        .unwrap();
        let bytes = encode_sdfgrid(&sdf);
        assert!(matches!(
            decode_sdfgrid::<f32>(&bytes[..bytes.len() - 1]),
            Err(GridIoError::Truncated { .. })
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(
            decode_sdfgrid::<f32>(&extra),
            Err(GridIoError::Trailing(1))
        ));
        assert_eq!(decode_sdfgrid::<f32>(&bytes).unwrap(), sdf);
    }

    proptest::proptest! {
        #[test]
        fn sdfgrid_round_trips_f32_values(vals in proptest::collection::vec(-100.0f32..100.0, 8)) {
            let sdf = SdfGrid::<f32>::new(Aabb::new(Vec3::splat(-1.0), Vec3::splat(1.0)), [2, 2, 2], vals).unwrap();
            let back = decode_sdfgrid::<f32>(&encode_sdfgrid(&sdf)).unwrap();
            proptest::prop_assert_eq!(back, sdf);
        }
    }
}
