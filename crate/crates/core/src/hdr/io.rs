//! Bracket manifests and CRF tables on disk.
//!
//! A manifest is JSON: `{"images": ["exp0.ppm", ...], "exposure_times": [..]}`
//! with image paths relative to the manifest. The CRF table is CSV with
//! header `z,g_r,g_g,g_b` and one row per code.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CrfTable, ExposureBracket, HdrError};
use crate::image::{ImageError, LdrImage};
use crate::num::Real;

#[derive(Debug, Error)]
pub enum HdrIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Manifest { path: String, msg: String },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Bracket(#[from] HdrError),
    #[error("{path}: {msg}")]
    Csv { path: String, msg: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub images: Vec<PathBuf>,
    pub exposure_times: Vec<f64>,
}

pub fn read_bracket(manifest_path: &Path) -> Result<ExposureBracket, HdrIoError> {
    let text = fs::read_to_string(manifest_path).map_err(|source| HdrIoError::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| HdrIoError::Manifest {
        path: manifest_path.display().to_string(),
        msg: e.to_string(),
    })?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let images = m
        .images
        .iter()
        .map(|p| LdrImage::read_ppm(&base.join(p)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExposureBracket::new(images, m.exposure_times)?)
}

/// Writes `exp_NN.ppm` files and `manifest.json` into `dir`.
pub fn write_bracket(dir: &Path, bracket: &ExposureBracket) -> Result<PathBuf, HdrIoError> {
    let mut names = Vec::new();
    for (i, im) in bracket.images().iter().enumerate() {
        let name = PathBuf::from(format!("exp_{i:02}.ppm"));
        im.write_ppm(&dir.join(&name))?;
        names.push(name);
    }
    let manifest = Manifest {
        images: names,
        exposure_times: bracket.exposure_times().to_vec(),
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|source| HdrIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn csv_err(path: &Path, e: impl ToString) -> HdrIoError {
    HdrIoError::Csv {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

pub fn write_crf_csv<S: Real>(path: &Path, crf: &CrfTable<S>) -> Result<(), HdrIoError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["z", "g_r", "g_g", "g_b"])
        .map_err(|e| csv_err(path, e))?;
    for z in 0..256 {
        w.serialize((
            z,
            crf.g[0][z].to_f64_lossy(),
            crf.g[1][z].to_f64_lossy(),
            crf.g[2][z].to_f64_lossy(),
        ))
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| HdrIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_crf_csv<S: Real>(path: &Path) -> Result<CrfTable<S>, HdrIoError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut g: [Vec<S>; 3] = Default::default();
    for (i, row) in r.deserialize::<(usize, f64, f64, f64)>().enumerate() {
        let (z, a, b, c) = row.map_err(|e| csv_err(path, e))?;
        if z != i {
            return Err(csv_err(path, format!("row {i} has code {z}")));
        }
        g[0].push(S::lit(a));
        g[1].push(S::lit(b));
        g[2].push(S::lit(c));
    }
    if g[0].len() != 256 {
        return Err(csv_err(
            path,
            format!("expected 256 rows, found {}", g[0].len()),
        ));
    }
    Ok(CrfTable {
        g,
        lambda: S::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crf_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("crf.csv");
        let crf = CrfTable::<f64>::linear();
        write_crf_csv(&path, &crf).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("z,g_r,g_g,g_b\n0,"));
        let back: CrfTable<f64> = read_crf_csv(&path).unwrap();
        assert_eq!(back.g, crf.g);
    }

    #[test]
    fn bracket_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut im = LdrImage::new(2, 2);
        im.data[3] = [1, 2, 3];
        let b =
            ExposureBracket::new(vec![im.clone(), im.clone(), im], vec![0.5, 1.0, 2.0]).unwrap();
        let manifest = write_bracket(dir.path(), &b).unwrap();
        assert_eq!(read_bracket(&manifest).unwrap(), b);
    }
}
