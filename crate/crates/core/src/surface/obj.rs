//! Minimal Wavefront OBJ: `v` and `f` records only. Polygons are fan
//! triangulated, `f` indices may carry `/vt/vn` suffixes (ignored) and may be
//! negative (relative). Everything else is skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::math::Vec3;
use crate::num::Real;

#[derive(Debug, Error)]
pub enum ObjError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> ObjError {
    ObjError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_obj<S: Real>(text: &str) -> Result<(Vec<Vec3<S>>, Vec<[u32; 3]>), ObjError> {
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut it = content.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [0.0f64; 3];
                for slot in c.iter_mut() {
                    let tok = it
                        .next()
                        .ok_or_else(|| parse_err(line, "vertex needs 3 coordinates"))?;
                    *slot = tok
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad coordinate {tok:?}")))?;
                }
                verts.push(Vec3::from_f64(c));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in it {
                    let head = tok.split('/').next().unwrap_or("");
                    let n: i64 = head
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad index {tok:?}")))?;
                    let resolved = match n {
                        0 => return Err(parse_err(line, "index 0 is invalid")),
                        n if n > 0 => n - 1,
                        n => verts.len() as i64 + n,
                    };
                    if resolved < 0 || resolved >= verts.len() as i64 {
                        return Err(parse_err(line, format!("index {n} out of range")));
                    }
                    idx.push(resolved as u32);
                }
                if idx.len() < 3 {
                    return Err(parse_err(line, "face needs at least 3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok((verts, faces))
}

pub fn format_obj<S: Real>(vertices: &[Vec3<S>], faces: &[[u32; 3]]) -> String {
    let mut out = String::new();
    for v in vertices {
        let [x, y, z] = v.to_f64();
        writeln!(out, "v {x} {y} {z}").unwrap();
    }
    for f in faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

pub fn read_obj<S: Real>(path: &Path) -> Result<(Vec<Vec3<S>>, Vec<[u32; 3]>), ObjError> {
    let text = fs::read_to_string(path).map_err(|source| ObjError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_obj(&text)
}

pub fn write_obj<S: Real>(
    path: &Path,
    vertices: &[Vec3<S>],
    faces: &[[u32; 3]],
) -> Result<(), ObjError> {
    fs::write(path, format_obj(vertices, faces)).map_err(|source| ObjError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quads_are_fan_triangulated() {
        let text = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
        let (v, f) = parse_obj::<f64>(text).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(f, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn negative_indices_are_relative() {
        let (_, f) = parse_obj::<f32>("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(f, vec![[0, 1, 2]]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_obj::<f64>("v 0 0 0\nf 1 2 3\n").unwrap_err();
        assert!(matches!(e, ObjError::Parse { line: 2, .. }));
        assert!(parse_obj::<f64>("v 0 zero 0\n").is_err());
    }

    #[test]
    fn write_then_read_is_exact() {
        let v = vec![
            Vec3::new(0.1, -2.5, 1e-9),
            Vec3::new(1.0 / 3.0, 0.0, 7.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let f = vec![[0, 1, 2]];
        let (v2, f2) = parse_obj::<f64>(&format_obj(&v, &f)).unwrap();
        assert_eq!(v, v2);
        assert_eq!(f, f2);
    }
}
