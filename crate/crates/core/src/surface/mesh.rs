use thiserror::Error;

use super::bsdf::Bsdf;
use super::bvh::Intersection;
use super::triangle::triangle_area;
use crate::math::{Spectrum, Transform, Vec3};
use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("face {face} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: u32,
        count: usize,
    },
    #[error("face {0} has zero area")]
    Degenerate(usize),
    #[error("vertex {0} is not finite")]
    NonFinite(usize),
    #[error("expected {expected} per-face emission values, got {got}")]
    EmissionLength { expected: usize, got: usize },
    #[error("emission of face {0} is negative or non-finite")]
    Emission(usize),
    #[error("expected {expected} vertices, got {got}")]
    VertexCount { expected: usize, got: usize },
}

/// Indexed triangle mesh with one material and optional per-face emission.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh<S> {
    vertices: Vec<Vec3<S>>,
    indices: Vec<[u32; 3]>,
    normals: Vec<Vec3<S>>,
    pub bsdf: Bsdf<S>,
    emission: Option<Vec<Spectrum<S>>>,
    pub world_from_object: Transform<S>,
}

fn face_normals<S: Real>(v: &[Vec3<S>], f: &[[u32; 3]]) -> Vec<Vec3<S>> {
    f.iter()
        .map(|t| {
            let (a, b, c) = (v[t[0] as usize], v[t[1] as usize], v[t[2] as usize]);
            (b - a)
                .cross(c - a)
                .try_normalize()
                .unwrap_or_else(Vec3::zero)
        })
        .collect()
}

impl<S: Real> TriangleMesh<S> {
    pub fn new(
        vertices: Vec<Vec3<S>>,
        indices: Vec<[u32; 3]>,
        bsdf: Bsdf<S>,
    ) -> Result<Self, MeshError> {
        if indices.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFinite(i));
        }
        for (face, tri) in indices.iter().enumerate() {
            for &index in tri {
                if index as usize >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        face,
                        index,
                        count: vertices.len(),
                    });
                }
            }
            let (a, b, c) = (
                vertices[tri[0] as usize],
                vertices[tri[1] as usize],
                vertices[tri[2] as usize],
            );
            if triangle_area(a, b, c) <= S::zero() {
                return Err(MeshError::Degenerate(face));
            }
        }
        let normals = face_normals(&vertices, &indices);
        Ok(Self {
            vertices,
            indices,
            normals,
            bsdf,
            emission: None,
            world_from_object: Transform::identity(),
        })
    }

    pub fn with_transform(mut self, t: Transform<S>) -> Self {
        self.world_from_object = t;
        self
    }

    /// Same emission on every face.
    pub fn with_uniform_emission(mut self, e: Spectrum<S>) -> Result<Self, MeshError> {
        let n = self.indices.len();
        self.set_emission(Some(vec![e; n]))?;
        Ok(self)
    }

    pub fn set_emission(&mut self, emission: Option<Vec<Spectrum<S>>>) -> Result<(), MeshError> {
        if let Some(e) = &emission {
            if e.len() != self.indices.len() {
                return Err(MeshError::EmissionLength {
                    expected: self.indices.len(),
                    got: e.len(),
                });
            }
            if let Some(i) = e.iter().position(|c| !c.is_physical()) {
                return Err(MeshError::Emission(i));
            }
        }
        self.emission = emission;
        Ok(())
    }

    /// Replaces vertex positions (e.g. after a simulation step) and
    /// recomputes face normals.
    pub fn set_vertices(&mut self, vertices: Vec<Vec3<S>>) -> Result<(), MeshError> {
        if vertices.len() != self.vertices.len() {
            return Err(MeshError::VertexCount {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        self.normals = face_normals(&vertices, &self.indices);
        self.vertices = vertices;
        Ok(())
    }

    pub fn vertices(&self) -> &[Vec3<S>] {
        &self.vertices
    }

    pub fn indices(&self) -> &[[u32; 3]] {
        &self.indices
    }

    /// Object-space unit face normals.
    pub fn normals(&self) -> &[Vec3<S>] {
        &self.normals
    }

    pub fn face_count(&self) -> usize {
        self.indices.len()
    }

    pub fn is_emissive(&self) -> bool {
        self.emission
            .as_ref()
            .is_some_and(|e| e.iter().any(|c| !c.is_black()))
    }

    pub fn emission(&self) -> Option<&[Spectrum<S>]> {
        self.emission.as_deref()
    }

    pub fn face_emission(&self, face: usize) -> Spectrum<S> {
        self.emission
            .as_ref()
            .map_or_else(Spectrum::black, |e| e[face])
    }

    /// Emitted radiance toward the viewer; faces emit from their front side only.
    pub fn eval_emission(&self, isect: &Intersection<S>) -> Spectrum<S> {
        if isect.front_face {
            self.face_emission(isect.face_id)
        } else {
            Spectrum::black()
        }
    }

    pub fn world_vertices(&self) -> Vec<Vec3<S>> {
        self.vertices
            .iter()
            .map(|&v| self.world_from_object.transform_point(v, false))
            .collect()
    }

    pub fn world_triangle(&self, face: usize) -> [Vec3<S>; 3] {
        let t = self.indices[face];
        [0, 1, 2].map(|k| {
            self.world_from_object
                .transform_point(self.vertices[t[k] as usize], false)
        })
    }
}
