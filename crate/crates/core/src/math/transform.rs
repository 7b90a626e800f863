use thiserror::Error;

use super::{Mat3, Quat, Vec3};
use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("matrix is singular or ill-conditioned")]
    Singular,
    #[error("bottom row must be (0, 0, 0, 1)")]
    NotAffine,
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Homogeneous 4x4 transform with its cached inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform<S> {
    m: [[S; 4]; 4],
    m_inv: [[S; 4]; 4],
}

fn identity4<S: Real>() -> [[S; 4]; 4] {
    let mut m = [[S::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

fn mul4<S: Real>(a: &[[S; 4]; 4], b: &[[S; 4]; 4]) -> [[S; 4]; 4] {
    let mut out = [[S::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = S::zero();
            for k in 0..4 {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert4<S: Real>(m: &[[S; 4]; 4]) -> Option<[[S; 4]; 4]> {
    let mut a = *m;
    let mut inv = identity4::<S>();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(S::zero(), |acc, v| acc.max(v.abs()));
    if scale == S::zero() {
        return None;
    }
    let eps = scale * S::epsilon() * S::lit(64.0);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= eps {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..4 {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for row in 0..4 {
            if row != col {
                let f = a[row][col];
                if f != S::zero() {
                    for j in 0..4 {
                        a[row][j] = a[row][j] - f * a[col][j];
                        inv[row][j] = inv[row][j] - f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

impl<S: Real> Transform<S> {
    pub fn identity() -> Self {
        Self {
            m: identity4(),
            m_inv: identity4(),
        }
    }

    /// Builds a transform from a row-major affine matrix, computing its inverse.
    pub fn from_matrix(m: [[S; 4]; 4]) -> Result<Self, TransformError> {
        if m.iter().flat_map(|r| r.iter()).any(|v| !v.is_finite()) {
            return Err(TransformError::NonFinite);
        }
        if m[3] != [S::zero(), S::zero(), S::zero(), S::one()] {
            return Err(TransformError::NotAffine);
        }
        let mut m_inv = invert4(&m).ok_or(TransformError::Singular)?;
        // The inverse of an affine matrix is affine; pin the bottom row exactly.
        m_inv[3] = [S::zero(), S::zero(), S::zero(), S::one()];
        let check = mul4(&m, &m_inv);
        let id = identity4::<S>();
        let tol = S::lit(1e-6).max(S::epsilon() * S::lit(1e3));
        for i in 0..4 {
            for j in 0..4 {
                if (check[i][j] - id[i][j]).abs() > tol {
                    return Err(TransformError::Singular);
                }
            }
        }
        Ok(Self { m, m_inv })
    }

    pub fn translation(t: Vec3<S>) -> Self {
        let mut m = identity4::<S>();
        let mut m_inv = identity4::<S>();
        for i in 0..3 {
            m[i][3] = t[i];
            m_inv[i][3] = -t[i];
        }
        Self { m, m_inv }
    }

    /// Rigid transform `x -> R x + t`; the inverse is formed from `R^T` exactly.
    pub fn rigid(rotation: Quat<S>, t: Vec3<S>) -> Self {
        let r = rotation.normalized().to_mat3();
        let rt = r.transpose();
        let t_inv = -(rt * t);
        let mut m = identity4::<S>();
        let mut m_inv = identity4::<S>();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = r.m[i][j];
                m_inv[i][j] = rt.m[i][j];
            }
            m[i][3] = t[i];
            m_inv[i][3] = t_inv[i];
        }
        Self { m, m_inv }
    }

    pub fn rotation_axis_angle(axis: Vec3<S>, angle: S) -> Self {
        Self::rigid(Quat::from_axis_angle(axis, angle), Vec3::zero())
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            m: mul4(&self.m, &other.m),
            m_inv: mul4(&other.m_inv, &self.m_inv),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            m: self.m_inv,
            m_inv: self.m,
        }
    }

    pub fn matrix(&self) -> &[[S; 4]; 4] {
        &self.m
    }

    pub fn inverse_matrix(&self) -> &[[S; 4]; 4] {
        &self.m_inv
    }

    pub fn is_identity(&self) -> bool {
        self.m == identity4()
    }

    /// Homogeneous point multiply by `m` (or `m_inv` when `inverse`).
    #[inline]
    pub fn transform_point(&self, p: Vec3<S>, inverse: bool) -> Vec3<S> {
        let m = if inverse { &self.m_inv } else { &self.m };
        Vec3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3],
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3],
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3],
        )
    }

    /// Direction multiply (ignores translation).
    #[inline]
    pub fn transform_vector(&self, v: Vec3<S>, inverse: bool) -> Vec3<S> {
        let m = if inverse { &self.m_inv } else { &self.m };
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// Normal transform by the inverse transpose of the linear block.
    pub fn transform_normal(&self, n: Vec3<S>) -> Vec3<S> {
        let mi = &self.m_inv;
        Vec3::new(
            mi[0][0] * n.x + mi[1][0] * n.y + mi[2][0] * n.z,
            mi[0][1] * n.x + mi[1][1] * n.y + mi[2][1] * n.z,
            mi[0][2] * n.x + mi[1][2] * n.y + mi[2][2] * n.z,
        )
    }

    pub fn linear_block(&self) -> Mat3<S> {
        let mut r = Mat3::identity();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][j];
            }
        }
        r
    }

    /// True when the linear block is orthonormal within `tol`.
    pub fn is_rigid(&self, tol: S) -> bool {
        let r = self.linear_block();
        let rtr = r.transpose() * r;
        let id = Mat3::<S>::identity();
        (0..3).all(|i| (0..3).all(|j| (rtr.m[i][j] - id.m[i][j]).abs() <= tol))
    }
}

impl<S: Real> Default for Transform<S> {
    fn default() -> Self {
        Self::identity()
    }
}
