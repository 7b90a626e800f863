use std::ops::Mul;

use super::{Mat3, Vec3};
use crate::num::Real;

/// Rotation quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Real> Quat<S> {
    pub fn identity() -> Self {
        Self {
            w: S::one(),
            x: S::zero(),
            y: S::zero(),
            z: S::zero(),
        }
    }

    pub fn new(w: S, x: S, y: S, z: S) -> Self {
        Self { w, x, y, z }
    }

    /// Rotation by `angle` radians about `axis` (normalized internally; zero axis gives identity).
    pub fn from_axis_angle(axis: Vec3<S>, angle: S) -> Self {
        match axis.try_normalize() {
            Some(a) => {
                let half = angle * S::lit(0.5);
                let s = half.sin();
                Self::new(half.cos(), a.x * s, a.y * s, a.z * s)
            }
            None => Self::identity(),
        }
    }

    pub fn vector(&self) -> Vec3<S> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> S {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn rotate(&self, v: Vec3<S>) -> Vec3<S> {
        let q = self.vector();
        let t = q.cross(v) * S::lit(2.0);
        v + t * self.w + q.cross(t)
    }

    pub fn to_mat3(&self) -> Mat3<S> {
        let two = S::lit(2.0);
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Mat3::from_rows([
            [
                S::one() - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                S::one() - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                S::one() - two * (x * x + y * y),
            ],
        ])
    }

    /// First-order update `q += h/2 [ω, 0] q`, renormalized.
    pub fn integrate(&self, omega: Vec3<S>, h: S) -> Self {
        let dq = Quat::new(S::zero(), omega.x, omega.y, omega.z) * *self;
        let half = h * S::lit(0.5);
        Self::new(
            self.w + dq.w * half,
            self.x + dq.x * half,
            self.y + dq.y * half,
            self.z + dq.z * half,
        )
        .normalized()
    }

    pub fn add_scaled(&self, o: &Self, s: S) -> Self {
        Self::new(
            self.w + o.w * s,
            self.x + o.x * s,
            self.y + o.y * s,
            self.z + o.z * s,
        )
    }
}

impl<S: Real> Mul for Quat<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotate_matches_matrix() {
        let q = Quat::from_axis_angle(Vec3::new(1.0f64, 2.0, -0.5), 0.7);
        let v = Vec3::new(0.3, -0.2, 1.1);
        let a = q.rotate(v);
        let b = q.to_mat3() * v;
        assert!((a - b).length() < 1e-12);
    }
}
