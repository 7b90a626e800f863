use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::num::Real;

/// Point or direction in scene units.
/// Serialized as `[x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S> From<[S; 3]> for Vec3<S> {
    fn from([x, y, z]: [S; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<S> From<Vec3<S>> for [S; 3] {
    fn from(v: Vec3<S>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<S: Serialize> Serialize for Vec3<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        [&self.x, &self.y, &self.z].serialize(s)
    }
}

impl<'de, S: Deserialize<'de>> Deserialize<'de> for Vec3<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[S; 3]>::deserialize(d).map(Self::from)
    }
}

impl<S: Real> Vec3<S> {
    #[inline]
    pub const fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::splat(S::zero())
    }

    #[inline]
    pub fn splat(v: S) -> Self {
        Self::new(v, v, v)
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self::new(S::lit(v[0]), S::lit(v[1]), S::lit(v[2]))
    }

    pub fn to_f64(self) -> [f64; 3] {
        [
            self.x.to_f64_lossy(),
            self.y.to_f64_lossy(),
            self.z.to_f64_lossy(),
        ]
    }

    #[inline]
    pub fn unit_x() -> Self {
        Self::new(S::one(), S::zero(), S::zero())
    }

    #[inline]
    pub fn unit_y() -> Self {
        Self::new(S::zero(), S::one(), S::zero())
    }

    #[inline]
    pub fn unit_z() -> Self {
        Self::new(S::zero(), S::zero(), S::one())
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn length_squared(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn length(self) -> S {
        self.length_squared().sqrt()
    }

    /// Normalized copy, or `None` for a zero or non-finite vector.
    pub fn try_normalize(self) -> Option<Self> {
        let len = self.length();
        if len > S::zero() && len.is_finite() {
            Some(self / len)
        } else {
            None
        }
    }

    #[inline]
    pub fn mul_elem(self, o: Self) -> Self {
        Self::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    #[inline]
    pub fn min_elem(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    #[inline]
    pub fn max_elem(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    #[inline]
    pub fn max_component(self) -> S {
        self.x.max(self.y).max(self.z)
    }

    /// Index of the largest component (ties resolve to the lowest axis).
    pub fn max_axis(self) -> usize {
        if self.x >= self.y && self.x >= self.z {
            0
        } else if self.y >= self.z {
            1
        } else {
            2
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn abs(self) -> Self {
        Self::new(self.x.abs(), self.y.abs(), self.z.abs())
    }

    pub fn lerp(self, o: Self, t: S) -> Self {
        self + (o - self) * t
    }
}

impl<S> Index<usize> for Vec3<S> {
    type Output = S;
    #[inline]
    fn index(&self, i: usize) -> &S {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<S> IndexMut<usize> for Vec3<S> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut S {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<S: Real> Add for Vec3<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Real> AddAssign for Vec3<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Real> Sub for Vec3<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Real> SubAssign for Vec3<S> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Real> Mul<S> for Vec3<S> {
    type Output = Self;
    #[inline]
    fn mul(self, s: S) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<S: Real> MulAssign<S> for Vec3<S> {
    #[inline]
    fn mul_assign(&mut self, s: S) {
        *self = *self * s;
    }
}

impl<S: Real> Div<S> for Vec3<S> {
    type Output = Self;
    #[inline]
    fn div(self, s: S) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<S: Real> Neg for Vec3<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Direction of unit length. Construction renormalizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3<S>(Vec3<S>);

impl<S: Real> UnitVec3<S> {
    /// Normalizes `v`; `None` if it has zero length or is not finite.
    pub fn new(v: Vec3<S>) -> Option<Self> {
        v.try_normalize().map(Self)
    }

    /// Wraps a vector the caller already knows to be normalized.
    #[inline]
    pub fn new_unchecked(v: Vec3<S>) -> Self {
        debug_assert!(
            (v.length() - S::one()).abs() < S::lit(1e-4),
            "UnitVec3::new_unchecked on non-unit vector {v:?}"
        );
        Self(v)
    }

    #[inline]
    pub fn get(self) -> Vec3<S> {
        self.0
    }

    pub fn x_axis() -> Self {
        Self(Vec3::unit_x())
    }

    pub fn y_axis() -> Self {
        Self(Vec3::unit_y())
    }

    pub fn z_axis() -> Self {
        Self(Vec3::unit_z())
    }
}

impl<S: Real> Neg for UnitVec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl<S> std::ops::Deref for UnitVec3<S> {
    type Target = Vec3<S>;
    #[inline]
    fn deref(&self) -> &Vec3<S> {
        &self.0
    }
}

/// Orthonormal basis around `n` (branchless construction of Duff et al.).
pub fn orthonormal_basis<S: Real>(n: Vec3<S>) -> (Vec3<S>, Vec3<S>) {
    let sign = if n.z >= S::zero() {
        S::one()
    } else {
        -S::one()
    };
    let a = -S::one() / (sign + n.z);
    let b = n.x * n.y * a;
    let t = Vec3::new(S::one() + sign * n.x * n.x * a, sign * b, -sign * n.x);
    let bt = Vec3::new(b, sign + n.y * n.y * a, -n.y);
    (t, bt)
}
