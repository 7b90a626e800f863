use crate::math::{Mat3, Quat, Transform, Vec3};
use crate::num::Real;
use crate::volume::{density_isosurface_points, RadianceGrid};

/// How a body touches colliders.
#[derive(Clone, Debug, PartialEq)]
pub enum BodyShape<S> {
    /// Analytic sphere around the centre of mass.
    Sphere { radius: S },
    /// The body's collision vertices.
    Points,
}

/// Rigid body in world space. The body frame has its origin at the centre
/// of mass; `asset_offset` is that centre expressed in the coordinates of
/// the attached mesh or field.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidBody<S> {
    pub com: Vec3<S>,
    pub orientation: Quat<S>,
    pub lin_vel: Vec3<S>,
    pub ang_vel: Vec3<S>,
    inv_mass: S,
    inertia: Mat3<S>,
    inv_inertia: Mat3<S>,
    pub shape: BodyShape<S>,
    /// Body-frame points queried against colliders.
    pub collision_vertices: Vec<Vec3<S>>,
    pub asset_offset: Vec3<S>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BodyError {
    #[error("mass must be positive and finite")]
    Mass,
    #[error("inertia must be symmetric positive definite")]
    Inertia,
    #[error("radius must be positive")]
    Radius,
    #[error("no density above the threshold; cannot derive mass properties")]
    EmptyField,
}

impl<S: Real> RigidBody<S> {
    pub fn new(
        com: Vec3<S>,
        mass: S,
        inertia: Mat3<S>,
        shape: BodyShape<S>,
    ) -> Result<Self, BodyError> {
        if !(mass > S::zero() && mass.is_finite()) {
            return Err(BodyError::Mass);
        }
        if !inertia.is_spd() {
            return Err(BodyError::Inertia);
        }
        let inv_inertia = inertia.inverse().ok_or(BodyError::Inertia)?;
        Ok(Self {
            com,
            orientation: Quat::identity(),
            lin_vel: Vec3::zero(),
            ang_vel: Vec3::zero(),
            inv_mass: S::one() / mass,
            inertia,
            inv_inertia,
            shape,
            collision_vertices: Vec::new(),
            asset_offset: Vec3::zero(),
        })
    }

    /// Solid sphere.
    pub fn sphere(center: Vec3<S>, radius: S, mass: S) -> Result<Self, BodyError> {
        if !(radius > S::zero()) {
            return Err(BodyError::Radius);
        }
        let i = S::lit(0.4) * mass * radius * radius;
        Self::new(
            center,
            mass,
            Mat3::diagonal(Vec3::splat(i)),
            BodyShape::Sphere { radius },
        )
    }

    /// Immovable body (infinite mass and inertia).
    pub fn fixed(com: Vec3<S>, shape: BodyShape<S>) -> Self {
        Self {
            com,
            orientation: Quat::identity(),
            lin_vel: Vec3::zero(),
            ang_vel: Vec3::zero(),
            inv_mass: S::zero(),
            inertia: Mat3::identity(),
            inv_inertia: Mat3::zero(),
            shape,
            collision_vertices: Vec::new(),
            asset_offset: Vec3::zero(),
        }
    }

    /// Uniform-density body occupying the voxels whose σ reaches
    /// `threshold_fraction · max σ`. Placed so its centre of mass sits at
    /// `world_com`; collision vertices are the density crossing points,
    /// thinned to at most `max_vertices` by a fixed stride.
    pub fn from_field(
        field: &RadianceGrid<S>,
        mass: S,
        threshold_fraction: S,
        world_com: Vec3<S>,
        max_vertices: usize,
    ) -> Result<Self, BodyError> {
        let threshold = field.max_sigma() * threshold_fraction;
        if !(threshold > S::zero()) {
            return Err(BodyError::EmptyField);
        }
        let lat = field.lattice();
        let inside: Vec<Vec3<S>> = (0..lat.len())
            .filter(|&i| field.sigma()[i] >= threshold)
            .map(|i| {
                let [a, b, c] = lat.coords(i);
                lat.node_position(a, b, c)
            })
            .collect();
        if inside.is_empty() {
            return Err(BodyError::EmptyField);
        }
        let n = S::from_usize_lossy(inside.len());
        let c = inside.iter().fold(Vec3::zero(), |a, p| a + *p) / n;
        let h = lat.spacing();
        // Each node stands for a voxel of size h; include its own inertia so
        // thin objects stay well conditioned.
        let cell = Vec3::new(
            (h.y * h.y + h.z * h.z) / S::lit(12.0),
            (h.x * h.x + h.z * h.z) / S::lit(12.0),
            (h.x * h.x + h.y * h.y) / S::lit(12.0),
        );
        let mut m = [[S::zero(); 3]; 3];
        for p in &inside {
            let r = *p - c;
            let rr = r.length_squared();
            for i in 0..3 {
                for j in 0..3 {
                    let delta = if i == j { rr + cell[i] } else { S::zero() };
                    m[i][j] = m[i][j] + delta - r[i] * r[j];
                }
            }
        }
        let scale = mass / n;
        let inertia = Mat3::from_rows(m.map(|row| row.map(|v| v * scale)));
        let mut body = Self::new(world_com, mass, inertia, BodyShape::Points)?;
        body.asset_offset = c;
        let pts = density_isosurface_points(field, threshold);
        let stride = pts.len().div_ceil(max_vertices.max(1)).max(1);
        body.collision_vertices = pts.into_iter().step_by(stride).map(|p| p - c).collect();
        Ok(body)
    }

    pub fn with_orientation(mut self, q: Quat<S>) -> Self {
        self.orientation = q.normalized();
        self
    }

    pub fn with_velocity(mut self, lin: Vec3<S>, ang: Vec3<S>) -> Self {
        self.lin_vel = lin;
        self.ang_vel = ang;
        self
    }

    pub fn inv_mass(&self) -> S {
        self.inv_mass
    }

    /// `∞` for fixed bodies.
    pub fn mass(&self) -> S {
        if self.inv_mass > S::zero() {
            S::one() / self.inv_mass
        } else {
            S::infinity()
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.inv_mass == S::zero()
    }

    /// Body-frame inertia tensor.
    pub fn inertia(&self) -> Mat3<S> {
        self.inertia
    }

    pub fn inv_inertia_world(&self) -> Mat3<S> {
        let r = self.orientation.to_mat3();
        r * self.inv_inertia * r.transpose()
    }

    pub fn inertia_world(&self) -> Mat3<S> {
        let r = self.orientation.to_mat3();
        r * self.inertia * r.transpose()
    }

    /// `x_world = R x_body + com`.
    pub fn transform(&self) -> Transform<S> {
        Transform::rigid(self.orientation, self.com)
    }

    /// World from the attached asset's own coordinates.
    pub fn asset_transform(&self) -> Transform<S> {
        self.transform()
            .compose(&Transform::translation(-self.asset_offset))
    }

    pub fn world_vertex(&self, i: usize) -> Vec3<S> {
        self.com + self.orientation.rotate(self.collision_vertices[i])
    }

    pub fn velocity_at(&self, p: Vec3<S>) -> Vec3<S> {
        self.lin_vel + self.ang_vel.cross(p - self.com)
    }

    /// Inverse of the effective mass seen by an impulse along `n` at `p`.
    pub fn generalized_inv_mass(&self, p: Vec3<S>, n: Vec3<S>) -> S {
        if self.is_fixed() {
            return S::zero();
        }
        let rn = (p - self.com).cross(n);
        self.inv_mass + rn.dot(self.inv_inertia_world() * rn)
    }

    /// Velocity impulse `j` applied at world point `p`.
    pub fn apply_impulse(&mut self, p: Vec3<S>, j: Vec3<S>) {
        if self.is_fixed() {
            return;
        }
        self.lin_vel += j * self.inv_mass;
        self.ang_vel += self.inv_inertia_world() * (p - self.com).cross(j);
    }

    /// Positional correction for a positional impulse `dp` (mass · length)
    /// at world point `p`.
    pub fn apply_position_impulse(&mut self, p: Vec3<S>, dp: Vec3<S>) {
        if self.is_fixed() {
            return;
        }
        let dtheta = self.inv_inertia_world() * (p - self.com).cross(dp);
        self.com += dp * self.inv_mass;
        if dtheta != Vec3::zero() {
            let dq = Quat::new(S::zero(), dtheta.x, dtheta.y, dtheta.z) * self.orientation;
            self.orientation = self.orientation.add_scaled(&dq, S::lit(0.5)).normalized();
        }
    }

    pub fn momentum(&self) -> Vec3<S> {
        self.lin_vel * self.mass()
    }

    pub fn angular_momentum(&self) -> Vec3<S> {
        self.inertia_world() * self.ang_vel + self.com.cross(self.momentum())
    }

    pub fn kinetic_energy(&self) -> S {
        if self.is_fixed() {
            return S::zero();
        }
        let half = S::lit(0.5);
        half * self.mass() * self.lin_vel.length_squared()
            + half * self.ang_vel.dot(self.inertia_world() * self.ang_vel)
    }
}

/// Frictionless impulse between two bodies touching at `point` with normal
/// `normal` pointing from `b` towards `a`. Returns the impulse magnitude,
/// or `None` when the bodies already separate. A fixed `b` reduces to
/// reflecting `a` off a static surface.
pub fn couple_impulse<S: Real>(
    a: &mut RigidBody<S>,
    b: &mut RigidBody<S>,
    point: Vec3<S>,
    normal: Vec3<S>,
    restitution: S,
) -> Option<S> {
    let v_rel = a.velocity_at(point) - b.velocity_at(point);
    let vn = v_rel.dot(normal);
    if vn >= S::zero() {
        return None;
    }
    let w = a.generalized_inv_mass(point, normal) + b.generalized_inv_mass(point, normal);
    if w <= S::zero() {
        return None;
    }
    let j = -(S::one() + restitution) * vn / w;
    a.apply_impulse(point, normal * j);
    b.apply_impulse(point, normal * -j);
    Some(j)
}
