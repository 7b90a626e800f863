use std::collections::BTreeMap;

use super::body::{BodyShape, RigidBody};
use super::collider::Collider;
use super::SimError;
use crate::math::{Quat, Transform, UnitVec3, Vec3};
use crate::num::Real;

/// Point masses. `inv_mass = 0` pins a particle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParticleSystem<S> {
    pub positions: Vec<Vec3<S>>,
    pub prev_positions: Vec<Vec3<S>>,
    pub velocities: Vec<Vec3<S>>,
    pub inv_mass: Vec<S>,
}

impl<S: Real> ParticleSystem<S> {
    pub fn new() -> Self {
        Self {
            positions: Vec::new(),
            prev_positions: Vec::new(),
            velocities: Vec::new(),
            inv_mass: Vec::new(),
        }
    }

    pub fn push(&mut self, p: Vec3<S>, inv_mass: S) -> usize {
        assert!(
            inv_mass >= S::zero() && inv_mass.is_finite(),
            "inverse mass must be finite and non-negative"
        );
        self.positions.push(p);
        self.prev_positions.push(p);
        self.velocities.push(Vec3::zero());
        self.inv_mass.push(inv_mass);
        self.positions.len() - 1
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn pin(&mut self, i: usize) {
        self.inv_mass[i] = S::zero();
        self.velocities[i] = Vec3::zero();
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceConstraint<S> {
    pub a: usize,
    pub b: usize,
    pub rest_length: S,
    /// Inverse stiffness; 0 is rigid.
    pub compliance: S,
    lambda: S,
}

impl<S: Real> DistanceConstraint<S> {
    pub fn new(a: usize, b: usize, rest_length: S, compliance: S) -> Result<Self, SimError> {
        if a == b {
            return Err(SimError::Invalid(format!(
                "constraint joins particle {a} to itself"
            )));
        }
        if !(rest_length > S::zero() && rest_length.is_finite()) {
            return Err(SimError::Invalid(format!(
                "constraint {a}-{b}: rest length must be positive"
            )));
        }
        if !(compliance >= S::zero() && compliance.is_finite()) {
            return Err(SimError::Invalid(format!(
                "constraint {a}-{b}: compliance must be non-negative"
            )));
        }
        Ok(Self {
            a,
            b,
            rest_length,
            compliance,
            lambda: S::zero(),
        })
    }

    /// Multiplier accumulated over the last substep.
    pub fn lambda(&self) -> S {
        self.lambda
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimSettings<S> {
    pub gravity: Vec3<S>,
    pub dt: S,
    pub substeps: usize,
    pub iterations: usize,
    pub restitution: S,
    pub friction: S,
    /// Any speed above this aborts the step.
    pub max_speed: S,
    /// Linear velocity damping rate per second.
    pub damping: S,
}

impl<S: Real> Default for SimSettings<S> {
    fn default() -> Self {
        Self {
            gravity: Vec3::new(S::zero(), S::zero(), S::lit(-9.81)),
            dt: S::one() / S::lit(60.0),
            substeps: 4,
            iterations: 8,
            restitution: S::lit(0.3),
            friction: S::lit(0.5),
            max_speed: S::lit(1000.0),
            damping: S::zero(),
        }
    }
}

impl<S: Real> SimSettings<S> {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Invalid(m.into()));
        if !(self.dt > S::zero() && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.substeps == 0 || self.iterations == 0 {
            return bad("substeps and iterations must be at least 1");
        }
        if !self.gravity.is_finite() {
            return bad("gravity must be finite");
        }
        if !(self.restitution >= S::zero() && self.restitution <= S::one()) {
            return bad("restitution must lie in [0, 1]");
        }
        if !(self.friction >= S::zero() && self.friction.is_finite()) {
            return bad("friction must be non-negative");
        }
        if !(self.max_speed > S::zero()) {
            return bad("max_speed must be positive");
        }
        if !(self.damping >= S::zero() && self.damping.is_finite()) {
            return bad("damping must be non-negative");
        }
        Ok(())
    }
}

/// What touches a collider.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContactSource {
    Particle(usize),
    Vertex { body: usize, vertex: usize },
    Sphere(usize),
}

/// Penetration of a source point into a collider. `point` lies on the
/// source; `normal` points out of the collider.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contact<S> {
    pub source: ContactSource,
    pub collider: usize,
    pub phi: S,
    pub normal: UnitVec3<S>,
    pub point: Vec3<S>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Handle {
    Static,
    Particle(usize),
    Body(usize),
}

impl ContactSource {
    fn handle(self) -> Handle {
        match self {
            ContactSource::Particle(i) => Handle::Particle(i),
            ContactSource::Vertex { body, .. } | ContactSource::Sphere(body) => Handle::Body(body),
        }
    }
}

struct Record<S> {
    normal: Vec3<S>,
    lambda: S,
    pre_vn: S,
}

/// State saved at the start of a substep.
struct Pre<S> {
    particle_vel: Vec<Vec3<S>>,
    com: Vec<Vec3<S>>,
    orientation: Vec<Quat<S>>,
    lin: Vec<Vec3<S>>,
    ang: Vec<Vec3<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct World<S> {
    pub settings: SimSettings<S>,
    pub particles: ParticleSystem<S>,
    pub constraints: Vec<DistanceConstraint<S>>,
    pub bodies: Vec<RigidBody<S>>,
    pub colliders: Vec<Collider<S>>,
    pub bindings: Vec<super::Binding>,
    pub time: S,
}

impl<S: Real> World<S> {
    pub fn new(settings: SimSettings<S>) -> Self {
        Self {
            settings,
            particles: ParticleSystem::new(),
            constraints: Vec::new(),
            bodies: Vec::new(),
            colliders: Vec::new(),
            bindings: Vec::new(),
            time: S::zero(),
        }
    }

    pub fn add_body(&mut self, body: RigidBody<S>) -> usize {
        self.bodies.push(body);
        self.bodies.len() - 1
    }

    pub fn add_collider(&mut self, c: Collider<S>) -> usize {
        self.colliders.push(c);
        self.colliders.len() - 1
    }

    /// Every (source, collider) pair that can produce a contact, in the
    /// fixed order the solver visits them.
    fn pairs(&self) -> Vec<(ContactSource, usize)> {
        let mut out = Vec::new();
        let nc = self.colliders.len();
        for i in 0..self.particles.len() {
            out.extend((0..nc).map(|c| (ContactSource::Particle(i), c)));
        }
        for (b, body) in self.bodies.iter().enumerate() {
            let own = |c: usize| self.colliders[c].body() == Some(b);
            match body.shape {
                BodyShape::Sphere { .. } => {
                    out.extend(
                        (0..nc)
                            .filter(|&c| !own(c))
                            .map(|c| (ContactSource::Sphere(b), c)),
                    );
                }
                BodyShape::Points => {
                    for vertex in 0..body.collision_vertices.len() {
                        out.extend(
                            (0..nc)
                                .filter(|&c| !own(c))
                                .map(|c| (ContactSource::Vertex { body: b, vertex }, c)),
                        );
                    }
                }
            }
        }
        out
    }

    fn probe(
        &self,
        source: ContactSource,
        collider: usize,
        frame: &Transform<S>,
    ) -> Option<Contact<S>> {
        let c = &self.colliders[collider];
        let (p, radius) = match source {
            ContactSource::Particle(i) => (self.particles.positions[i], S::zero()),
            ContactSource::Vertex { body, vertex } => {
                (self.bodies[body].world_vertex(vertex), S::zero())
            }
            ContactSource::Sphere(b) => match self.bodies[b].shape {
                BodyShape::Sphere { radius } => (self.bodies[b].com, radius),
                BodyShape::Points => unreachable!("sphere source on a point body"),
            },
        };
        let (d, n) = c.query(frame, p);
        let phi = d - radius;
        if !(phi < S::zero()) {
            return None;
        }
        let Some(normal) = n else {
            log::debug!(
                "skipping contact of {source:?} with collider {collider}: degenerate normal"
            );
            return None;
        };
        Some(Contact {
            source,
            collider,
            phi,
            normal,
            point: p - normal.get() * radius,
        })
    }

    /// All current penetrations, in solver order.
    pub fn detect_contacts(&self) -> Vec<Contact<S>> {
        let frames: Vec<Transform<S>> = self
            .colliders
            .iter()
            .map(|c| c.world_from_local(&self.bodies))
            .collect();
        self.pairs()
            .into_iter()
            .filter_map(|(s, c)| self.probe(s, c, &frames[c]))
            .collect()
    }

    fn target(&self, collider: usize) -> Handle {
        match self.colliders[collider].body() {
            Some(b) => Handle::Body(b),
            None => Handle::Static,
        }
    }

    fn inv_mass_at(&self, h: Handle, p: Vec3<S>, n: Vec3<S>) -> S {
        match h {
            Handle::Static => S::zero(),
            Handle::Particle(i) => self.particles.inv_mass[i],
            Handle::Body(b) => self.bodies[b].generalized_inv_mass(p, n),
        }
    }

    fn move_by(&mut self, h: Handle, p: Vec3<S>, dp: Vec3<S>) {
        match h {
            Handle::Static => {}
            Handle::Particle(i) => {
                let w = self.particles.inv_mass[i];
                self.particles.positions[i] += dp * w;
            }
            Handle::Body(b) => self.bodies[b].apply_position_impulse(p, dp),
        }
    }

    fn velocity_at(&self, h: Handle, p: Vec3<S>) -> Vec3<S> {
        match h {
            Handle::Static => Vec3::zero(),
            Handle::Particle(i) => self.particles.velocities[i],
            Handle::Body(b) => self.bodies[b].velocity_at(p),
        }
    }

    fn pre_velocity_at(&self, h: Handle, p: Vec3<S>, pre: &Pre<S>) -> Vec3<S> {
        match h {
            Handle::Static => Vec3::zero(),
            Handle::Particle(i) => pre.particle_vel[i],
            Handle::Body(b) => pre.lin[b] + pre.ang[b].cross(p - pre.com[b]),
        }
    }

    fn push(&mut self, h: Handle, p: Vec3<S>, j: Vec3<S>) {
        match h {
            Handle::Static => {}
            Handle::Particle(i) => {
                let w = self.particles.inv_mass[i];
                self.particles.velocities[i] += j * w;
            }
            Handle::Body(b) => self.bodies[b].apply_impulse(p, j),
        }
    }

    fn source_point(&self, s: ContactSource, n: Vec3<S>) -> Vec3<S> {
        match s {
            ContactSource::Particle(i) => self.particles.positions[i],
            ContactSource::Vertex { body, vertex } => self.bodies[body].world_vertex(vertex),
            ContactSource::Sphere(b) => match self.bodies[b].shape {
                BodyShape::Sphere { radius } => self.bodies[b].com - n * radius,
                BodyShape::Points => self.bodies[b].com,
            },
        }
    }

    fn solve_distance(&mut self, ci: usize, h: S) {
        let c = self.constraints[ci];
        let (wa, wb) = (self.particles.inv_mass[c.a], self.particles.inv_mass[c.b]);
        let d = self.particles.positions[c.a] - self.particles.positions[c.b];
        let len = d.length();
        let alpha = c.compliance / (h * h);
        let w = wa + wb;
        if len == S::zero() || w + alpha == S::zero() {
            return;
        }
        let n = d / len;
        let dl = (-(len - c.rest_length) - alpha * c.lambda) / (w + alpha);
        self.constraints[ci].lambda = c.lambda + dl;
        self.particles.positions[c.a] += n * (wa * dl);
        self.particles.positions[c.b] -= n * (wb * dl);
    }

    fn resolve(
        &mut self,
        c: &Contact<S>,
        pre: &Pre<S>,
        records: &mut BTreeMap<(ContactSource, usize), Record<S>>,
    ) {
        let src = c.source.handle();
        let tgt = self.target(c.collider);
        let n = c.normal.get();
        let w = self.inv_mass_at(src, c.point, n) + self.inv_mass_at(tgt, c.point, n);
        if w <= S::zero() {
            return;
        }
        let pre_vn = (self.pre_velocity_at(src, c.point, pre)
            - self.pre_velocity_at(tgt, c.point, pre))
        .dot(n);
        let dl = -c.phi / w;
        self.move_by(src, c.point, n * dl);
        self.move_by(tgt, c.point, n * -dl);
        let r = records.entry((c.source, c.collider)).or_insert(Record {
            normal: n,
            lambda: S::zero(),
            pre_vn,
        });
        r.normal = n;
        r.lambda = r.lambda + dl;
    }

    /// Restitution and Coulomb friction on every contact touched in the
    /// substep.
    fn velocity_pass(&mut self, h: S, records: &BTreeMap<(ContactSource, usize), Record<S>>) {
        let e = self.settings.restitution;
        let mu = self.settings.friction;
        // Slow approaches rest instead of bouncing forever.
        let rest_speed = S::lit(2.0) * self.settings.gravity.length() * h;
        for (&(source, collider), r) in records {
            let n = r.normal;
            let src = source.handle();
            let tgt = self.target(collider);
            let p = self.source_point(source, n);
            let v_rel = self.velocity_at(src, p) - self.velocity_at(tgt, p);
            let vn = v_rel.dot(n);
            let vt = v_rel - n * vn;
            let wn = self.inv_mass_at(src, p, n) + self.inv_mass_at(tgt, p, n);
            if wn <= S::zero() {
                continue;
            }
            let e_eff = if r.pre_vn.abs() <= rest_speed {
                S::zero()
            } else {
                e
            };
            let target_vn = (-e_eff * r.pre_vn).max(S::zero());
            let mut j = n * ((target_vn - vn) / wn);
            let vt_len = vt.length();
            if vt_len > S::zero() && mu > S::zero() {
                let t = vt / vt_len;
                let wt = self.inv_mass_at(src, p, t) + self.inv_mass_at(tgt, p, t);
                if wt > S::zero() {
                    let jt = (vt_len / wt).min(mu * r.lambda.abs() / h);
                    j -= t * jt;
                }
            }
            self.push(src, p, j);
            self.push(tgt, p, -j);
        }
    }

    fn substep(&mut self, h: S, iterations: usize) -> Result<(), SimError> {
        let g = self.settings.gravity;
        let pre = Pre {
            particle_vel: self.particles.velocities.clone(),
            com: self.bodies.iter().map(|b| b.com).collect(),
            orientation: self.bodies.iter().map(|b| b.orientation).collect(),
            lin: self.bodies.iter().map(|b| b.lin_vel).collect(),
            ang: self.bodies.iter().map(|b| b.ang_vel).collect(),
        };
        let ps = &mut self.particles;
        ps.prev_positions.clone_from(&ps.positions);
        for i in 0..ps.len() {
            if ps.inv_mass[i] > S::zero() {
                ps.velocities[i] += g * h;
                ps.positions[i] += ps.velocities[i] * h;
            }
        }
        for b in self.bodies.iter_mut().filter(|b| !b.is_fixed()) {
            b.lin_vel += g * h;
            b.com += b.lin_vel * h;
            if b.ang_vel != Vec3::zero() {
                let iw = b.inertia_world();
                let gyro = b.inv_inertia_world() * -b.ang_vel.cross(iw * b.ang_vel);
                b.ang_vel += gyro * h;
                b.orientation = b.orientation.integrate(b.ang_vel, h);
            }
        }
        for c in &mut self.constraints {
            c.lambda = S::zero();
        }
        let pairs = self.pairs();
        let mut records = BTreeMap::new();
        for _ in 0..iterations {
            for ci in 0..self.constraints.len() {
                self.solve_distance(ci, h);
            }
            for &(source, collider) in &pairs {
                let frame = self.colliders[collider].world_from_local(&self.bodies);
                if let Some(c) = self.probe(source, collider, &frame) {
                    self.resolve(&c, &pre, &mut records);
                }
            }
        }
        let ps = &mut self.particles;
        for i in 0..ps.len() {
            if ps.inv_mass[i] > S::zero() {
                ps.velocities[i] = (ps.positions[i] - ps.prev_positions[i]) / h;
            }
        }
        for (i, b) in self
            .bodies
            .iter_mut()
            .enumerate()
            .filter(|(_, b)| !b.is_fixed())
        {
            b.lin_vel = (b.com - pre.com[i]) / h;
            b.ang_vel = if b.orientation == pre.orientation[i] {
                Vec3::zero()
            } else {
                let dq = b.orientation * pre.orientation[i].conjugate();
                let w = dq.vector() * (S::lit(2.0) / h);
                if dq.w < S::zero() {
                    -w
                } else {
                    w
                }
            };
        }
        if self.settings.damping > S::zero() {
            let k = (S::one() - self.settings.damping * h).max(S::zero());
            for v in &mut self.particles.velocities {
                *v *= k;
            }
            for b in &mut self.bodies {
                b.lin_vel *= k;
                b.ang_vel *= k;
            }
        }
        self.velocity_pass(h, &records);
        self.check_speeds()
    }

    fn check_speeds(&self) -> Result<(), SimError> {
        let cap = self.settings.max_speed;
        let bad = |v: Vec3<S>| !(v.length() <= cap);
        for (i, v) in self.particles.velocities.iter().enumerate() {
            if bad(*v) {
                return Err(SimError::Unstable {
                    time: self.time.to_f64_lossy(),
                    dump: format!(
                        "particle {i}: x={:?} v={:?} inv_mass={:?}",
                        self.particles.positions[i].to_f64(),
                        v.to_f64(),
                        self.particles.inv_mass[i].to_f64_lossy()
                    ),
                });
            }
        }
        for (i, b) in self.bodies.iter().enumerate() {
            if bad(b.lin_vel) || !b.ang_vel.is_finite() || !b.com.is_finite() {
                return Err(SimError::Unstable {
                    time: self.time.to_f64_lossy(),
                    dump: format!(
                        "body {i}: com={:?} q={:?} v={:?} w={:?}",
                        b.com.to_f64(),
                        [
                            b.orientation.w,
                            b.orientation.x,
                            b.orientation.y,
                            b.orientation.z
                        ]
                        .map(|x| x.to_f64_lossy()),
                        b.lin_vel.to_f64(),
                        b.ang_vel.to_f64()
                    ),
                });
            }
        }
        Ok(())
    }

    /// Advances by one frame using the world's settings.
    pub fn step(&mut self) -> Result<(), SimError> {
        let s = self.settings;
        self.step_with(s.dt, s.substeps, s.iterations)
    }

    pub fn step_with(&mut self, dt: S, substeps: usize, iterations: usize) -> Result<(), SimError> {
        self.settings.validate()?;
        if !(dt > S::zero() && dt.is_finite()) {
            return Err(SimError::Invalid("dt must be positive".into()));
        }
        if substeps == 0 || iterations == 0 {
            return Err(SimError::Invalid(
                "substeps and iterations must be at least 1".into(),
            ));
        }
        let h = dt / S::from_usize_lossy(substeps);
        for _ in 0..substeps {
            self.substep(h, iterations)?;
        }
        self.time = self.time + dt;
        Ok(())
    }

    pub fn kinetic_energy(&self) -> S {
        let half = S::lit(0.5);
        let p: S = self
            .particles
            .velocities
            .iter()
            .zip(&self.particles.inv_mass)
            .filter(|(_, w)| **w > S::zero())
            .map(|(v, w)| half * v.length_squared() / *w)
            .sum();
        p + self.bodies.iter().map(|b| b.kinetic_energy()).sum::<S>()
    }

    /// Gravitational potential relative to the origin.
    pub fn potential_energy(&self) -> S {
        let g = self.settings.gravity;
        let p: S = self
            .particles
            .positions
            .iter()
            .zip(&self.particles.inv_mass)
            .filter(|(_, w)| **w > S::zero())
            .map(|(x, w)| -g.dot(*x) / *w)
            .sum();
        p + self
            .bodies
            .iter()
            .filter(|b| !b.is_fixed())
            .map(|b| -g.dot(b.com) * b.mass())
            .sum::<S>()
    }

    pub fn energy(&self) -> S {
        self.kinetic_energy() + self.potential_energy()
    }
}
