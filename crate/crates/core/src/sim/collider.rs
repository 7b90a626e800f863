use std::sync::Arc;

use super::body::RigidBody;
use crate::math::{Transform, UnitVec3, Vec3};
use crate::num::Real;
use crate::volume::SdfGrid;

#[derive(Clone, Debug, PartialEq)]
pub enum ColliderShape<S> {
    /// Grid distance in the collider's local frame.
    Sdf(Arc<SdfGrid<S>>),
    /// Unbounded half space `n·x ≥ offset` in the local frame.
    Plane { normal: UnitVec3<S>, offset: S },
}

/// Where a collider's local frame comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Attachment<S> {
    Static(Transform<S>),
    /// Follows a body; the shape lives in the body's asset coordinates.
    Body(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Collider<S> {
    pub shape: ColliderShape<S>,
    pub attachment: Attachment<S>,
}

impl<S: Real> Collider<S> {
    pub fn static_sdf(sdf: SdfGrid<S>, world_from_sdf: Transform<S>) -> Self {
        Self {
            shape: ColliderShape::Sdf(Arc::new(sdf)),
            attachment: Attachment::Static(world_from_sdf),
        }
    }

    /// Ground `z = height`, solid below.
    pub fn ground(height: S) -> Self {
        Self {
            shape: ColliderShape::Plane {
                normal: UnitVec3::z_axis(),
                offset: height,
            },
            attachment: Attachment::Static(Transform::identity()),
        }
    }

    pub fn on_body(sdf: SdfGrid<S>, body: usize) -> Self {
        Self {
            shape: ColliderShape::Sdf(Arc::new(sdf)),
            attachment: Attachment::Body(body),
        }
    }

    pub fn body(&self) -> Option<usize> {
        match self.attachment {
            Attachment::Body(b) => Some(b),
            Attachment::Static(_) => None,
        }
    }

    pub fn world_from_local(&self, bodies: &[RigidBody<S>]) -> Transform<S> {
        match &self.attachment {
            Attachment::Static(t) => *t,
            Attachment::Body(b) => bodies[*b].asset_transform(),
        }
    }

    /// Signed distance and outward world normal at world point `p`. The
    /// normal is `None` where the field gradient vanishes. Distances are
    /// only metric for rigid frames.
    pub fn query(&self, frame: &Transform<S>, p: Vec3<S>) -> (S, Option<UnitVec3<S>>) {
        let local = frame.transform_point(p, true);
        let (phi, n) = match &self.shape {
            ColliderShape::Sdf(g) => {
                let s = g.query(local);
                (s.phi, s.normal)
            }
            ColliderShape::Plane { normal, offset } => (normal.dot(local) - *offset, Some(*normal)),
        };
        (
            phi,
            n.and_then(|n| UnitVec3::new(frame.transform_normal(n.get()))),
        )
    }
}
