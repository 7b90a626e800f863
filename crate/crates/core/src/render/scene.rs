use super::emitters::{shadow_mask, EmitterSet};
use crate::math::{Aabb, Vec3};
use crate::num::Real;
use crate::rng::Rng;
use crate::surface::{Bvh, TriangleMesh};
use crate::volume::RadianceGrid;

/// Spawned rays start this fraction of the scene diagonal off the surface.
pub const SPAWN_OFFSET: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderSettings<S> {
    pub spp: u32,
    pub n_bounces: u32,
    /// Paths stop once every throughput channel falls below this.
    pub threshold: S,
    pub march_step: S,
    pub seed: u64,
}

impl<S: Real> Default for RenderSettings<S> {
    fn default() -> Self {
        Self {
            spp: 16,
            n_bounces: 8,
            threshold: S::lit(1e-3),
            march_step: S::lit(0.01),
            seed: 0,
        }
    }
}

/// Everything a render pass reads. Mutate the public parts between frames,
/// then call [`Scene::rebuild`].
#[derive(Clone, Debug)]
pub struct Scene<S> {
    pub fields: Vec<RadianceGrid<S>>,
    pub meshes: Vec<TriangleMesh<S>>,
    pub emitters: EmitterSet<S>,
    pub settings: RenderSettings<S>,
    bvh: Bvh<S>,
    occluders: Vec<bool>,
    diagonal: S,
}

impl<S: Real> Scene<S> {
    pub fn new(
        fields: Vec<RadianceGrid<S>>,
        meshes: Vec<TriangleMesh<S>>,
        emitters: EmitterSet<S>,
        settings: RenderSettings<S>,
    ) -> Self {
        let mut s = Self {
            fields,
            meshes,
            emitters,
            settings,
            bvh: Bvh::build(&[]),
            occluders: Vec::new(),
            diagonal: S::zero(),
        };
        s.rebuild();
        s
    }

    /// Rebuilds the BVH and cached bounds after geometry or transforms change.
    pub fn rebuild(&mut self) {
        self.bvh = Bvh::build(&self.meshes);
        self.occluders = self.meshes.iter().map(|m| !m.is_emissive()).collect();
        self.refresh_bounds();
    }

    /// Refreshes cached bounds only (field transforms changed, meshes did not).
    pub fn refresh_bounds(&mut self) {
        let b = self.bounds();
        self.diagonal = if b.is_empty() {
            S::zero()
        } else {
            b.diagonal()
        };
    }

    pub fn bvh(&self) -> &Bvh<S> {
        &self.bvh
    }

    pub fn bounds(&self) -> Aabb<S> {
        let mut b = self.bvh.bounds();
        for f in &self.fields {
            b = b.union(&f.world_bounds());
        }
        b
    }

    pub fn diagonal(&self) -> S {
        self.diagonal
    }

    pub fn spawn_offset(&self) -> S {
        S::lit(SPAWN_OFFSET) * self.diagonal
    }

    /// Shadow mask against the scene's emitters; emissive meshes never block.
    pub fn shadow_mask(&self, p: Vec3<S>, rng: &mut Rng) -> S {
        if self.emitters.is_empty() {
            return S::one();
        }
        shadow_mask(
            p,
            &self.emitters,
            &self.bvh,
            |m| self.occluders[m],
            self.spawn_offset(),
            rng,
        )
    }
}
