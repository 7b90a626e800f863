use super::scene::Scene;
use super::state::PathState;
use crate::math::{Ray, Spectrum};
use crate::num::Real;
use crate::rng::{Purpose, Rng};
use crate::surface::Intersection;
use crate::volume::march_segment;

/// Identifies one camera sample; keys every random stream of its path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathKey {
    pub seed: u64,
    pub pixel: u64,
    pub sample: u64,
}

/// Radiance arriving along `ray`.
pub fn trace_path<S: Real>(scene: &Scene<S>, ray: Ray<S>, key: PathKey) -> Spectrum<S> {
    trace_path_observed(scene, ray, key, |_| {}).l
}

/// Same as [`trace_path`], reporting the state after every march and every
/// BSDF update to `observe`. Returns the final state.
pub fn trace_path_observed<S: Real>(
    scene: &Scene<S>,
    ray: Ray<S>,
    key: PathKey,
    observe: impl FnMut(&PathState<S>),
) -> PathState<S> {
    trace(scene, ray, key, observe, |hit, t_spec| {
        let le = scene.meshes[hit.mesh_id].eval_emission(hit);
        if le.is_black() {
            None
        } else {
            Some(t_spec * le)
        }
    })
}

/// Walks the same paths as [`trace_path`] but reports, for every surface
/// hit, the throughput that emission at that face would be weighted with.
/// Surface emission stored on the meshes is ignored.
pub fn trace_emission_weights<S: Real>(
    scene: &Scene<S>,
    ray: Ray<S>,
    key: PathKey,
    mut visit: impl FnMut(&Intersection<S>, Spectrum<S>),
) {
    trace(
        scene,
        ray,
        key,
        |_| {},
        |hit, t_spec| {
            if hit.front_face {
                visit(hit, t_spec);
            }
            None
        },
    );
}

fn trace<S: Real>(
    scene: &Scene<S>,
    mut ray: Ray<S>,
    key: PathKey,
    mut observe: impl FnMut(&PathState<S>),
    mut emitted: impl FnMut(&Intersection<S>, Spectrum<S>) -> Option<Spectrum<S>>,
) -> PathState<S> {
    let settings = &scene.settings;
    let offset = scene.spawn_offset();
    let mut st = PathState::new();
    loop {
        let hit = scene.bvh().intersect(&ray);
        let t_end = hit.map_or(S::infinity(), |h| h.t_hit);
        let bounce = st.bounce as u64;
        let mut shadow_rng =
            Rng::for_path(key.seed, key.pixel, key.sample, bounce, Purpose::Shadow);
        let march = march_segment(
            &scene.fields[..],
            &ray,
            ray.t_min,
            t_end,
            settings.march_step,
            &mut st,
            |p| scene.shadow_mask(p, &mut shadow_rng),
            Some(settings.threshold),
        );
        observe(&st);
        if march.terminated_early {
            break;
        }
        let Some(hit) = hit else { break };
        if let Some(le) = emitted(&hit, st.t_spec) {
            st.l += le;
        }
        st.bounce += 1;
        if st.bounce >= settings.n_bounces {
            break;
        }
        let mut rng = Rng::for_path(key.seed, key.pixel, key.sample, bounce, Purpose::Bsdf);
        let bs = scene.meshes[hit.mesh_id]
            .bsdf
            .sample(&hit, -ray.dir, &mut rng);
        st.t_spec *= bs.weight;
        observe(&st);
        if st.t_spec.max_channel() < settings.threshold {
            break;
        }
        ray = Ray::new(hit.point + bs.dir_in.get() * offset, bs.dir_in);
    }
    assert!(!st.l.has_nan(), "NaN radiance on path {key:?}");
    st
}
