//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use hybridrt::image::HdrImage;
use hybridrt::math::{Ray, Spectrum};
use hybridrt::render::{Camera, RenderSettings, Scene};
use hybridrt::rng::{Purpose, Rng};
use hybridrt::volume::RadianceGrid;

/// True when both images have the same size and identical bits.
pub fn bits_equal(a: &HdrImage<f64>, b: &HdrImage<f64>) -> bool {
    (a.width(), a.height()) == (b.width(), b.height())
        && a.pixels()
            .iter()
            .zip(b.pixels())
            .all(|(p, q)| (0..3).all(|c| p.channel(c).to_bits() == q.channel(c).to_bits()))
}

pub fn assert_bits_eq(a: &HdrImage<f64>, b: &HdrImage<f64>) {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    for (i, (p, q)) in a.pixels().iter().zip(b.pixels()).enumerate() {
        for c in 0..3 {
            assert_eq!(
                p.channel(c).to_bits(),
                q.channel(c).to_bits(),
                "pixel {i} channel {c}"
            );
        }
    }
}

/// Surface-only path tracer written against the primitive operations.
pub fn surface_reference(scene: &Scene<f64>, camera: &Camera<f64>) -> HdrImage<f64> {
    let s = scene.settings;
    let mut img = HdrImage::new(camera.width(), camera.height());
    let inv = 1.0 / s.spp as f64;
    for y in 0..camera.height() {
        for x in 0..camera.width() {
            let pixel = (y * camera.width() + x) as u64;
            let mut acc = Spectrum::black();
            for sample in 0..s.spp {
                let mut ray = camera.pixel_ray(s.seed, x, y, sample, s.spp);
                let mut t = Spectrum::splat(1.0);
                let mut l = Spectrum::black();
                let mut bounce = 0u32;
                while let Some(hit) = scene.bvh().intersect(&ray) {
                    let le = scene.meshes[hit.mesh_id].eval_emission(&hit);
                    if !le.is_black() {
                        l += t * le;
                    }
                    bounce += 1;
                    if bounce >= s.n_bounces {
                        break;
                    }
                    let mut rng = Rng::for_path(
                        s.seed,
                        pixel,
                        sample as u64,
                        (bounce - 1) as u64,
                        Purpose::Bsdf,
                    );
                    let bs = scene.meshes[hit.mesh_id]
                        .bsdf
                        .sample(&hit, -ray.dir, &mut rng);
                    t *= bs.weight;
                    if t.max_channel() < s.threshold {
                        break;
                    }
                    ray = Ray::new(
                        hit.point + bs.dir_in.get() * scene.spawn_offset(),
                        bs.dir_in,
                    );
                }
                acc += l;
            }
            img.set(x, y, acc * inv);
        }
    }
    img
}

/// Emission-absorption quadrature over the whole camera ray, no surfaces.
pub fn quadrature_reference(
    field: &RadianceGrid<f64>,
    camera: &Camera<f64>,
    s: RenderSettings<f64>,
) -> HdrImage<f64> {
    let mut img = HdrImage::new(camera.width(), camera.height());
    let inv = 1.0 / s.spp as f64;
    for y in 0..camera.height() {
        for x in 0..camera.width() {
            let mut acc = Spectrum::black();
            for sample in 0..s.spp {
                let ray = camera.pixel_ray(s.seed, x, y, sample, s.spp);
                let mut l = Spectrum::black();
                if let Some((a, b)) = field.clip(&ray, ray.t_min, f64::INFINITY) {
                    let n = ((b - a) / s.march_step - 1e-9).ceil().max(1.0) as usize;
                    let delta = (b - a) / n as f64;
                    let mut t = Spectrum::splat(1.0);
                    for i in 0..n {
                        let (sigma, r) = field.sample(ray.at(a + (i as f64 + 0.5) * delta));
                        if sigma <= 0.0 {
                            continue;
                        }
                        l += t * (r * -(-sigma * delta).exp_m1());
                        t *= (-sigma * delta).exp();
                    }
                }
                acc += l;
            }
            img.set(x, y, acc * inv);
        }
    }
    img
}
