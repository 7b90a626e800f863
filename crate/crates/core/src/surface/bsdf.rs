//! Lambertian, mirror and dielectric scattering.
//!
//! Samples return the ratio `f·|cosθ|/pdf` directly as the weight. For the
//! delta lobes (mirror, both dielectric branches) the delta distribution in
//! `f` cancels against the one in the pdf, so no pdf value is ever formed.

use thiserror::Error;

use super::bvh::Intersection;
use crate::math::{orthonormal_basis, Spectrum, UnitVec3, Vec3};
use crate::num::Real;
use crate::rng::Rng;

#[derive(Debug, Error, PartialEq)]
pub enum BsdfError {
    #[error("{0} channels must lie in [0, 1]")]
    Channel(&'static str),
    #[error("index of refraction must be positive and finite")]
    Ior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bsdf<S> {
    Lambertian { albedo: Spectrum<S> },
    Mirror { reflectance: Spectrum<S> },
    Dielectric { ior: S, tint: Spectrum<S> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdfKind {
    /// Continuous density over directions.
    Continuous,
    /// Dirac lobe; the weight already carries the cancelled ratio.
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsdfSample<S> {
    /// Direction of the next path segment.
    pub dir_in: UnitVec3<S>,
    /// `f·|cosθ|/pdf` per channel.
    pub weight: Spectrum<S>,
    pub pdf_kind: PdfKind,
}

fn unit_channels<S: Real>(c: &Spectrum<S>) -> bool {
    c.is_finite()
        && [c.r, c.g, c.b]
            .iter()
            .all(|v| *v >= S::zero() && *v <= S::one())
}

/// Schlick's approximation with normal-incidence reflectance `((1−η)/(1+η))²`.
pub fn schlick<S: Real>(cos_theta: S, ior: S) -> S {
    let r0 = ((S::one() - ior) / (S::one() + ior)).powi(2);
    r0 + (S::one() - r0) * (S::one() - cos_theta).max(S::zero()).powi(5)
}

/// Mirror `wo` about `n` (both pointing away from the surface).
pub fn reflect<S: Real>(wo: Vec3<S>, n: Vec3<S>) -> Vec3<S> {
    n * (S::lit(2.0) * wo.dot(n)) - wo
}

impl<S: Real> Bsdf<S> {
    pub fn lambertian(albedo: Spectrum<S>) -> Result<Self, BsdfError> {
        Self::Lambertian { albedo }.validated()
    }

    pub fn mirror(reflectance: Spectrum<S>) -> Result<Self, BsdfError> {
        Self::Mirror { reflectance }.validated()
    }

    pub fn dielectric(ior: S, tint: Spectrum<S>) -> Result<Self, BsdfError> {
        Self::Dielectric { ior, tint }.validated()
    }

    pub fn validated(self) -> Result<Self, BsdfError> {
        match &self {
            Self::Lambertian { albedo } if !unit_channels(albedo) => {
                Err(BsdfError::Channel("albedo"))
            }
            Self::Mirror { reflectance } if !unit_channels(reflectance) => {
                Err(BsdfError::Channel("reflectance"))
            }
            Self::Dielectric { tint, .. } if !unit_channels(tint) => {
                Err(BsdfError::Channel("tint"))
            }
            Self::Dielectric { ior, .. } if !(ior.is_finite() && *ior > S::zero()) => {
                Err(BsdfError::Ior)
            }
            _ => Ok(self),
        }
    }

    /// Samples the next direction at `isect` given the outgoing direction `wo`
    /// (pointing back along the incoming ray).
    pub fn sample(&self, isect: &Intersection<S>, wo: UnitVec3<S>, rng: &mut Rng) -> BsdfSample<S> {
        let n = isect.normal.get();
        match *self {
            Self::Lambertian { albedo } => {
                let (t, b) = orthonormal_basis(n);
                let u1: S = rng.uniform();
                let u2: S = rng.uniform();
                let r = u1.sqrt();
                let phi = S::lit(2.0) * S::PI() * u2;
                let z = (S::one() - u1).max(S::zero()).sqrt();
                let d = t * (r * phi.cos()) + b * (r * phi.sin()) + n * z;
                BsdfSample {
                    dir_in: UnitVec3::new(d).unwrap_or(isect.normal),
                    weight: albedo,
                    pdf_kind: PdfKind::Continuous,
                }
            }
            Self::Mirror { reflectance } => BsdfSample {
                dir_in: UnitVec3::new(reflect(wo.get(), n)).unwrap_or(isect.normal),
                weight: reflectance,
                pdf_kind: PdfKind::Delta,
            },
            Self::Dielectric { ior, tint } => {
                let entering = isect.front_face;
                let eta = if entering { S::one() / ior } else { ior };
                let cos_i = wo.dot(n).clamp_to(S::zero(), S::one());
                let sin2_t = eta * eta * (S::one() - cos_i * cos_i);
                let reflect_dir = || UnitVec3::new(reflect(wo.get(), n)).unwrap_or(isect.normal);
                if sin2_t >= S::one() {
                    return BsdfSample {
                        dir_in: reflect_dir(),
                        weight: tint,
                        pdf_kind: PdfKind::Delta,
                    };
                }
                let cos_t = (S::one() - sin2_t).sqrt();
                // Fresnel term evaluated on the side of the thinner medium.
                let fresnel = schlick(if entering { cos_i } else { cos_t }, ior);
                let u: S = rng.uniform();
                let dir = if u < fresnel {
                    reflect_dir()
                } else {
                    let d = -wo.get() * eta + n * (eta * cos_i - cos_t);
                    UnitVec3::new(d).unwrap_or(-isect.normal)
                };
                BsdfSample {
                    dir_in: dir,
                    weight: tint,
                    pdf_kind: PdfKind::Delta,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isect(normal: Vec3<f64>, front: bool) -> Intersection<f64> {
        Intersection {
            t_hit: 1.0,
            point: Vec3::zero(),
            normal: UnitVec3::new(normal).unwrap(),
            front_face: front,
            face_id: 0,
            mesh_id: 0,
        }
    }

    fn dir_at(deg: f64) -> UnitVec3<f64> {
        let a = deg.to_radians();
        UnitVec3::new(Vec3::new(a.sin(), 0.0, a.cos())).unwrap()
    }

    #[test]
    fn lambertian_weight_is_albedo() {
        let b = Bsdf::lambertian(Spectrum::splat(0.5)).unwrap();
        let hit = isect(Vec3::unit_z(), true);
        let mut rng = Rng::new(1);
        for _ in 0..1000 {
            let s = b.sample(&hit, dir_at(20.0), &mut rng);
            assert_eq!(s.weight, Spectrum::splat(0.5));
            assert!(s.dir_in.z >= 0.0);
            assert_eq!(s.pdf_kind, PdfKind::Continuous);
        }
    }

    #[test]
    fn mirror_reflects_at_equal_angle() {
        let refl = Spectrum::new(0.9, 0.8, 0.7);
        let b = Bsdf::mirror(refl).unwrap();
        let s = b.sample(&isect(Vec3::unit_z(), true), dir_at(30.0), &mut Rng::new(0));
        let expect = Vec3::new(
            -(30.0f64.to_radians().sin()),
            0.0,
            30.0f64.to_radians().cos(),
        );
        assert!((s.dir_in.get() - expect).length() < 1e-12);
        assert_eq!(s.weight, refl);
        assert_eq!(s.pdf_kind, PdfKind::Delta);
    }

    #[test]
    fn snell_refraction_angle() {
        let b = Bsdf::dielectric(1.5, Spectrum::splat(1.0)).unwrap();
        let hit = isect(Vec3::unit_z(), true);
        let expect = (45.0f64.to_radians().sin() / 1.5).asin();
        assert!((expect.to_degrees() - 28.126).abs() < 1e-3);
        let mut refracted = 0;
        let mut rng = Rng::new(2);
        for _ in 0..200 {
            let s = b.sample(&hit, dir_at(45.0), &mut rng);
            if s.dir_in.z < 0.0 {
                refracted += 1;
                let angle = (-s.dir_in.z).acos();
                assert!((angle - expect).abs() < 1e-4);
                // Transmitted ray continues to the opposite side in x.
                assert!(s.dir_in.x < 0.0);
            }
        }
        assert!(refracted > 150);
    }

    #[test]
    fn total_internal_reflection_when_exiting_steeply() {
        let b = Bsdf::dielectric(1.5, Spectrum::splat(1.0)).unwrap();
        assert!((1.0f64 / 1.5).asin().to_degrees() - 41.81 < 1e-2);
        let hit = isect(Vec3::unit_z(), false);
        let mut rng = Rng::new(3);
        for _ in 0..500 {
            let s = b.sample(&hit, dir_at(60.0), &mut rng);
            assert!(s.dir_in.z > 0.0);
        }
    }

    #[test]
    fn schlick_at_normal_incidence() {
        assert!((schlick(1.0f64, 1.5) - 0.04).abs() < 1e-6);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Bsdf::lambertian(Spectrum::new(1.1, 0.0, 0.0)).is_err());
        assert!(Bsdf::mirror(Spectrum::new(-0.1, 0.0, 0.0)).is_err());
        assert_eq!(
            Bsdf::dielectric(0.0, Spectrum::splat(1.0)),
            Err(BsdfError::Ior)
        );
    }

    #[test]
    fn cosine_sampling_histogram() {
        // χ² against p(θ) = 2 cosθ sinθ, i.e. P(θ < x) = sin²x.
        let b = Bsdf::lambertian(Spectrum::splat(1.0)).unwrap();
        let hit = isect(Vec3::new(0.3, -0.2, 0.9), true);
        let n = hit.normal.get();
        let bins = 20;
        let samples = 1_000_000;
        let mut counts = vec![0usize; bins];
        let mut rng = Rng::new(99);
        for _ in 0..samples {
            let s = b.sample(&hit, hit.normal, &mut rng);
            let theta = s.dir_in.dot(n).clamp(-1.0, 1.0).acos();
            let k = ((theta / std::f64::consts::FRAC_PI_2) * bins as f64) as usize;
            counts[k.min(bins - 1)] += 1;
        }
        let mut chi2 = 0.0;
        for (k, &c) in counts.iter().enumerate() {
            let lo = k as f64 / bins as f64 * std::f64::consts::FRAC_PI_2;
            let hi = (k + 1) as f64 / bins as f64 * std::f64::consts::FRAC_PI_2;
            let expect = (hi.sin().powi(2) - lo.sin().powi(2)) * samples as f64;
            chi2 += (c as f64 - expect).powi(2) / expect;
        }
        // 19 degrees of freedom: the 0.99 quantile is 36.19.
        assert!(chi2 < 36.19, "chi2 = {chi2}");
    }

    proptest::proptest! {
        #[test]
        fn weights_never_exceed_one(
            kind in 0u8..3,
            r in 0.0f64..=1.0, g in 0.0f64..=1.0, bl in 0.0f64..=1.0,
            ior in 1.0f64..3.0,
            theta in 0.0f64..89.0,
            front in proptest::bool::ANY,
            seed in 0u64..1000,
        ) {
            let c = Spectrum::new(r, g, bl);
            let bsdf = match kind {
                0 => Bsdf::lambertian(c).unwrap(),
                1 => Bsdf::mirror(c).unwrap(),
                _ => Bsdf::dielectric(ior, c).unwrap(),
            };
            let s = bsdf.sample(&isect(Vec3::unit_z(), front), dir_at(theta), &mut Rng::new(seed));
            proptest::prop_assert!(s.weight.r <= 1.0 && s.weight.g <= 1.0 && s.weight.b <= 1.0);
            proptest::prop_assert!(s.weight.is_physical());
            proptest::prop_assert!((s.dir_in.length() - 1.0).abs() < 1e-9);
        }
    }
}
