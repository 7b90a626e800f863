use thiserror::Error;

use crate::math::{Ray, Transform, UnitVec3, Vec3};
use crate::num::Real;
use crate::rng::{Purpose, Rng};

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("resolution must be positive, got {0}x{1}")]
    Resolution(usize, usize),
    #[error("vertical field of view must lie in (0, 180) degrees")]
    Fov,
    #[error("camera position, target and up vector do not define a frame")]
    Frame,
}

/// Pinhole camera looking down its local −z axis with +y up.
#[derive(Clone, Debug, PartialEq)]
pub struct Camera<S> {
    pub world_from_camera: Transform<S>,
    vfov: S,
    width: usize,
    height: usize,
}

impl<S: Real> Camera<S> {
    pub fn new(
        world_from_camera: Transform<S>,
        vfov: S,
        width: usize,
        height: usize,
    ) -> Result<Self, CameraError> {
        if width == 0 || height == 0 {
            return Err(CameraError::Resolution(width, height));
        }
        if !(vfov > S::zero() && vfov < S::PI()) {
            return Err(CameraError::Fov);
        }
        Ok(Self {
            world_from_camera,
            vfov,
            width,
            height,
        })
    }

    pub fn look_at(
        position: Vec3<S>,
        target: Vec3<S>,
        up: Vec3<S>,
        vfov: S,
        width: usize,
        height: usize,
    ) -> Result<Self, CameraError> {
        let f = (target - position)
            .try_normalize()
            .ok_or(CameraError::Frame)?;
        let r = f.cross(up).try_normalize().ok_or(CameraError::Frame)?;
        let u = r.cross(f);
        let (o, z) = (S::zero(), S::one());
        let m = [
            [r.x, u.x, -f.x, position.x],
            [r.y, u.y, -f.y, position.y],
            [r.z, u.z, -f.z, position.z],
            [o, o, o, z],
        ];
        let pose = Transform::from_matrix(m).map_err(|_| CameraError::Frame)?;
        Self::new(pose, vfov, width, height)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vfov(&self) -> S {
        self.vfov
    }

    /// Ray through image-plane position `(px, py)` in pixel units, origin
    /// at the top-left corner of the image.
    pub fn ray_through(&self, px: S, py: S) -> Ray<S> {
        let w = S::from_usize_lossy(self.width);
        let h = S::from_usize_lossy(self.height);
        let tan = (self.vfov * S::lit(0.5)).tan();
        let two = S::lit(2.0);
        let x = (two * px / w - S::one()) * tan * (w / h);
        let y = (S::one() - two * py / h) * tan;
        let d = Vec3::new(x, y, -S::one());
        let origin = self.world_from_camera.transform_point(Vec3::zero(), false);
        let dir = self.world_from_camera.transform_vector(d, false);
        Ray::new(
            origin,
            UnitVec3::new(dir).expect("camera basis is non-degenerate"),
        )
    }

    /// Primary ray for `sample` of `spp` at pixel `(x, y)`: stratified over
    /// a `⌈√spp⌉`-wide grid of sub-pixel cells with jitter inside each cell.
    pub fn pixel_ray(&self, seed: u64, x: usize, y: usize, sample: u32, spp: u32) -> Ray<S> {
        let nx = (spp as f64).sqrt().ceil().max(1.0) as u32;
        let ny = spp.div_ceil(nx).max(1);
        let (cx, cy) = (sample % nx, (sample / nx) % ny);
        let pixel = (y * self.width + x) as u64;
        let mut rng = Rng::for_path(seed, pixel, sample as u64, 0, Purpose::PixelJitter);
        let jx = (S::from_usize_lossy(cx as usize) + rng.uniform::<S>())
            / S::from_usize_lossy(nx as usize);
        let jy = (S::from_usize_lossy(cy as usize) + rng.uniform::<S>())
            / S::from_usize_lossy(ny as usize);
        self.ray_through(S::from_usize_lossy(x) + jx, S::from_usize_lossy(y) + jy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_ray_follows_view_direction() {
        let cam = Camera::look_at(
            Vec3::new(1.0f64, 2.0, 3.0),
            Vec3::new(1.0, 5.0, 3.0),
            Vec3::unit_z(),
            60f64.to_radians(),
            4,
            2,
        )
        .unwrap();
        let r = cam.ray_through(2.0, 1.0);
        assert!((r.dir.get() - Vec3::unit_y()).length() < 1e-12);
        assert_eq!(r.origin, Vec3::new(1.0, 2.0, 3.0));
        // Top edge is tilted up by half the vertical field of view.
        let top = cam.ray_through(2.0, 0.0);
        assert!((top.dir.z.asin().to_degrees() - 30.0).abs() < 1e-9);
        // Left is -x when looking along +y with z up.
        assert!(cam.ray_through(0.0, 1.0).dir.x < 0.0);
    }

    #[test]
    fn jitter_stays_inside_the_pixel() {
        let cam =
            Camera::look_at(Vec3::zero(), -Vec3::unit_z(), Vec3::unit_y(), 1.0f64, 8, 8).unwrap();
        let lo = cam.ray_through(3.0, 5.0).dir;
        let hi = cam.ray_through(4.0, 6.0).dir;
        for s in 0..16 {
            let d = cam.pixel_ray(7, 3, 5, s, 16).dir;
            assert!(d.x >= lo.x && d.x <= hi.x);
            assert!(d.y <= lo.y && d.y >= hi.y);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let z = Vec3::<f64>::zero();
        assert_eq!(
            Camera::look_at(z, z, Vec3::unit_z(), 1.0, 4, 4),
            Err(CameraError::Frame)
        );
        assert_eq!(
            Camera::look_at(z, Vec3::unit_x(), Vec3::unit_z(), 1.0, 0, 4),
            Err(CameraError::Resolution(0, 4))
        );
        assert_eq!(
            Camera::look_at(z, Vec3::unit_x(), Vec3::unit_z(), 4.0, 4, 4),
            Err(CameraError::Fov)
        );
    }
}
