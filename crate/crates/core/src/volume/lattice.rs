use crate::math::{Aabb, Vec3};
use crate::num::Real;

/// Regular node lattice spanning a box: node `(i, j, k)` sits at
/// `min + (i, j, k) ⊙ spacing`, with the first and last nodes on the faces.
/// Storage is x-fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice<S> {
    pub bbox: Aabb<S>,
    pub res: [usize; 3],
}

/// Base node and fractional offsets of a point inside the lattice.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Cell<S> {
    pub base: [usize; 3],
    pub frac: [S; 3],
}

impl<S: Real> Lattice<S> {
    pub fn new(bbox: Aabb<S>, res: [usize; 3]) -> Self {
        Self { bbox, res }
    }

    pub fn len(&self) -> usize {
        self.res[0] * self.res[1] * self.res[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_valid(&self) -> bool {
        self.bbox.is_valid_volume() && self.res.iter().all(|&n| n >= 2)
    }

    pub fn spacing(&self) -> Vec3<S> {
        let e = self.bbox.extent();
        Vec3::new(
            e.x / S::from_usize_lossy(self.res[0] - 1),
            e.y / S::from_usize_lossy(self.res[1] - 1),
            e.z / S::from_usize_lossy(self.res[2] - 1),
        )
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.res[0] * (j + self.res[1] * k)
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.res[0];
        let j = (idx / self.res[0]) % self.res[1];
        let k = idx / (self.res[0] * self.res[1]);
        [i, j, k]
    }

    pub fn node_position(&self, i: usize, j: usize, k: usize) -> Vec3<S> {
        let h = self.spacing();
        Vec3::new(
            self.bbox.min.x + h.x * S::from_usize_lossy(i),
            self.bbox.min.y + h.y * S::from_usize_lossy(j),
            self.bbox.min.z + h.z * S::from_usize_lossy(k),
        )
    }

    /// `None` outside the closed box.
    #[inline]
    pub(crate) fn locate(&self, p: Vec3<S>) -> Option<Cell<S>> {
        if !self.bbox.contains(p) {
            return None;
        }
        let mut base = [0usize; 3];
        let mut frac = [S::zero(); 3];
        for a in 0..3 {
            let cells = self.res[a] - 1;
            let u = (p[a] - self.bbox.min[a]) / (self.bbox.max[a] - self.bbox.min[a])
                * S::from_usize_lossy(cells);
            let i0 = u.floor().to_usize().unwrap_or(0).min(cells - 1);
            base[a] = i0;
            frac[a] = (u - S::from_usize_lossy(i0)).clamp_to(S::zero(), S::one());
        }
        Some(Cell { base, frac })
    }

    /// Trilinear blend of per-node values fetched with `at`.
    #[inline]
    pub(crate) fn trilinear<T, F>(&self, cell: &Cell<S>, at: F) -> T
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<S, Output = T>,
        F: Fn(usize) -> T,
    {
        let [i, j, k] = cell.base;
        let [fx, fy, fz] = cell.frac;
        let gx = S::one() - fx;
        let gy = S::one() - fy;
        let gz = S::one() - fz;
        let c = |di: usize, dj: usize, dk: usize| at(self.index(i + di, j + dj, k + dk));
        let x00 = c(0, 0, 0) * gx + c(1, 0, 0) * fx;
        let x10 = c(0, 1, 0) * gx + c(1, 1, 0) * fx;
        let x01 = c(0, 0, 1) * gx + c(1, 0, 1) * fx;
        let x11 = c(0, 1, 1) * gx + c(1, 1, 1) * fx;
        let y0 = x00 * gy + x10 * fy;
        let y1 = x01 * gy + x11 * fy;
        y0 * gz + y1 * fz
    }
}
