use serde::{Deserialize, Serialize};

use crate::geometry::{Point3, SegmentedScene};
use crate::{Error, Real, Result};

/// Max-z elevation grid over the xy plane. Empty cells hold negative infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heightmap<T> {
    /// Lower-left corner of cell (0, 0).
    pub origin: Point3<T>,
    pub resolution: T,
    nx: usize,
    ny: usize,
    cells: Vec<T>,
}

impl<T: Real> Heightmap<T> {
    /// Empty grid covering `[x0, x1] x [y0, y1]`.
    pub fn empty(x0: T, y0: T, x1: T, y1: T, resolution: T) -> Result<Self> {
        if !(resolution > T::zero()) {
            return Err(Error::InvalidConfig("heightmap resolution must be positive".into()));
        }
        let count = |lo: T, hi: T| ((hi - lo) / resolution - T::of(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
        let (nx, ny) = (count(x0, x1), count(y0, y1));
        Ok(Self { origin: Point3::new(x0, y0, T::zero()), resolution, nx, ny, cells: vec![T::neg_infinity(); nx * ny] })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn cell_of(&self, x: T, y: T) -> Option<(usize, usize)> {
        let i = ((x - self.origin.x) / self.resolution).floor().to_i64()?;
        let j = ((y - self.origin.y) / self.resolution).floor().to_i64()?;
        (i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny).then_some((i as usize, j as usize))
    }

    pub fn height(&self, i: usize, j: usize) -> T {
        self.cells[j * self.nx + i]
    }

    /// Height of the cell containing (x, y); negative infinity outside the grid.
    pub fn height_at(&self, x: T, y: T) -> T {
        self.cell_of(x, y).map_or(T::neg_infinity(), |(i, j)| self.height(i, j))
    }

    /// Raises the cell containing `p` to `p.z`.
    pub fn insert(&mut self, p: &Point3<T>) {
        if let Some((i, j)) = self.cell_of(p.x, p.y) {
            let c = &mut self.cells[j * self.nx + i];
            if p.z > *c {
                *c = p.z;
            }
        }
    }

    /// Fills empty cells that are enclosed by observations: a cell is filled
    /// when at least three of the four axis directions reach an observed
    /// cell within `max_cells`, and takes the lowest of those heights.
    /// Occlusion shadows inside a surface are closed this way while space
    /// beyond a surface edge stays empty.
    pub fn fill_occlusion_holes(&self, max_cells: usize) -> Self {
        let (nx, ny) = (self.nx, self.ny);
        let idx = |i: usize, j: usize| j * nx + i;
        // Nearest observed height in each direction, with its distance in cells.
        let mut near: [Vec<Option<(T, usize)>>; 4] = std::array::from_fn(|_| vec![None; nx * ny]);
        for j in 0..ny {
            let mut last: Option<(T, usize)> = None;
            for i in 0..nx {
                let h = self.cells[idx(i, j)];
                if h.is_finite() {
                    last = Some((h, i));
                } else {
                    near[0][idx(i, j)] = last.map(|(h, k)| (h, i - k));
                }
            }
            last = None;
            for i in (0..nx).rev() {
                let h = self.cells[idx(i, j)];
                if h.is_finite() {
                    last = Some((h, i));
                } else {
                    near[1][idx(i, j)] = last.map(|(h, k)| (h, k - i));
                }
            }
        }
        for i in 0..nx {
            let mut last: Option<(T, usize)> = None;
            for j in 0..ny {
                let h = self.cells[idx(i, j)];
                if h.is_finite() {
                    last = Some((h, j));
                } else {
                    near[2][idx(i, j)] = last.map(|(h, k)| (h, j - k));
                }
            }
            last = None;
            for j in (0..ny).rev() {
                let h = self.cells[idx(i, j)];
                if h.is_finite() {
                    last = Some((h, j));
                } else {
                    near[3][idx(i, j)] = last.map(|(h, k)| (h, k - j));
                }
            }
        }
        let mut out = self.clone();
        for (c, cell) in out.cells.iter_mut().enumerate() {
            if cell.is_finite() {
                continue;
            }
            let found: Vec<T> = near.iter().filter_map(|d| d[c]).filter(|(_, dist)| *dist <= max_cells).map(|(h, _)| h).collect();
            if found.len() >= 3 {
                *cell = found.into_iter().fold(T::infinity(), |m, h| m.min(h));
            }
        }
        out
    }
}

/// Heightmap of `scene` restricted to the sphere of `radius` around `center`.
/// The grid spans the sphere's xy square.
pub fn build_heightmap<T: Real>(scene: &SegmentedScene<T>, center: &Point3<T>, radius: T, resolution: T) -> Result<Heightmap<T>> {
    if !(resolution > T::zero() && resolution <= radius) {
        return Err(Error::InvalidConfig("resolution must lie in (0, radius]".into()));
    }
    let mut hm = Heightmap::empty(center.x - radius, center.y - radius, center.x + radius, center.y + radius, resolution)?;
    let r2 = radius * radius;
    for (_, p) in scene.points() {
        if p.distance_squared(center) <= r2 {
            hm.insert(p);
        }
    }
    Ok(hm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CameraModel, PointCloud, SegmentId};
    use std::collections::BTreeMap;

    fn camera() -> CameraModel<f64> {
        CameraModel::look_at(Point3::new(0.0, -0.7, 0.7), Point3::origin(), 280.0, 280.0, 160.0, 120.0, 320, 240).unwrap()
    }

    fn grid_points(x0: f64, x1: f64, y0: f64, y1: f64, z: f64, step: f64) -> Vec<Point3<f64>> {
        let mut v = Vec::new();
        let nx = ((x1 - x0) / step).round() as i64;
        let ny = ((y1 - y0) / step).round() as i64;
        for i in 0..=nx {
            for j in 0..=ny {
                v.push(Point3::new(x0 + i as f64 * step, y0 + j as f64 * step, z));
            }
        }
        v
    }

    fn scene(parts: Vec<(u32, Vec<Point3<f64>>)>) -> SegmentedScene<f64> {
        let clouds: BTreeMap<_, _> = parts.into_iter().map(|(id, pts)| (SegmentId(id), PointCloud::new(pts).unwrap())).collect();
        SegmentedScene::new(clouds, SegmentId(0), camera())
    }

    #[test]
    fn flat_table_is_zero_everywhere_covered() {
        let s = scene(vec![(0, grid_points(-0.3, 0.3, -0.3, 0.3, 0.0, 0.0025))]);
        let hm = build_heightmap(&s, &Point3::origin(), 0.2, 0.01).unwrap();
        let (nx, ny) = hm.dims();
        assert_eq!((nx, ny), (40, 40));
        for i in 0..nx {
            for j in 0..ny {
                let cx = hm.origin.x + (i as f64 + 0.5) * 0.01;
                let cy = hm.origin.y + (j as f64 + 0.5) * 0.01;
                if (cx * cx + cy * cy).sqrt() < 0.2 - 0.01 {
                    assert_eq!(hm.height(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn box_on_table_per_cell_max() {
        let table = grid_points(-0.3, 0.3, -0.3, 0.3, 0.0, 0.0025);
        let top = grid_points(-0.05, 0.05, -0.05, 0.05, 0.1, 0.0025);
        let s = scene(vec![(0, table.clone()), (1, top.clone())]);
        let hm = build_heightmap(&s, &Point3::origin(), 0.25, 0.01).unwrap();
        // Oracle: per-cell max over all points by direct scan.
        let (nx, ny) = hm.dims();
        let mut expect = vec![f64::NEG_INFINITY; nx * ny];
        for p in table.iter().chain(&top) {
            if p.norm_squared() > 0.25 * 0.25 {
                continue;
            }
            let i = ((p.x + 0.25) / 0.01).floor() as usize;
            let j = ((p.y + 0.25) / 0.01).floor() as usize;
            if i < nx && j < ny {
                expect[j * nx + i] = expect[j * nx + i].max(p.z);
            }
        }
        for i in 0..nx {
            for j in 0..ny {
                assert_eq!(hm.height(i, j), expect[j * nx + i]);
            }
        }
        assert_eq!(hm.height_at(0.0, 0.0), 0.1);
        assert_eq!(hm.height_at(0.15, 0.0), 0.0);
    }

    #[test]
    fn empty_scene_is_all_empty() {
        let s = scene(vec![]);
        let hm = build_heightmap(&s, &Point3::origin(), 0.5, 0.01).unwrap();
        let (nx, ny) = hm.dims();
        assert!((0..nx).all(|i| (0..ny).all(|j| hm.height(i, j) == f64::NEG_INFINITY)));
    }

    #[test]
    fn invalid_resolution() {
        let s = scene(vec![]);
        assert!(build_heightmap(&s, &Point3::origin(), 0.5, 0.0).is_err());
        assert!(build_heightmap(&s, &Point3::origin(), 0.5, 0.6).is_err());
    }

    #[test]
    fn hole_filling_closes_enclosed_gaps_only() {
        // Table with a square hole in the middle; nothing beyond the table edge.
        let pts: Vec<_> = grid_points(-0.2, 0.2, -0.2, 0.2, 0.0, 0.005)
            .into_iter()
            .filter(|p| p.x.abs() > 0.05 || p.y.abs() > 0.05)
            .collect();
        let s = scene(vec![(0, pts)]);
        let hm = build_heightmap(&s, &Point3::origin(), 0.45, 0.01).unwrap();
        assert_eq!(hm.height_at(0.0, 0.0), f64::NEG_INFINITY);
        let filled = hm.fill_occlusion_holes(45);
        assert_eq!(filled.height_at(0.0, 0.0), 0.0);
        assert_eq!(filled.height_at(0.3, 0.0), f64::NEG_INFINITY);
        assert_eq!(filled.height_at(0.3, 0.3), f64::NEG_INFINITY);
    }
}
