use super::{Aabb, PointCloud, Point3};
use crate::{Error, Real, Result};

/// Uniform-grid index over a point cloud for exact nearest-distance queries.
///
/// Points are bucketed into dense cells (CSR layout). Queries only visit the
/// cells overlapping the current search ball, so the result is identical to
/// the exhaustive scan in [`super::min_distance`].
#[derive(Debug, Clone)]
pub struct PointGrid<T> {
    origin: Point3<T>,
    cell: T,
    dims: [usize; 3],
    starts: Vec<u32>,
    points: Vec<Point3<T>>,
    bounds: Aabb<T>,
}

impl<T: Real> PointGrid<T> {
    pub fn new(cloud: &PointCloud<T>, cell: T) -> Result<Self> {
        if !(cell > T::zero()) {
            return Err(Error::InvalidConfig("grid cell size must be positive".into()));
        }
        let bounds = cloud.aabb()?;
        let ext = bounds.extent();
        // At most ~1000 cells per axis.
        let cell = cell.max(ext.x.max(ext.y).max(ext.z) / T::of(1000.0));
        let dim = |e: T| (e / cell).floor().to_usize().unwrap_or(0) + 1;
        let dims = [dim(ext.x), dim(ext.y), dim(ext.z)];
        let origin = bounds.min;
        let n_cells = dims[0] * dims[1] * dims[2];

        let mut this = Self { origin, cell, dims, starts: Vec::new(), points: Vec::new(), bounds };
        let idx: Vec<usize> = cloud.points().iter().map(|p| this.flat(this.clamped_cell(p))).collect();
        let mut counts = vec![0u32; n_cells + 1];
        for &i in &idx {
            counts[i + 1] += 1;
        }
        for i in 0..n_cells {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut points = vec![Point3::origin(); cloud.len()];
        for (p, &i) in cloud.points().iter().zip(&idx) {
            points[fill[i] as usize] = *p;
            fill[i] += 1;
        }
        this.starts = counts;
        this.points = points;
        Ok(this)
    }

    pub fn bounds(&self) -> &Aabb<T> {
        &self.bounds
    }

    fn axis_cell(&self, v: T, axis: usize) -> i64 {
        ((v - self.origin[axis]) / self.cell).floor().to_i64().unwrap_or(i64::MAX)
    }

    fn clamped_cell(&self, p: &Point3<T>) -> [usize; 3] {
        std::array::from_fn(|a| self.axis_cell(p[a], a).clamp(0, self.dims[a] as i64 - 1) as usize)
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    /// Squared distance from `p` to the nearest indexed point, if within
    /// `bound_sq`. Ties are inclusive.
    fn nearest_sq_within(&self, p: &Point3<T>, bound_sq: T) -> Option<T> {
        let r = bound_sq.sqrt();
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for a in 0..3 {
            let l = self.axis_cell(p[a] - r, a);
            let h = self.axis_cell(p[a] + r, a);
            let max = self.dims[a] as i64 - 1;
            if h < 0 || l > max {
                return None;
            }
            lo[a] = l.max(0) as usize;
            hi[a] = h.min(max) as usize;
        }
        let mut best = bound_sq;
        let mut found = false;
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                let row = self.flat([lo[0], y, z]);
                let start = self.starts[row] as usize;
                let end = self.starts[row + hi[0] - lo[0] + 1] as usize;
                for q in &self.points[start..end] {
                    let d = p.distance_squared(q);
                    if d <= best {
                        best = d;
                        found = true;
                    }
                }
            }
        }
        found.then_some(best)
    }

    /// Exact minimum distance between `cloud` and the indexed points when it
    /// does not exceed `bound`; `None` otherwise.
    pub fn min_distance_within(&self, cloud: &PointCloud<T>, bound: T) -> Result<Option<T>> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let mut best = bound * bound;
        let mut found = false;
        // Closest points first: the search ball shrinks early and the scan
        // stops once no remaining point can beat the current best.
        let mut order: Vec<(T, &Point3<T>)> =
            cloud.points().iter().map(|p| (self.box_distance_sq(p), p)).filter(|(d, _)| *d <= best).collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        for (box_d, p) in order {
            if box_d > best {
                break;
            }
            if let Some(d) = self.nearest_sq_within(p, best) {
                best = d;
                found = true;
            }
        }
        Ok(found.then(|| best.sqrt()))
    }

    fn box_distance_sq(&self, p: &Point3<T>) -> T {
        let mut d = T::zero();
        for a in 0..3 {
            let e = (self.bounds.min[a] - p[a]).max(p[a] - self.bounds.max[a]).max(T::zero());
            d = d + e * e;
        }
        d
    }

    /// Cell edge for a cloud: about four times the mean surface spacing,
    /// kept within [bound / 8, bound].
    pub fn suggested_cell(cloud: &PointCloud<T>, bound: T) -> Result<T> {
        let e = cloud.aabb()?.extent();
        let area = T::of(2.0) * (e.x * e.y + e.y * e.z + e.x * e.z);
        let spacing = (area / T::of(cloud.len() as f64)).sqrt();
        Ok((T::of(4.0) * spacing).max(bound / T::of(8.0)).min(bound))
    }

    /// Exact minimum distance between `cloud` and the indexed points.
    pub fn min_distance(&self, cloud: &PointCloud<T>) -> Result<T> {
        let first = cloud.points().first().ok_or(Error::EmptyCloud)?;
        let seed = first.distance(&self.points[0]);
        Ok(self.min_distance_within(cloud, seed)?.unwrap_or(seed))
    }
}
