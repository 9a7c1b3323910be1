use serde::{Deserialize, Serialize};

use super::{Aabb, Pivot, Point3, PoseOffset};
use crate::{Error, Real, Result};

/// An ordered set of points belonging to one object or surface.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointCloud<T> {
    points: Vec<Point3<T>>,
}

impl<T: Real> PointCloud<T> {
    /// Wraps `points`, rejecting non-finite coordinates. Empty clouds are
    /// allowed here; operations that need points return [`Error::EmptyCloud`].
    pub fn new(points: Vec<Point3<T>>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: Point3<T>) -> Result<()> {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        self.points.push(p);
        Ok(())
    }

    fn non_empty(&self) -> Result<&[Point3<T>]> {
        if self.points.is_empty() {
            Err(Error::EmptyCloud)
        } else {
            Ok(&self.points)
        }
    }

    /// Arithmetic mean of the points.
    pub fn centroid(&self) -> Result<Point3<T>> {
        let pts = self.non_empty()?;
        let sum = pts.iter().fold(Point3::origin(), |acc, p| acc + *p);
        Ok(sum * (T::one() / T::of(pts.len() as f64)))
    }

    pub fn aabb(&self) -> Result<Aabb<T>> {
        Aabb::enclosing(&self.points).ok_or(Error::EmptyCloud)
    }

    /// Rotates by `delta.yaw` about the vertical axis through the centroid,
    /// then translates.
    pub fn apply_offset(&self, delta: &PoseOffset<T>) -> Result<Self> {
        self.apply_offset_about(delta, Pivot::Centroid)
    }

    pub fn apply_offset_about(&self, delta: &PoseOffset<T>, pivot: Pivot) -> Result<Self> {
        let pivot = match pivot {
            Pivot::Centroid => self.centroid()?,
            Pivot::Origin => {
                self.non_empty()?;
                Point3::origin()
            }
        };
        Ok(self.apply_offset_with_pivot(delta, &pivot))
    }

    /// Applies `delta` about an explicit pivot. Used when the centroid is
    /// already known.
    pub fn apply_offset_with_pivot(&self, delta: &PoseOffset<T>, pivot: &Point3<T>) -> Self {
        Self { points: self.points.iter().map(|p| delta.transform_point(p, pivot)).collect() }
    }

    pub fn translated(&self, t: Point3<T>) -> Self {
        Self { points: self.points.iter().map(|p| *p + t).collect() }
    }

    /// Lowest z over the cloud.
    pub fn min_z(&self) -> Result<T> {
        Ok(self.non_empty()?.iter().fold(T::infinity(), |m, p| m.min(p.z)))
    }
}

impl<T: Real> FromIterator<Point3<T>> for PointCloud<T> {
    /// Collects points without the finiteness check; callers constructing
    /// from external data should prefer [`PointCloud::new`].
    fn from_iter<I: IntoIterator<Item = Point3<T>>>(iter: I) -> Self {
        Self { points: iter.into_iter().collect() }
    }
}

/// Exact minimum pairwise Euclidean distance by exhaustive scan.
pub fn min_distance<T: Real>(a: &PointCloud<T>, b: &PointCloud<T>) -> Result<T> {
    let pa = a.non_empty()?;
    let pb = b.non_empty()?;
    let mut best = T::infinity();
    for p in pa {
        for q in pb {
            let d = p.distance_squared(q);
            if d < best {
                best = d;
            }
        }
    }
    Ok(best.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cloud(pts: &[(f64, f64, f64)]) -> PointCloud<f64> {
        PointCloud::new(pts.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect()).unwrap()
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(cloud(&[(0.0, 0.0, 0.0), (2.0, 0.0, 0.0)]).centroid().unwrap(), Point3::new(1.0, 0.0, 0.0));
        assert_eq!(cloud(&[(1.0, 1.0, 1.0)]).centroid().unwrap(), Point3::new(1.0, 1.0, 1.0));
        assert_eq!(PointCloud::<f64>::default().centroid(), Err(Error::EmptyCloud));
    }

    #[test]
    fn centroid_of_corner_grid_matches_resummation() {
        // 10x10x10 grid on the unit cube.
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    pts.push(Point3::new(i as f64 / 9.0, j as f64 / 9.0, k as f64 / 9.0));
                }
            }
        }
        let c = PointCloud::new(pts.clone()).unwrap().centroid().unwrap();
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for p in pts.iter().rev() {
            sx += p.x;
            sy += p.y;
            sz += p.z;
        }
        let n = pts.len() as f64;
        assert!((c.x - sx / n).abs() < 1e-12);
        assert!((c.y - sy / n).abs() < 1e-12);
        assert!((c.z - sz / n).abs() < 1e-12);
        assert!((c.x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn apply_offset_examples() {
        let c = cloud(&[(1.0, 2.0, 3.0), (0.5, -1.0, 0.0)]);
        assert_eq!(c.apply_offset(&PoseOffset::identity()).unwrap(), c);

        let r = cloud(&[(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)])
            .apply_offset(&PoseOffset::new(0.0, 0.0, 0.0, PI / 2.0))
            .unwrap();
        assert!((r.points()[0].x).abs() < 1e-12 && (r.points()[0].y - 1.0).abs() < 1e-12);
        assert!((r.points()[1].x).abs() < 1e-12 && (r.points()[1].y + 1.0).abs() < 1e-12);

        let t = cloud(&[(1.0, 2.0, 3.0)]).apply_offset(&PoseOffset::translation(0.1, 0.0, -0.2)).unwrap();
        assert!((t.points()[0].x - 1.1).abs() < 1e-12);
        assert_eq!(t.points()[0].y, 2.0);
        assert!((t.points()[0].z - 2.8).abs() < 1e-12);

        assert_eq!(PointCloud::<f64>::default().apply_offset(&PoseOffset::identity()), Err(Error::EmptyCloud));
    }

    #[test]
    fn origin_pivot_rotates_about_world_axis() {
        let r = cloud(&[(1.0, 0.0, 0.0)])
            .apply_offset_about(&PoseOffset::new(0.0, 0.0, 0.0, PI / 2.0), Pivot::Origin)
            .unwrap();
        assert!(r.points()[0].x.abs() < 1e-12 && (r.points()[0].y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aabb_examples() {
        let b = cloud(&[(0.0, 0.0, 0.0), (1.0, 2.0, 3.0)]).aabb().unwrap();
        assert_eq!(b.min, Point3::new(0.0, 0.0, 0.0));
        assert_eq!(b.max, Point3::new(1.0, 2.0, 3.0));
        let p = cloud(&[(0.3, -0.2, 4.0)]).aabb().unwrap();
        assert_eq!(p.min, p.max);
        assert_eq!(PointCloud::<f64>::default().aabb(), Err(Error::EmptyCloud));
    }

    #[test]
    fn rotated_box_grows_aabb() {
        // Elongated 2x0.2 rectangle rotated 30 degrees; oracle: exhaustive min/max.
        let c = cloud(&[(-1.0, -0.1, 0.0), (1.0, -0.1, 0.0), (1.0, 0.1, 0.0), (-1.0, 0.1, 0.0)]);
        let r = c.apply_offset(&PoseOffset::new(0.0, 0.0, 0.0, PI / 6.0)).unwrap();
        let b = r.aabb().unwrap();
        let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
        for p in r.points() {
            lo = (lo.0.min(p.x), lo.1.min(p.y));
            hi = (hi.0.max(p.x), hi.1.max(p.y));
        }
        assert_eq!((b.min.x, b.min.y), lo);
        assert_eq!((b.max.x, b.max.y), hi);
        let before = c.aabb().unwrap();
        let area = |b: &Aabb<f64>| b.extent().x * b.extent().y;
        assert!(area(&b) > area(&before));
    }

    #[test]
    fn min_distance_examples() {
        let a = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        assert_eq!(min_distance(&a, &a).unwrap(), 0.0);
        let d = min_distance(&cloud(&[(0.0, 0.0, 0.0)]), &cloud(&[(0.0, 0.0, 0.002)])).unwrap();
        assert!((d - 0.002).abs() < 1e-15);
        assert_eq!(min_distance(&a, &PointCloud::default()), Err(Error::EmptyCloud));
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(PointCloud::new(vec![Point3::new(f64::NAN, 0.0, 0.0)]), Err(Error::NonFinite));
    }
}
