use serde::{Deserialize, Serialize};

use super::Point3;
use crate::Real;

/// Axis-aligned bounding box in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: Point3<T>,
    pub max: Point3<T>,
}

impl<T: Real> Aabb<T> {
    /// Builds a box from two arbitrary opposite corners.
    pub fn from_corners(a: Point3<T>, b: Point3<T>) -> Self {
        Self { min: a.component_min(&b), max: a.component_max(&b) }
    }

    pub fn from_center_half_extents(center: Point3<T>, half: Point3<T>) -> Self {
        Self::from_corners(center - half, center + half)
    }

    /// Smallest box containing `points`; `None` for an empty iterator.
    pub fn enclosing<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Point3<T>>,
    {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), p| (lo.component_min(p), hi.component_max(p)));
        Some(Self { min, max })
    }

    pub fn center(&self) -> Point3<T> {
        (self.min + self.max) * T::of(0.5)
    }

    pub fn extent(&self) -> Point3<T> {
        self.max - self.min
    }

    pub fn half_extent(&self) -> Point3<T> {
        self.extent() * T::of(0.5)
    }

    pub fn translated(&self, t: Point3<T>) -> Self {
        Self { min: self.min + t, max: self.max + t }
    }

    pub fn contains(&self, p: &Point3<T>) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { min: self.min.component_min(&other.min), max: self.max.component_max(&other.max) }
    }

    /// The eight corners, ordered by the bit pattern (x, y, z) of max-selection.
    pub fn corners(&self) -> [Point3<T>; 8] {
        let pick = |bit: usize, axis: usize| if bit & (1 << axis) != 0 { self.max[axis] } else { self.min[axis] };
        std::array::from_fn(|i| Point3::new(pick(i, 0), pick(i, 1), pick(i, 2)))
    }
}
