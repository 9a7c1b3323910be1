use serde::{Deserialize, Serialize};

use super::Point3;
use crate::real::wrap_angle;
use crate::Real;

/// Rigid offset applied to a query object: a translation plus a rotation
/// about the world z axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PoseOffset<T> {
    pub dx: T,
    pub dy: T,
    pub dz: T,
    /// Radians, kept in (-pi, pi].
    pub yaw: T,
}

impl<T: Real> PoseOffset<T> {
    pub fn new(dx: T, dy: T, dz: T, yaw: T) -> Self {
        Self { dx, dy, dz, yaw: wrap_angle(yaw) }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn translation(dx: T, dy: T, dz: T) -> Self {
        Self::new(dx, dy, dz, T::zero())
    }

    pub fn from_array(v: [T; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.dx, self.dy, self.dz, self.yaw]
    }

    pub fn translation_vector(&self) -> Point3<T> {
        Point3::new(self.dx, self.dy, self.dz)
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite() && self.dz.is_finite() && self.yaw.is_finite()
    }

    /// The offset that undoes `self` when applied to the moved cloud with the
    /// centroid pivot: reverse yaw about the moved centroid, negated translation.
    pub fn inverse(&self) -> Self {
        Self::new(-self.dx, -self.dy, -self.dz, -self.yaw)
    }

    /// Moves a single point: rotate by yaw about `pivot`'s vertical axis, then translate.
    pub fn transform_point(&self, p: &Point3<T>, pivot: &Point3<T>) -> Point3<T> {
        let (s, c) = self.yaw.sin_cos();
        let rx = p.x - pivot.x;
        let ry = p.y - pivot.y;
        Point3::new(
            pivot.x + c * rx - s * ry + self.dx,
            pivot.y + s * rx + c * ry + self.dy,
            p.z + self.dz,
        )
    }
}

/// Where the yaw rotation of a [`PoseOffset`] is centered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Pivot {
    /// Rotate about the vertical axis through the cloud centroid.
    #[default]
    Centroid,
    /// Rotate about the world z axis.
    Origin,
}
