//! Directional relations from bounding boxes and centers.
//!
//! For "query is left of anchor" the query center must sit inside the
//! trapezoidal volume that opens away from the anchor box at angle `theta`
//! (checked in the two planes containing the direction axis), lie beyond
//! every anchor corner along the axis, and every query corner must lie
//! beyond the anchor center. Right, behind and below reuse the same rules
//! with query and anchor swapped.

use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, PointCloud, Point3};
use crate::{Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalConfig<T> {
    /// Half-angle of the trapezoid, measured from the direction axis.
    pub theta: T,
}

impl<T: Real> Default for DirectionalConfig<T> {
    fn default() -> Self {
        Self { theta: T::FRAC_PI_4() }
    }
}

/// Object summary the rules operate on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxedObject<T> {
    pub center: Point3<T>,
    pub bounds: Aabb<T>,
}

impl<T: Real> BoxedObject<T> {
    pub fn new(center: Point3<T>, bounds: Aabb<T>) -> Self {
        Self { center, bounds }
    }

    /// Centroid and bounding box of a cloud.
    pub fn from_cloud(cloud: &PointCloud<T>) -> Result<Self> {
        Ok(Self { center: cloud.centroid()?, bounds: cloud.aabb()? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Directions {
    pub left_of: bool,
    pub right_of: bool,
    pub in_front_of: bool,
    pub behind: bool,
    pub above: bool,
    pub below: bool,
}

impl Directions {
    pub fn as_array(&self) -> [bool; 6] {
        [self.left_of, self.right_of, self.in_front_of, self.behind, self.above, self.below]
    }
}

/// Base directions: (axis, sign). Left is -x, in front is toward the camera
/// (-y), above is +z.
const LEFT: (usize, i8) = (0, -1);
const FRONT: (usize, i8) = (1, -1);
const UP: (usize, i8) = (2, 1);

/// Slack of each of the six rules for "`query` lies in direction
/// (`axis`, `sign`) of `anchor`". The relation holds iff every slack is
/// strictly positive; ties resolve to false.
///
/// Order: rules 1-4 (trapezoid sides in the two planes through the axis),
/// rule 5 (query center beyond all anchor corners), rule 6 (all query
/// corners beyond the anchor center).
pub fn rule_slacks<T: Real>(query: &BoxedObject<T>, anchor: &BoxedObject<T>, axis: usize, sign: i8, theta: T) -> [T; 6] {
    let s = if sign > 0 { T::one() } else { -T::one() };
    let tan = theta.tan();
    let a = axis;
    let edge = if sign > 0 { anchor.bounds.max[a] } else { anchor.bounds.min[a] };
    let outward = s * (query.center[a] - edge);
    let query_near_face = if sign > 0 { query.bounds.min[a] } else { query.bounds.max[a] };

    let mut slacks = [T::zero(); 6];
    for (k, b) in [(a + 1) % 3, (a + 2) % 3].into_iter().enumerate() {
        let upper = anchor.bounds.max[b] + outward * tan;
        let lower = anchor.bounds.min[b] - outward * tan;
        slacks[2 * k] = upper - query.center[b];
        slacks[2 * k + 1] = query.center[b] - lower;
    }
    slacks[4] = outward;
    slacks[5] = s * (query_near_face - anchor.center[a]);
    slacks
}

fn holds<T: Real>(slacks: &[T; 6]) -> bool {
    slacks.iter().all(|v| *v > T::zero())
}

/// Distance from the decision boundary: the smallest slack when the
/// relation holds, otherwise the largest violation.
pub fn rule_margin<T: Real>(slacks: &[T; 6]) -> T {
    if holds(slacks) {
        slacks.iter().fold(T::infinity(), |m, v| m.min(*v))
    } else {
        slacks.iter().fold(T::zero(), |m, v| m.max(-*v))
    }
}

/// Slacks for all six directions, ordered as in [`Directions`].
pub fn all_slacks<T: Real>(query: &BoxedObject<T>, anchor: &BoxedObject<T>, cfg: &DirectionalConfig<T>) -> [[T; 6]; 6] {
    let t = cfg.theta;
    [
        rule_slacks(query, anchor, LEFT.0, LEFT.1, t),
        rule_slacks(anchor, query, LEFT.0, LEFT.1, t),
        rule_slacks(query, anchor, FRONT.0, FRONT.1, t),
        rule_slacks(anchor, query, FRONT.0, FRONT.1, t),
        rule_slacks(query, anchor, UP.0, UP.1, t),
        rule_slacks(anchor, query, UP.0, UP.1, t),
    ]
}

pub fn eval_directional_boxes<T: Real>(query: &BoxedObject<T>, anchor: &BoxedObject<T>, cfg: &DirectionalConfig<T>) -> Directions {
    let s = all_slacks(query, anchor, cfg);
    Directions {
        left_of: holds(&s[0]),
        right_of: holds(&s[1]),
        in_front_of: holds(&s[2]),
        behind: holds(&s[3]),
        above: holds(&s[4]),
        below: holds(&s[5]),
    }
}

/// Directional relations of `query` relative to `anchor` from their cloud
/// centroids and bounding boxes.
pub fn eval_directional<T: Real>(query: &PointCloud<T>, anchor: &PointCloud<T>, cfg: &DirectionalConfig<T>) -> Result<Directions> {
    Ok(eval_directional_boxes(&BoxedObject::from_cloud(query)?, &BoxedObject::from_cloud(anchor)?, cfg))
}
