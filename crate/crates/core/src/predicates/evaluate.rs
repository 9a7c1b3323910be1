use serde::{Deserialize, Serialize};

use super::directional::{eval_directional_boxes, BoxedObject, DirectionalConfig, Directions};
use super::{Predicate, PredicateVector};
use crate::geometry::{min_distance, PointCloud, PointGrid};
use crate::{Error, Real, Result};

/// Thresholds for the rule-based classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredicateConfig<T> {
    pub directional: DirectionalConfig<T>,
    /// Max distance for `touching`, meters.
    pub touching: T,
    /// Max distance for `near`, meters.
    pub near: T,
    /// Max horizontal center distance for `centered`, meters.
    pub centered: T,
}

impl<T: Real> PredicateConfig<T> {
    /// Thresholds for sampled point clouds (touching is looser to absorb sampling gaps).
    pub fn for_clouds() -> Self {
        Self { directional: DirectionalConfig::default(), touching: T::of(0.0025), near: T::of(0.05), centered: T::of(0.001) }
    }

    /// Thresholds for exact ground-truth geometry.
    pub fn ground_truth() -> Self {
        Self { touching: T::of(0.001), ..Self::for_clouds() }
    }

    fn validate(&self) -> Result<()> {
        let t = self.directional.theta;
        if !(t > T::zero() && t < T::FRAC_PI_2()) {
            return Err(Error::InvalidConfig("theta must lie in (0, pi/2)".into()));
        }
        if !(self.touching > T::zero() && self.near > T::zero() && self.centered > T::zero()) {
            return Err(Error::InvalidConfig("predicate thresholds must be positive".into()));
        }
        Ok(())
    }
}

impl<T: Real> Default for PredicateConfig<T> {
    fn default() -> Self {
        Self::for_clouds()
    }
}

fn check_threshold<T: Real>(threshold: T) -> Result<()> {
    if threshold > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidConfig("threshold must be positive".into()))
    }
}

pub fn eval_touching<T: Real>(query: &PointCloud<T>, anchor: &PointCloud<T>, threshold: T) -> Result<bool> {
    check_threshold(threshold)?;
    Ok(min_distance(query, anchor)? <= threshold)
}

pub fn eval_near<T: Real>(query: &PointCloud<T>, anchor: &PointCloud<T>, threshold: T) -> Result<bool> {
    check_threshold(threshold)?;
    Ok(min_distance(query, anchor)? <= threshold)
}

/// Horizontal centroid distance within `threshold`.
pub fn eval_centered<T: Real>(query: &PointCloud<T>, anchor: &PointCloud<T>, threshold: T) -> Result<bool> {
    check_threshold(threshold)?;
    Ok(query.centroid()?.distance_xy(&anchor.centroid()?) <= threshold)
}

fn assemble<T: Real>(d: Directions, near: bool, touching: bool, centered: bool) -> PredicateVector<T> {
    let [l, r, f, b, a, w] = d.as_array();
    PredicateVector::from_bools([l, r, f, b, a, w, near, touching, centered])
}

/// All nine relations of `query` with respect to `anchor`.
pub fn classify<T: Real>(query: &PointCloud<T>, anchor: &PointCloud<T>, cfg: &PredicateConfig<T>) -> Result<PredicateVector<T>> {
    PreparedAnchor::new(anchor, *cfg)?.classify(query)
}

/// Anchor-side data precomputed once per planning call so that classifying
/// many candidate query poses avoids rescanning the anchor cloud.
#[derive(Debug, Clone)]
pub struct PreparedAnchor<T> {
    summary: BoxedObject<T>,
    grid: PointGrid<T>,
    cfg: PredicateConfig<T>,
}

impl<T: Real> PreparedAnchor<T> {
    pub fn new(anchor: &PointCloud<T>, cfg: PredicateConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let summary = BoxedObject::from_cloud(anchor)?;
        let bound = cfg.near.max(cfg.touching);
        let grid = PointGrid::new(anchor, PointGrid::suggested_cell(anchor, bound)?)?;
        Ok(Self { summary, grid, cfg })
    }

    pub fn summary(&self) -> &BoxedObject<T> {
        &self.summary
    }

    pub fn config(&self) -> &PredicateConfig<T> {
        &self.cfg
    }

    /// Same result as [`classify`] against the prepared anchor.
    pub fn classify(&self, query: &PointCloud<T>) -> Result<PredicateVector<T>> {
        let q = BoxedObject::from_cloud(query)?;
        let bound = self.cfg.near.max(self.cfg.touching);
        let dist = self.grid.min_distance_within(query, bound)?;
        let within = |t: T| dist.is_some_and(|d| d <= t);
        Ok(assemble(
            eval_directional_boxes(&q, &self.summary, &self.cfg.directional),
            within(self.cfg.near),
            within(self.cfg.touching),
            q.center.distance_xy(&self.summary.center) <= self.cfg.centered,
        ))
    }
}

/// Convenience: does the vector satisfy every predicate with value above `eps`?
pub fn satisfies<T: Real>(v: &PredicateVector<T>, required: &[Predicate], eps: T) -> bool {
    required.iter().all(|p| v.get(*p) > eps)
}
