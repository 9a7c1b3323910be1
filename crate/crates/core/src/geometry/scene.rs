use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CameraModel, Pivot, PointCloud, Point3, PoseOffset};
use crate::{Error, Real, Result};

/// Label of one segment in a [`SegmentedScene`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SegmentId(pub u32);

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Observed scene: one point cloud per segment plus the camera that saw it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedScene<T> {
    clouds: BTreeMap<SegmentId, PointCloud<T>>,
    background: SegmentId,
    camera: CameraModel<T>,
}

impl<T: Real> SegmentedScene<T> {
    /// Empty segments are dropped.
    pub fn new(clouds: BTreeMap<SegmentId, PointCloud<T>>, background: SegmentId, camera: CameraModel<T>) -> Self {
        let clouds = clouds.into_iter().filter(|(_, c)| !c.is_empty()).collect();
        Self { clouds, background, camera }
    }

    pub fn camera(&self) -> &CameraModel<T> {
        &self.camera
    }

    pub fn background(&self) -> SegmentId {
        self.background
    }

    pub fn clouds(&self) -> &BTreeMap<SegmentId, PointCloud<T>> {
        &self.clouds
    }

    pub fn ids(&self) -> impl Iterator<Item = SegmentId> + '_ {
        self.clouds.keys().copied()
    }

    /// Segment ids other than the background.
    pub fn object_ids(&self) -> impl Iterator<Item = SegmentId> + '_ {
        self.ids().filter(move |id| *id != self.background)
    }

    pub fn is_empty(&self) -> bool {
        self.clouds.is_empty()
    }

    pub fn cloud(&self, id: SegmentId) -> Result<&PointCloud<T>> {
        self.clouds.get(&id).ok_or(Error::UnknownSegment(id))
    }

    pub fn total_points(&self) -> usize {
        self.clouds.values().map(PointCloud::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = (SegmentId, &Point3<T>)> + '_ {
        self.clouds.iter().flat_map(|(id, c)| c.points().iter().map(move |p| (*id, p)))
    }

    /// Copy of the scene with segment `id` removed.
    pub fn without(&self, id: SegmentId) -> Result<Self> {
        if !self.clouds.contains_key(&id) {
            return Err(Error::UnknownSegment(id));
        }
        let mut out = self.clone();
        out.clouds.remove(&id);
        Ok(out)
    }

    /// Copy of the scene with segment `id` set to `cloud` (dropped if empty).
    pub fn with_cloud(&self, id: SegmentId, cloud: PointCloud<T>) -> Self {
        let mut out = self.clone();
        if cloud.is_empty() {
            out.clouds.remove(&id);
        } else {
            out.clouds.insert(id, cloud);
        }
        out
    }

    /// Rigidly moves the query segment by `delta`; every other segment is untouched.
    pub fn transform_scene(&self, query: SegmentId, delta: &PoseOffset<T>) -> Result<Self> {
        self.transform_scene_about(query, delta, Pivot::Centroid)
    }

    pub fn transform_scene_about(&self, query: SegmentId, delta: &PoseOffset<T>, pivot: Pivot) -> Result<Self> {
        let moved = self.cloud(query)?.apply_offset_about(delta, pivot)?;
        Ok(self.with_cloud(query, moved))
    }

    /// Keeps only points within `radius` of `center`; empty segments are dropped.
    pub fn crop_sphere(&self, center: &Point3<T>, radius: T) -> Self {
        let r2 = radius * radius;
        let clouds = self
            .clouds
            .iter()
            .map(|(id, c)| (*id, c.points().iter().filter(|p| p.distance_squared(center) <= r2).copied().collect()))
            .collect();
        Self::new(clouds, self.background, self.camera.clone())
    }
}
