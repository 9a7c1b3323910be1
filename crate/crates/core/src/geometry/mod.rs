//! Point clouds, rigid offsets, bounding boxes, camera projection and the
//! scene transform operator.

mod aabb;
mod camera;
mod cloud;
mod grid;
pub mod io;
mod point;
mod pose;
mod scene;

pub use aabb::Aabb;
pub use camera::{in_view, CameraModel, DEFAULT_IN_VIEW_FRACTION};
pub use cloud::{min_distance, PointCloud};
pub use grid::PointGrid;
pub use point::Point3;
pub use pose::{Pivot, PoseOffset};
pub use scene::{SegmentId, SegmentedScene};

