//! Synthetic tabletop scenes built from upright boxes and cylinders.
//!
//! [`generate_scene`] drops random primitives onto a table and settles
//! them, [`render_cloud`] ray-casts a segmented partial-view point cloud,
//! [`label_predicates`] reports exact ground-truth relations, and
//! [`evaluate_placement`] moves an object and reports how far it travels
//! while settling.

mod generate;
pub mod io;
mod label;
pub mod polygon;
mod primitive;
mod render;
mod scene;
mod settle;

pub use generate::{generate_scene, ForgeConfig};
pub use label::{aligned, boxed, label_all, label_predicates, label_primitives, PairLabel, ALIGNED_TOL};
pub use primitive::{Footprint, Primitive, Shape, CYLINDER_SIDES};
pub use render::{full_visibility_cloud, render_cloud, BACKGROUND};
pub use scene::{CameraSpec, GroundTruthScene, Table};
pub use settle::{apply_delta, evaluate_placement, settle, settle_among, solids, Solid, StabilityReport, CONTACT_TOL, STABLE_DISPLACEMENT};

use placer::geometry::SegmentId;

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error(transparent)]
    Core(#[from] placer::Error),
    #[error("unknown object {0}")]
    UnknownObject(SegmentId),
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("could not generate stable scene: {0}")]
    GenerationFailed(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, ForgeError>;
