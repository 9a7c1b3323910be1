//! Placement planning for a query object in a segmented point-cloud scene.
//!
//! A candidate pose offset is accepted when the moved object is physically
//! plausible ([`realism`]), satisfies the requested spatial relations to an
//! anchor object ([`predicates`]) and stays in the camera view. The
//! [`planner`] searches offsets with a constrained cross-entropy method
//! seeded by a Gaussian-mixture pose prior ([`prior`]).
//!
//! All math is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`.

mod error;
pub mod geometry;
pub mod planner;
pub mod predicates;
pub mod prior;
mod real;
pub mod realism;

pub use error::{Error, Result};
pub use real::{wrap_angle, Real};

pub type Point3 = geometry::Point3<f64>;
pub type PointCloud = geometry::PointCloud<f64>;
pub type PoseOffset = geometry::PoseOffset<f64>;
pub type Aabb = geometry::Aabb<f64>;
pub type CameraModel = geometry::CameraModel<f64>;
pub type SegmentedScene = geometry::SegmentedScene<f64>;
pub type PredicateVector = predicates::PredicateVector<f64>;
pub type GmmPrior = prior::GmmPrior<f64>;
pub type PlannerConfig = planner::PlannerConfig<f64>;
pub type PlanResult = planner::PlanResult<f64>;
pub type RealismConfig = realism::RealismConfig<f64>;
pub type RealismReport = realism::RealismReport<f64>;
pub type Heightmap = realism::Heightmap<f64>;
