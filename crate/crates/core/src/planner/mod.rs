//! Constrained cross-entropy search over pose offsets.
//!
//! The first iteration draws from the pose prior, later ones from a
//! diagonal Gaussian refit to the lowest-cost accepted candidates. Each
//! draw is kept only if it passes the in-view, goal and realism checks.

mod config;
mod context;
mod search;
mod surrogate;

pub use config::{GridRestriction, PlannerConfig, PlannerMode};
pub use context::{check_constraints, cost, cost_from_parts, predicate_residual, ConstraintCheck, Evaluation, PlanningContext, Rejection};
pub use search::{find_placement, find_placement_with_context, PlanDiagnostics, PlanResult, RejectionTally, StopReason};
pub use surrogate::{fit_surrogate, SurrogateDistribution};
