use serde::{Deserialize, Serialize};

use super::config::{PlannerConfig, PlannerMode};
use crate::geometry::{in_view, PointCloud, Point3, PoseOffset, SegmentId, SegmentedScene};
use crate::predicates::{PredicateGoal, PredicateVector, PreparedAnchor};
use crate::prior::GmmPrior;
use crate::realism::PreparedRealism;
use crate::{Error, Real, Result};

/// Outcome of the three constraint checks for one offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub realistic: bool,
    pub goal_ok: bool,
    pub in_view: bool,
}

impl ConstraintCheck {
    pub fn all(&self) -> bool {
        self.realistic && self.goal_ok && self.in_view
    }
}

/// First failed check when screening a candidate, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    NotInView,
    GoalFailed,
    Unrealistic,
}

/// Full evaluation of one offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation<T> {
    pub delta: PoseOffset<T>,
    pub checks: ConstraintCheck,
    /// Absent when the configuration never needs the realism score.
    pub realism: Option<T>,
    pub predicates: PredicateVector<T>,
    pub cost: T,
}

/// `lambda_f |1 - f| + lambda_rho |p - goal|` with the predicate residual
/// taken over the goal's indices only.
pub fn cost_from_parts<T: Real>(f: T, predicates: &PredicateVector<T>, goal: &PredicateGoal, lambda_f: T, lambda_rho: T) -> T {
    lambda_f * (T::one() - f).abs() + lambda_rho * predicate_residual(predicates, goal)
}

pub fn predicate_residual<T: Real>(predicates: &PredicateVector<T>, goal: &PredicateGoal) -> T {
    goal.required().iter().map(|p| (predicates.get(*p) - T::one()).powi(2)).sum::<T>().sqrt()
}

/// Everything about one planning problem that does not depend on the
/// candidate offset: the query cloud and its pivot, the prepared anchor,
/// and the realism heightmap of the scene without the query.
#[derive(Debug, Clone)]
pub struct PlanningContext<T> {
    query: PointCloud<T>,
    pivot: Point3<T>,
    anchor: PreparedAnchor<T>,
    realism: Option<PreparedRealism<T>>,
    goal: PredicateGoal,
    scene: SegmentedScene<T>,
    cfg: PlannerConfig<T>,
}

impl<T: Real> PlanningContext<T> {
    pub fn new(scene: &SegmentedScene<T>, query: SegmentId, anchor: SegmentId, goal: &PredicateGoal, cfg: &PlannerConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let goal = PredicateGoal::new(goal.required().iter().copied())?;
        if query == anchor {
            return Err(Error::InvalidConfig("query and anchor must differ".into()));
        }
        let q = scene.cloud(query)?.clone();
        let a = scene.cloud(anchor)?;
        let prepared_anchor = PreparedAnchor::new(a, cfg.predicates)?;
        let realism = if cfg.uses_realism() { Some(PreparedRealism::new(&scene.without(query)?, cfg.realism)?) } else { None };
        Ok(Self { pivot: q.centroid()?, query: q, anchor: prepared_anchor, realism, goal, scene: scene.clone(), cfg: cfg.clone() })
    }

    pub fn query(&self) -> &PointCloud<T> {
        &self.query
    }

    pub fn goal(&self) -> &PredicateGoal {
        &self.goal
    }

    pub fn config(&self) -> &PlannerConfig<T> {
        &self.cfg
    }

    pub fn scene(&self) -> &SegmentedScene<T> {
        &self.scene
    }

    pub fn moved_query(&self, delta: &PoseOffset<T>) -> PointCloud<T> {
        self.query.apply_offset_with_pivot(delta, &self.pivot)
    }

    fn realistic(&self, f: Option<T>) -> bool {
        self.cfg.eps_f <= T::zero() || f.is_some_and(|f| f > self.cfg.eps_f)
    }

    fn goal_ok(&self, p: &PredicateVector<T>) -> bool {
        self.goal.required().iter().all(|g| p.get(*g) > self.cfg.eps_rho)
    }

    fn cost(&self, f: Option<T>, p: &PredicateVector<T>, delta: &PoseOffset<T>, prior: Option<&GmmPrior<T>>) -> T {
        let residual = self.cfg.lambda_rho * predicate_residual(p, &self.goal);
        match (self.cfg.mode, prior) {
            (PlannerMode::PriorCost, Some(prior)) => residual - prior.log_density(delta),
            _ => match f {
                Some(f) => self.cfg.lambda_f * (T::one() - f).abs() + residual,
                None => residual,
            },
        }
    }

    /// Runs every check and the cost, without short-circuiting.
    pub fn evaluate(&self, delta: &PoseOffset<T>, prior: Option<&GmmPrior<T>>) -> Result<Evaluation<T>> {
        let moved = self.moved_query(delta);
        let visible = in_view(&moved, self.scene.camera(), self.cfg.in_view_fraction);
        let predicates = self.anchor.classify(&moved)?;
        let f = match &self.realism {
            Some(r) => Some(r.score(&moved)?.score),
            None => None,
        };
        let checks = ConstraintCheck { realistic: self.realistic(f), goal_ok: self.goal_ok(&predicates), in_view: visible };
        Ok(Evaluation { delta: *delta, checks, realism: f, cost: self.cost(f, &predicates, delta, prior), predicates })
    }

    /// Checks in order in-view, goal, realism and stops at the first failure.
    /// Returns the cost of an accepted candidate.
    pub fn screen(&self, delta: &PoseOffset<T>, prior: Option<&GmmPrior<T>>) -> Result<std::result::Result<T, Rejection>> {
        let moved = self.moved_query(delta);
        if !in_view(&moved, self.scene.camera(), self.cfg.in_view_fraction) {
            return Ok(Err(Rejection::NotInView));
        }
        let predicates = self.anchor.classify(&moved)?;
        if !self.goal_ok(&predicates) {
            return Ok(Err(Rejection::GoalFailed));
        }
        let f = match &self.realism {
            Some(r) => Some(r.score(&moved)?.score),
            None => None,
        };
        if !self.realistic(f) {
            return Ok(Err(Rejection::Unrealistic));
        }
        Ok(Ok(self.cost(f, &predicates, delta, prior)))
    }
}

/// Cost of `delta` for the planning problem (full mode semantics).
pub fn cost<T: Real>(
    delta: &PoseOffset<T>,
    query: SegmentId,
    anchor: SegmentId,
    scene: &SegmentedScene<T>,
    goal: &PredicateGoal,
    cfg: &PlannerConfig<T>,
) -> Result<T> {
    Ok(PlanningContext::new(scene, query, anchor, goal, cfg)?.evaluate(delta, None)?.cost)
}

/// The realism, goal and in-view constraints for `delta`, against the scene's camera.
pub fn check_constraints<T: Real>(
    delta: &PoseOffset<T>,
    query: SegmentId,
    anchor: SegmentId,
    scene: &SegmentedScene<T>,
    goal: &PredicateGoal,
    cfg: &PlannerConfig<T>,
) -> Result<ConstraintCheck> {
    Ok(PlanningContext::new(scene, query, anchor, goal, cfg)?.evaluate(delta, None)?.checks)
}
