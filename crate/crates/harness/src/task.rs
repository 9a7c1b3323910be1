use forge::GroundTruthScene;
use placer::geometry::{SegmentId, SegmentedScene};
use placer::predicates::{Predicate, PredicateGoal};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Goals drawn for planning trials.
pub const DIRECTIONAL_GOALS: [Predicate; 4] = [Predicate::InFrontOf, Predicate::Behind, Predicate::LeftOf, Predicate::RightOf];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningTask {
    pub query: SegmentId,
    pub anchor: SegmentId,
    pub goal: PredicateGoal,
}

/// Random query, anchor and directional goal among objects with at least
/// `min_points` rendered points. Only objects with nothing resting on them
/// are eligible as the query. `None` when fewer than two objects qualify.
pub fn choose_task<R: Rng + ?Sized>(gt: &GroundTruthScene, cloud: &SegmentedScene<f64>, min_points: usize, rng: &mut R) -> Option<PlanningTask> {
    let visible: Vec<SegmentId> = cloud.object_ids().filter(|id| cloud.cloud(*id).is_ok_and(|c| c.len() >= min_points)).collect();
    let free: Vec<SegmentId> = visible
        .iter()
        .copied()
        .filter(|id| {
            let p = gt.object(*id).expect("rendered ids come from the scene");
            !gt.objects.iter().any(|o| o.id != *id && (o.bottom() - p.top()).abs() < 1e-6 && o.distance(p) < 1e-6)
        })
        .collect();
    let query = *free.choose(rng)?;
    let anchors: Vec<SegmentId> = visible.into_iter().filter(|id| *id != query).collect();
    let anchor = *anchors.choose(rng)?;
    let goal = PredicateGoal::single(*DIRECTIONAL_GOALS.choose(rng)?);
    Some(PlanningTask { query, anchor, goal })
}
