use serde::{Deserialize, Serialize};

use super::{GmmPrior, POSE_DIMS};
use crate::geometry::{PointCloud, Point3, SegmentedScene};
use crate::predicates::{BoxedObject, Predicate, PredicateConfig, PredicateGoal};
use crate::{Real, Result};

/// Parameters of the geometric stand-in for a learned pose prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicPriorConfig<T> {
    /// Gap left between the query and anchor boxes, meters.
    pub clearance: T,
    /// Component standard deviations (dx, dy, dz, yaw).
    pub sigma: [T; POSE_DIMS],
    pub max_components: usize,
    /// When false the prior is 3-DoF (no yaw).
    pub rotation: bool,
    /// Thresholds used to size the gap for near/touching goals.
    pub predicates: PredicateConfig<T>,
}

impl<T: Real> Default for HeuristicPriorConfig<T> {
    fn default() -> Self {
        Self {
            clearance: T::of(0.02),
            sigma: [T::of(0.05), T::of(0.05), T::of(0.02), T::PI() / T::of(8.0)],
            max_components: 5,
            rotation: true,
            predicates: PredicateConfig::for_clouds(),
        }
    }
}

/// Centroid-relative half extents of the query box: (toward min, toward max) per axis.
struct QueryShape<T> {
    center: Point3<T>,
    below: Point3<T>,
    above: Point3<T>,
}

impl<T: Real> QueryShape<T> {
    fn new(q: &BoxedObject<T>) -> Self {
        Self { center: q.center, below: q.center - q.bounds.min, above: q.bounds.max - q.center }
    }
}

/// Highest support point under the query footprint centered at (x, y).
fn support_height<T: Real>(support: &SegmentedScene<T>, shape: &QueryShape<T>, x: T, y: T) -> Option<T> {
    let (x0, x1) = (x - shape.below.x, x + shape.above.x);
    let (y0, y1) = (y - shape.below.y, y + shape.above.y);
    support
        .points()
        .filter(|(_, p)| p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1)
        .map(|(_, p)| p.z)
        .fold(None, |m: Option<T>, z| Some(m.map_or(z, |m| m.max(z))))
}

/// Axis and sign of a horizontal directional predicate (query relative to anchor).
fn horizontal_axis(p: Predicate) -> Option<(usize, bool)> {
    match p {
        Predicate::LeftOf => Some((0, false)),
        Predicate::RightOf => Some((0, true)),
        Predicate::InFrontOf => Some((1, false)),
        Predicate::Behind => Some((1, true)),
        _ => None,
    }
}

/// Centroid coordinate along `axis` that puts the query box `gap` beyond
/// the anchor box on the given side.
fn beside<T: Real>(anchor: &BoxedObject<T>, shape: &QueryShape<T>, axis: usize, positive: bool, gap: T) -> T {
    if positive {
        anchor.bounds.max[axis] + gap + shape.below[axis]
    } else {
        anchor.bounds.min[axis] - gap - shape.above[axis]
    }
}

enum Height<T> {
    /// Rest the query on whatever lies under its footprint.
    Supported,
    Fixed(T),
}

/// Builds a goal-conditioned mixture whose component means move the query
/// centroid to plausible goal-satisfying positions next to the anchor.
///
/// `support` is the scene without the query's own points; it is used to
/// set each component's height so the query's lowest point rests on the
/// highest surface under its footprint.
pub fn build_heuristic_prior<T: Real>(
    query: &PointCloud<T>,
    anchor: &PointCloud<T>,
    support: &SegmentedScene<T>,
    goal: &PredicateGoal,
    cfg: &HeuristicPriorConfig<T>,
) -> Result<GmmPrior<T>> {
    // Goals built through the public constructors are already checked; this
    // covers `PredicateGoal::single` and deserialized goals.
    let goal = PredicateGoal::new(goal.required().iter().copied())?;
    let q = BoxedObject::from_cloud(query)?;
    let a = BoxedObject::from_cloud(anchor)?;
    let shape = QueryShape::new(&q);

    let gap = if goal.contains(Predicate::Touching) {
        cfg.predicates.touching * T::of(0.5)
    } else if goal.contains(Predicate::Near) {
        cfg.clearance.min(cfg.predicates.near * T::of(0.5))
    } else {
        cfg.clearance
    };

    let mut targets: Vec<(T, T, Height<T>)> = Vec::new();
    let has_directional = goal.directional().next().is_some();
    if has_directional {
        let (mut x, mut y) = (a.center.x, a.center.y);
        for (axis, positive) in goal.directional().filter_map(horizontal_axis) {
            let c = beside(&a, &shape, axis, positive, gap);
            if axis == 0 {
                x = c;
            } else {
                y = c;
            }
        }
        let height = if goal.contains(Predicate::Below) {
            Height::Fixed(beside(&a, &shape, 2, false, gap))
        } else {
            Height::Supported
        };
        targets.push((x, y, height));
    } else if goal.contains(Predicate::Centered) {
        targets.push((a.center.x, a.center.y, Height::Supported));
    } else {
        for (axis, positive) in [(0, false), (0, true), (1, false), (1, true)] {
            let c = beside(&a, &shape, axis, positive, gap);
            let (x, y) = if axis == 0 { (c, a.center.y) } else { (a.center.x, c) };
            targets.push((x, y, Height::Supported));
        }
    }
    targets.truncate(cfg.max_components.max(1));

    let parts = targets.into_iter().map(|(x, y, height)| {
        let z = match height {
            Height::Fixed(z) => z,
            Height::Supported => {
                let floor = support_height(support, &shape, x, y).unwrap_or(a.bounds.min.z);
                let floor = if goal.contains(Predicate::Above) { floor.max(a.bounds.max.z) } else { floor };
                floor + shape.below.z
            }
        };
        ([x - shape.center.x, y - shape.center.y, z - shape.center.z, T::zero()], cfg.sigma)
    });
    Ok(GmmPrior::uniform(parts)?.with_rotation(cfg.rotation))
}
