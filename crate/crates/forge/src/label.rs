use placer::geometry::SegmentId;
use placer::predicates::directional::eval_directional_boxes;
use placer::predicates::{BoxedObject, DirectionalConfig, PredicateConfig, PredicateVector};
use serde::{Deserialize, Serialize};

use crate::primitive::{Primitive, Shape};
use crate::scene::GroundTruthScene;
use crate::Result;

/// Yaw difference under which two objects count as aligned.
pub const ALIGNED_TOL: f64 = std::f64::consts::PI / 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairLabel {
    pub query: SegmentId,
    pub anchor: SegmentId,
    pub predicates: PredicateVector<f64>,
    pub aligned: bool,
    /// Exact surface distance, meters.
    pub distance: f64,
}

pub fn boxed(p: &Primitive) -> BoxedObject<f64> {
    BoxedObject::new(p.center, p.aabb())
}

/// Rotational symmetry period of the footprint; `None` for cylinders.
fn symmetry(p: &Primitive) -> Option<f64> {
    match p.shape {
        Shape::Box { dx, dy, .. } if (dx - dy).abs() < 1e-12 => Some(std::f64::consts::FRAC_PI_2),
        Shape::Box { .. } => Some(std::f64::consts::PI),
        Shape::Cylinder { .. } => None,
    }
}

/// Yaw difference modulo the coarser symmetry of the two shapes.
pub fn aligned(a: &Primitive, b: &Primitive) -> bool {
    let period = match (symmetry(a), symmetry(b)) {
        (Some(x), Some(y)) => x.max(y),
        _ => return true,
    };
    let d = (a.yaw - b.yaw).rem_euclid(period);
    d.min(period - d) < ALIGNED_TOL
}

/// Ground-truth relations of `query` to `anchor` from exact geometry.
pub fn label_primitives(query: &Primitive, anchor: &Primitive, cfg: &PredicateConfig<f64>) -> PairLabel {
    let d = eval_directional_boxes(&boxed(query), &boxed(anchor), &DirectionalConfig { theta: cfg.directional.theta });
    let [l, r, f, b, a, w] = d.as_array();
    let distance = query.distance(anchor);
    let centered = query.center.distance_xy(&anchor.center) <= cfg.centered;
    let predicates = PredicateVector::from_bools([l, r, f, b, a, w, distance <= cfg.near, distance <= cfg.touching, centered]);
    PairLabel { query: query.id, anchor: anchor.id, predicates, aligned: aligned(query, anchor), distance }
}

pub fn label_predicates(scene: &GroundTruthScene, query: SegmentId, anchor: SegmentId) -> Result<PairLabel> {
    Ok(label_primitives(scene.object(query)?, scene.object(anchor)?, &PredicateConfig::ground_truth()))
}

/// Labels for every ordered pair of distinct objects.
pub fn label_all(scene: &GroundTruthScene) -> Vec<PairLabel> {
    let cfg = PredicateConfig::ground_truth();
    let mut out = Vec::new();
    for q in &scene.objects {
        for a in &scene.objects {
            if q.id != a.id {
                out.push(label_primitives(q, a, &cfg));
            }
        }
    }
    out
}
