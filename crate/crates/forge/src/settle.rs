//! Quasi-static settling: drop to the highest support under the footprint,
//! keep the pose if the center of mass lies over the contact patch, and
//! otherwise tip off the nearest patch edge and settle again.

use placer::geometry::{Point3, PoseOffset, SegmentId};
use serde::{Deserialize, Serialize};

use crate::polygon::{self, P2};
use crate::primitive::Primitive;
use crate::scene::GroundTruthScene;
use crate::Result;

/// Support surfaces within this height of the highest one share the contact patch.
pub const CONTACT_TOL: f64 = 1e-6;
/// A placement is stable when its center moves less than this, meters.
pub const STABLE_DISPLACEMENT: f64 = 0.05;

const AREA_EPS: f64 = 1e-12;
const ABOVE_TOL: f64 = 1e-7;
const SLIDE_STEP: f64 = 0.005;
const MAX_SLIDE: f64 = 3.0;
const MAX_TOPPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Pose before settling.
    pub placed: Primitive,
    pub settled: Primitive,
    /// Distance moved by the center, meters.
    pub displacement: f64,
    /// False when the object tipped off its first support.
    pub supported: bool,
}

impl StabilityReport {
    pub fn stable(&self) -> bool {
        self.displacement < STABLE_DISPLACEMENT
    }
}

/// A fixed vertical prism something can rest on.
#[derive(Debug, Clone)]
pub struct Solid {
    pub polygon: Vec<P2>,
    pub bottom: f64,
    pub top: f64,
}

/// Everything except object `skip`: the table slab, other objects and obstacles.
pub fn solids(scene: &GroundTruthScene, skip: Option<SegmentId>) -> Vec<Solid> {
    let mut v = vec![Solid { polygon: scene.table.polygon(), bottom: scene.floor_z, top: 0.0 }];
    for p in scene.objects.iter().filter(|p| Some(p.id) != skip).chain(&scene.obstacles) {
        v.push(Solid { polygon: p.footprint_polygon(), bottom: p.bottom(), top: p.top() });
    }
    v
}

struct Rest {
    z: f64,
    /// Footprint pieces in contact with the support; empty when resting on the floor.
    contact: Vec<P2>,
    supports: Vec<usize>,
}

fn overlap(a: &[P2], b: &[P2]) -> Vec<P2> {
    let c = polygon::clip(a, b);
    if c.len() >= 3 && polygon::area(&c) > AREA_EPS {
        c
    } else {
        Vec::new()
    }
}

/// Highest support under the footprint. Solids entirely above the object are
/// ignored; when resting lifts the object, solids that its new extent now
/// reaches are taken into account too.
fn rest(obj: &Primitive, solids: &[Solid], floor_z: f64) -> Rest {
    let mut top = obj.top();
    loop {
        let r = rest_below(obj, solids, floor_z, top);
        let lifted = r.z + obj.shape.height();
        if lifted <= top + ABOVE_TOL {
            return r;
        }
        top = lifted;
    }
}

fn rest_below(obj: &Primitive, solids: &[Solid], floor_z: f64, top: f64) -> Rest {
    let fp = obj.footprint_polygon();
    let pieces: Vec<(usize, Vec<P2>)> = solids
        .iter()
        .enumerate()
        .filter(|(_, s)| s.bottom < top - ABOVE_TOL)
        .map(|(i, s)| (i, overlap(&fp, &s.polygon)))
        .filter(|(_, c)| !c.is_empty())
        .collect();
    let Some(z) = pieces.iter().map(|(i, _)| solids[*i].top).reduce(f64::max) else {
        return Rest { z: floor_z, contact: Vec::new(), supports: Vec::new() };
    };
    let mut contact = Vec::new();
    let mut supports = Vec::new();
    for (i, c) in pieces {
        if solids[i].top >= z - CONTACT_TOL {
            contact.extend(c);
            supports.push(i);
        }
    }
    Rest { z, contact, supports }
}

fn clears(obj: &Primitive, solids: &[Solid], supports: &[usize]) -> bool {
    let fp = obj.footprint_polygon();
    supports.iter().all(|&i| overlap(&fp, &solids[i].polygon).is_empty())
}

/// Settles `obj` among fixed `solids`. Returns the rest pose and whether the
/// first support held it.
pub fn settle_among(obj: &Primitive, solids: &[Solid], floor_z: f64) -> (Primitive, bool) {
    let mut cur = *obj;
    let mut supported = true;
    for _ in 0..MAX_TOPPLES {
        let r = rest(&cur, solids, floor_z);
        cur = cur.resting_at(r.z);
        if r.contact.is_empty() {
            return (cur, supported);
        }
        let hull = polygon::convex_hull(&r.contact);
        let com = [cur.center.x, cur.center.y];
        if hull.len() >= 3 && polygon::inside_margin(&hull, com) >= 0.0 {
            return (cur, supported);
        }
        supported = false;
        // Tip outward across the nearest edge of the contact patch.
        let q = polygon::closest_boundary_point(&hull, com);
        let (mut nx, mut ny) = (com[0] - q[0], com[1] - q[1]);
        let len = nx.hypot(ny);
        if len > 0.0 {
            nx /= len;
            ny /= len;
        } else {
            (nx, ny) = (1.0, 0.0);
        }
        let start = cur;
        let mut s = 0.0;
        while s < MAX_SLIDE {
            s += SLIDE_STEP;
            cur.center = Point3::new(start.center.x + s * nx, start.center.y + s * ny, start.center.z);
            if clears(&cur, solids, &r.supports) {
                break;
            }
        }
    }
    (nearest_stable_rest(&cur, solids, floor_z), false)
}

/// Wedged between supports: the closest position on rings of growing radius
/// where the object rests with its center of mass over the contact patch.
fn nearest_stable_rest(obj: &Primitive, solids: &[Solid], floor_z: f64) -> Primitive {
    const DIRECTIONS: usize = 16;
    let mut radius = 0.0;
    while radius <= MAX_SLIDE {
        for k in 0..DIRECTIONS {
            let a = std::f64::consts::TAU * k as f64 / DIRECTIONS as f64;
            let mut cand = *obj;
            cand.center = Point3::new(obj.center.x + radius * a.cos(), obj.center.y + radius * a.sin(), obj.center.z);
            let r = rest(&cand, solids, floor_z);
            let cand = cand.resting_at(r.z);
            if r.contact.is_empty() {
                return cand;
            }
            let hull = polygon::convex_hull(&r.contact);
            if hull.len() >= 3 && polygon::inside_margin(&hull, [cand.center.x, cand.center.y]) >= 0.0 {
                return cand;
            }
            if radius == 0.0 {
                break;
            }
        }
        radius += SLIDE_STEP;
    }
    obj.resting_at(floor_z)
}

/// Settles object `id` against the rest of the scene.
pub fn settle(scene: &GroundTruthScene, id: SegmentId) -> Result<StabilityReport> {
    let obj = *scene.object(id)?;
    let (settled, supported) = settle_among(&obj, &solids(scene, Some(id)), scene.floor_z);
    Ok(StabilityReport { placed: obj, settled, displacement: settled.center.distance(&obj.center), supported })
}

/// Object `p` moved by `delta`: yaw about `pivot` (default: its own center), then translate.
pub fn apply_delta(p: &Primitive, delta: &PoseOffset<f64>, pivot: Option<Point3<f64>>) -> Primitive {
    let pivot = pivot.unwrap_or(p.center);
    Primitive { center: delta.transform_point(&p.center, &pivot), yaw: placer::wrap_angle(p.yaw + delta.yaw), ..*p }
}

/// Applies `delta` to object `id`, then settles it. Displacement is measured from the placed pose.
pub fn evaluate_placement(scene: &GroundTruthScene, id: SegmentId, delta: &PoseOffset<f64>, pivot: Option<Point3<f64>>) -> Result<StabilityReport> {
    let placed = apply_delta(scene.object(id)?, delta, pivot);
    settle(&scene.with_object(placed)?, id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitive::Shape;
    use crate::scene::{CameraSpec, Table};

    fn scene(objects: Vec<Primitive>) -> GroundTruthScene {
        GroundTruthScene { table: Table { half_x: 0.6, half_y: 0.4 }, floor_z: -0.75, objects, obstacles: vec![], camera: CameraSpec::default().build().unwrap() }
    }

    fn cube(id: u32, x: f64, y: f64, bottom: f64, s: f64) -> Primitive {
        Primitive::new(SegmentId(id), Shape::Box { dx: s, dy: s, dz: s }, Point3::new(x, y, bottom + s / 2.0), 0.0).unwrap()
    }

    #[test]
    fn resting_cube_stays() {
        let r = settle(&scene(vec![cube(1, 0.0, 0.0, 0.0, 0.1)]), SegmentId(1)).unwrap();
        assert!(r.supported);
        assert_eq!(r.displacement, 0.0);
    }

    #[test]
    fn hovering_cube_drops() {
        let r = settle(&scene(vec![cube(1, 0.0, 0.0, 0.1, 0.1)]), SegmentId(1)).unwrap();
        assert!(r.supported);
        assert!((r.displacement - 0.1).abs() < 1e-12);
    }

    #[test]
    fn overhanging_cube_falls() {
        // 0.1 m cube, center 1 cm beyond the table edge: 60% overhang.
        let r = settle(&scene(vec![cube(1, 0.61, 0.0, 0.0, 0.1)]), SegmentId(1)).unwrap();
        assert!(!r.supported);
        assert!(!r.stable());
        assert!(r.settled.bottom() < 0.0);
    }

    #[test]
    fn stacks_and_penetration() {
        let base = cube(1, 0.0, 0.0, 0.0, 0.1);
        let r = settle(&scene(vec![base, cube(2, 0.02, 0.0, 0.3, 0.06)]), SegmentId(2)).unwrap();
        assert!(r.supported);
        assert!((r.settled.bottom() - 0.1).abs() < 1e-12);
        // Sunk halfway into the base: pops up onto it.
        let r = settle(&scene(vec![base, cube(2, 0.0, 0.0, 0.05, 0.06)]), SegmentId(2)).unwrap();
        assert!((r.settled.bottom() - 0.1).abs() < 1e-12);
        // Mostly off a small base: tips onto the table.
        let r = settle(&scene(vec![base, cube(2, 0.07, 0.0, 0.1, 0.06)]), SegmentId(2)).unwrap();
        assert!(!r.supported);
        assert!(r.settled.bottom().abs() < 1e-12);
    }

    #[test]
    fn placement_offsets() {
        let s = scene(vec![cube(1, 0.0, 0.0, 0.0, 0.1)]);
        assert_eq!(evaluate_placement(&s, SegmentId(1), &PoseOffset::translation(0.1, 0.0, 0.0), None).unwrap().displacement, 0.0);
        let r = evaluate_placement(&s, SegmentId(1), &PoseOffset::translation(0.0, 0.0, 0.04), None).unwrap();
        assert!((r.displacement - 0.04).abs() < 1e-12 && r.stable());
        let r = evaluate_placement(&s, SegmentId(1), &PoseOffset::translation(0.63, 0.0, 0.0), None).unwrap();
        assert!(!r.supported && !r.stable());
    }

    #[test]
    fn resettle_is_idempotent() {
        let s = scene(vec![cube(1, 0.0, 0.0, 0.0, 0.1), cube(2, 0.07, 0.0, 0.1, 0.06)]);
        let first = settle(&s, SegmentId(2)).unwrap();
        let again = settle(&s.with_object(first.settled).unwrap(), SegmentId(2)).unwrap();
        assert!(again.displacement < 1e-9 && again.supported);
    }
}
