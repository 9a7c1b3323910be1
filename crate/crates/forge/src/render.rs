use std::collections::BTreeMap;

use placer::geometry::{PointCloud, Point3, SegmentId, SegmentedScene};
use rayon::prelude::*;

use crate::primitive::slab_hit;
use crate::scene::GroundTruthScene;
use crate::Result;

/// Segment id of table, floor and obstacle points.
pub const BACKGROUND: SegmentId = SegmentId(0);
/// Half width of the rendered floor patch.
const FLOOR_HALF: f64 = 3.0;

fn table_hit(scene: &GroundTruthScene, eye: &Point3<f64>, dir: &Point3<f64>) -> Option<f64> {
    let hz = -scene.floor_z / 2.0;
    let center = Point3::new(0.0, 0.0, scene.floor_z / 2.0);
    slab_hit(&(*eye - center), dir, &Point3::new(scene.table.half_x, scene.table.half_y, hz), 1e-9)
}

fn floor_hit(scene: &GroundTruthScene, eye: &Point3<f64>, dir: &Point3<f64>) -> Option<f64> {
    if dir.z >= 0.0 {
        return None;
    }
    let t = (scene.floor_z - eye.z) / dir.z;
    let p = *eye + *dir * t;
    (t > 0.0 && p.x.abs() <= FLOOR_HALF && p.y.abs() <= FLOOR_HALF).then_some(t)
}

/// One ray per pixel center; each hit becomes a point labeled with the
/// primitive it struck. Table, floor and obstacles are background.
pub fn render_cloud(scene: &GroundTruthScene) -> Result<SegmentedScene<f64>> {
    let cam = &scene.camera;
    let eye = cam.eye();
    let rows: Vec<Vec<(SegmentId, Point3<f64>)>> = (0..cam.height)
        .into_par_iter()
        .map(|v| {
            let mut row = Vec::new();
            for u in 0..cam.width {
                let dir = cam.pixel_ray(u as f64 + 0.5, v as f64 + 0.5);
                let mut best: Option<(f64, SegmentId)> = None;
                let mut consider = |t: Option<f64>, id: SegmentId| {
                    if let Some(t) = t {
                        if best.is_none_or(|(b, _)| t < b) {
                            best = Some((t, id));
                        }
                    }
                };
                consider(table_hit(scene, &eye, &dir), BACKGROUND);
                consider(floor_hit(scene, &eye, &dir), BACKGROUND);
                for o in &scene.obstacles {
                    consider(o.ray_hit(&eye, &dir), BACKGROUND);
                }
                for o in &scene.objects {
                    consider(o.ray_hit(&eye, &dir), o.id);
                }
                if let Some((t, id)) = best {
                    row.push((id, eye + dir * t));
                }
            }
            row
        })
        .collect();
    let mut clouds: BTreeMap<SegmentId, Vec<Point3<f64>>> = BTreeMap::new();
    for (id, p) in rows.into_iter().flatten() {
        clouds.entry(id).or_default().push(p);
    }
    let clouds = clouds.into_iter().map(|(id, pts)| Ok((id, PointCloud::new(pts)?))).collect::<Result<_>>()?;
    Ok(SegmentedScene::new(clouds, BACKGROUND, cam.clone()))
}

/// Complete surface samples of every object plus the visible table top, as
/// if nothing were occluded.
pub fn full_visibility_cloud(scene: &GroundTruthScene, spacing: f64) -> Result<SegmentedScene<f64>> {
    let mut clouds = BTreeMap::new();
    let (hx, hy) = (scene.table.half_x, scene.table.half_y);
    let (nx, ny) = ((2.0 * hx / spacing).ceil() as usize, (2.0 * hy / spacing).ceil() as usize);
    let table: Vec<_> = (0..=nx)
        .flat_map(|i| (0..=ny).map(move |j| Point3::new(-hx + 2.0 * hx * i as f64 / nx as f64, -hy + 2.0 * hy * j as f64 / ny as f64, 0.0)))
        .collect();
    clouds.insert(BACKGROUND, PointCloud::new(table)?);
    for o in &scene.objects {
        clouds.insert(o.id, PointCloud::new(o.sample_surface(spacing))?);
    }
    Ok(SegmentedScene::new(clouds, BACKGROUND, scene.camera.clone()))
}
