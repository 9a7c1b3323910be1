//! Text format for ground-truth scenes.
//!
//! ```text
//! camera fx fy cx cy width height qw qx qy qz tx ty tz
//! table half_x half_y
//! floor z
//! 1 box dx dy dz x y z yaw
//! 2 cylinder radius height x y z yaw
//! obstacle 1000 box dx dy dz x y z yaw
//! ```
//!
//! Object lines are `id shape dims pose` with the pose given as the center
//! and yaw. Floats use shortest round-trip formatting.

use std::fmt::Write as _;

use placer::geometry::io::{format_camera, parse_camera};
use placer::geometry::{Point3, SegmentId};

use crate::primitive::{Primitive, Shape};
use crate::scene::{GroundTruthScene, Table};
use crate::{ForgeError, Result};

fn err(line: usize, msg: impl Into<String>) -> ForgeError {
    ForgeError::Parse { line, msg: msg.into() }
}

fn num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| err(line, format!("bad number {tok:?}")))
}

fn parse_primitive(tokens: &[&str], line: usize) -> Result<Primitive> {
    let id: u32 = tokens.first().and_then(|t| t.parse().ok()).ok_or_else(|| err(line, "missing id"))?;
    let nums = |from: usize, n: usize| -> Result<Vec<f64>> {
        if tokens.len() != from + n {
            return Err(err(line, format!("expected {} fields, got {}", from + n, tokens.len())));
        }
        tokens[from..].iter().map(|t| num(t, line)).collect()
    };
    let (shape, rest) = match tokens.get(1).copied() {
        Some("box") => {
            let v = nums(2, 7)?;
            (Shape::Box { dx: v[0], dy: v[1], dz: v[2] }, v[3..].to_vec())
        }
        Some("cylinder") => {
            let v = nums(2, 6)?;
            (Shape::Cylinder { radius: v[0], height: v[1] }, v[2..].to_vec())
        }
        other => return Err(err(line, format!("unknown shape {other:?}"))),
    };
    Primitive::new(SegmentId(id), shape, Point3::new(rest[0], rest[1], rest[2]), rest[3]).map_err(|e| err(line, e.to_string()))
}

fn format_primitive(p: &Primitive) -> String {
    let c = p.center;
    match p.shape {
        Shape::Box { dx, dy, dz } => format!("{} box {} {} {} {} {} {} {}", p.id, dx, dy, dz, c.x, c.y, c.z, p.yaw),
        Shape::Cylinder { radius, height } => format!("{} cylinder {} {} {} {} {} {}", p.id, radius, height, c.x, c.y, c.z, p.yaw),
    }
}

pub fn format_ground_truth(scene: &GroundTruthScene) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", format_camera(&scene.camera));
    let _ = writeln!(s, "table {} {}", scene.table.half_x, scene.table.half_y);
    let _ = writeln!(s, "floor {}", scene.floor_z);
    for p in &scene.objects {
        let _ = writeln!(s, "{}", format_primitive(p));
    }
    for p in &scene.obstacles {
        let _ = writeln!(s, "obstacle {}", format_primitive(p));
    }
    s
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruthScene> {
    let (mut camera, mut table, mut floor) = (None, None, None);
    let (mut objects, mut obstacles) = (Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let t: Vec<&str> = content.split_whitespace().collect();
        match t[0] {
            "camera" => camera = Some(parse_camera(&t[1..], line)?),
            "table" if t.len() == 3 => table = Some(Table { half_x: num(t[1], line)?, half_y: num(t[2], line)? }),
            "floor" if t.len() == 2 => floor = Some(num(t[1], line)?),
            "obstacle" => obstacles.push(parse_primitive(&t[1..], line)?),
            _ => objects.push(parse_primitive(&t, line)?),
        }
    }
    let mut ids: Vec<u32> = objects.iter().map(|p: &Primitive| p.id.0).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) || ids.contains(&0) {
        return Err(err(0, "object ids must be unique and nonzero"));
    }
    Ok(GroundTruthScene {
        camera: camera.ok_or_else(|| err(0, "missing camera line"))?,
        table: table.ok_or_else(|| err(0, "missing table line"))?,
        floor_z: floor.ok_or_else(|| err(0, "missing floor line"))?,
        objects,
        obstacles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_scene, ForgeConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip() {
        let cfg = ForgeConfig { bins: 1, ..Default::default() };
        let s = generate_scene(&mut ChaCha8Rng::seed_from_u64(2), &cfg).unwrap();
        let text = format_ground_truth(&s);
        let back = parse_ground_truth(&text).unwrap();
        assert_eq!(back.objects, s.objects);
        assert_eq!(back.obstacles, s.obstacles);
        assert_eq!(format_ground_truth(&back), text);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_ground_truth("table 1 1\nfloor -1\n").is_err());
        let cam = format_camera(&crate::scene::CameraSpec::default().build().unwrap());
        assert!(parse_ground_truth(&format!("{cam}\ntable 1 1\nfloor -1\n1 sphere 1\n")).is_err());
        assert!(parse_ground_truth(&format!("{cam}\ntable 1 1\nfloor -1\n1 box 1 1 1 0 0 0 0\n1 box 1 1 1 0 0 0 0\n")).is_err());
        let ok = parse_ground_truth(&format!("{cam}\ntable 1 1\nfloor -1\n# note\n1 cylinder 0.1 0.2 0 0 0.1 0\n")).unwrap();
        assert_eq!(ok.objects.len(), 1);
    }
}
