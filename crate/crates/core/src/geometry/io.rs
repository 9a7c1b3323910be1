//! Plain-text point-cloud scene format.
//!
//! ```text
//! # comment
//! camera fx fy cx cy width height qw qx qy qz tx ty tz
//! background 0
//! x y z segment_id
//! ```
//!
//! The camera line is required. The background line is optional and
//! defaults to segment 0. Floats are written in shortest round-trip form, so
//! writing and re-reading reproduces every coordinate exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{CameraModel, PointCloud, Point3, SegmentId, SegmentedScene};
use crate::{Error, Real, Result};

fn parse_num<V: FromStr>(tok: &str, line: usize) -> Result<V> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad number {tok:?}") })
}

fn parse_real<T: Real>(tok: &str, line: usize) -> Result<T> {
    let v: f64 = parse_num(tok, line)?;
    if !v.is_finite() {
        return Err(Error::Parse { line, msg: format!("non-finite value {tok:?}") });
    }
    Ok(T::of(v))
}

/// Parses a `camera ...` header line (tokens after the keyword).
pub fn parse_camera<T: Real>(tokens: &[&str], line: usize) -> Result<CameraModel<T>> {
    if tokens.len() != 13 {
        return Err(Error::Parse { line, msg: format!("camera needs 13 values, got {}", tokens.len()) });
    }
    let r = |i: usize| parse_real::<T>(tokens[i], line);
    let width: u32 = parse_num(tokens[4], line)?;
    let height: u32 = parse_num(tokens[5], line)?;
    CameraModel::from_quaternion(
        r(0)?,
        r(1)?,
        r(2)?,
        r(3)?,
        width,
        height,
        [r(6)?, r(7)?, r(8)?, r(9)?],
        [r(10)?, r(11)?, r(12)?],
    )
    .map_err(|e| Error::Parse { line, msg: e.to_string() })
}

/// Formats the `camera ...` header line (without trailing newline).
pub fn format_camera<T: Real>(camera: &CameraModel<T>) -> String {
    let q = camera.quaternion();
    let t = camera.translation();
    format!(
        "camera {} {} {} {} {} {} {} {} {} {} {} {} {}",
        camera.fx, camera.fy, camera.cx, camera.cy, camera.width, camera.height, q[0], q[1], q[2], q[3], t[0], t[1], t[2]
    )
}

pub fn parse_scene<T: Real>(text: &str) -> Result<SegmentedScene<T>> {
    let mut camera = None;
    let mut background = SegmentId(0);
    let mut clouds: BTreeMap<SegmentId, Vec<Point3<T>>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "camera" => camera = Some(parse_camera(&tokens[1..], line)?),
            "background" => {
                if tokens.len() != 2 {
                    return Err(Error::Parse { line, msg: "background takes one id".into() });
                }
                background = SegmentId(parse_num(tokens[1], line)?);
            }
            _ => {
                if tokens.len() != 4 {
                    return Err(Error::Parse { line, msg: format!("expected \"x y z segment_id\", got {content:?}") });
                }
                let p = Point3::new(parse_real(tokens[0], line)?, parse_real(tokens[1], line)?, parse_real(tokens[2], line)?);
                let id = SegmentId(parse_num(tokens[3], line)?);
                clouds.entry(id).or_default().push(p);
            }
        }
    }
    let camera = camera.ok_or(Error::Parse { line: 0, msg: "missing camera line".into() })?;
    let clouds = clouds.into_iter().map(|(id, pts)| Ok((id, PointCloud::new(pts)?))).collect::<Result<_>>()?;
    Ok(SegmentedScene::new(clouds, background, camera))
}

pub fn format_scene<T: Real>(scene: &SegmentedScene<T>) -> String {
    let mut out = String::new();
    out.push_str(&format_camera(scene.camera()));
    out.push('\n');
    let _ = writeln!(out, "background {}", scene.background());
    for (id, p) in scene.points() {
        let _ = writeln!(out, "{} {} {} {}", p.x, p.y, p.z, id);
    }
    out
}
