use placer::geometry::{Aabb, Point3, SegmentId};
use serde::{Deserialize, Serialize};

use crate::polygon::{self, P2};
use crate::{ForgeError, Result};

/// Sides of the polygon standing in for a cylinder footprint in contact tests.
pub const CYLINDER_SIDES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Box { dx: f64, dy: f64, dz: f64 },
    Cylinder { radius: f64, height: f64 },
}

impl Shape {
    pub fn height(&self) -> f64 {
        match *self {
            Shape::Box { dz, .. } => dz,
            Shape::Cylinder { height, .. } => height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Box { dx, dy, dz } => [dx, dy, dz].iter().all(|v| v.is_finite() && *v > 0.0),
            Shape::Cylinder { radius, height } => [radius, height].iter().all(|v| v.is_finite() && *v > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(ForgeError::InvalidPrimitive(format!("{self:?}")))
        }
    }
}

/// An upright box or cylinder; `center` is the geometric center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub id: SegmentId,
    pub shape: Shape,
    pub center: Point3<f64>,
    pub yaw: f64,
}

/// Exact horizontal cross-section.
#[derive(Debug, Clone, PartialEq)]
pub enum Footprint {
    Polygon(Vec<P2>),
    Circle { center: P2, radius: f64 },
}

impl Footprint {
    /// Horizontal distance between two footprints; zero when they overlap.
    pub fn distance(&self, other: &Footprint) -> f64 {
        match (self, other) {
            (Footprint::Polygon(a), Footprint::Polygon(b)) => polygon::polygon_distance(a, b),
            (Footprint::Circle { center: a, radius: ra }, Footprint::Circle { center: b, radius: rb }) => {
                ((a[0] - b[0]).hypot(a[1] - b[1]) - ra - rb).max(0.0)
            }
            (Footprint::Polygon(p), Footprint::Circle { center, radius }) | (Footprint::Circle { center, radius }, Footprint::Polygon(p)) => {
                (-polygon::inside_margin(p, *center) - radius).max(0.0)
            }
        }
    }
}

impl Primitive {
    pub fn new(id: SegmentId, shape: Shape, center: Point3<f64>, yaw: f64) -> Result<Self> {
        shape.validate()?;
        if !(center.is_finite() && yaw.is_finite()) {
            return Err(ForgeError::InvalidPrimitive(format!("non-finite pose for {id}")));
        }
        Ok(Self { id, shape, center, yaw })
    }

    pub fn bottom(&self) -> f64 {
        self.center.z - self.shape.height() / 2.0
    }

    pub fn top(&self) -> f64 {
        self.center.z + self.shape.height() / 2.0
    }

    /// Same primitive with its bottom at `z`.
    pub fn resting_at(&self, z: f64) -> Self {
        Self { center: Point3::new(self.center.x, self.center.y, z + self.shape.height() / 2.0), ..*self }
    }

    fn to_world_xy(&self, x: f64, y: f64) -> P2 {
        let (s, c) = self.yaw.sin_cos();
        [self.center.x + c * x - s * y, self.center.y + s * x + c * y]
    }

    pub fn to_world(&self, p: Point3<f64>) -> Point3<f64> {
        let [x, y] = self.to_world_xy(p.x, p.y);
        Point3::new(x, y, self.center.z + p.z)
    }

    pub fn to_local(&self, p: &Point3<f64>) -> Point3<f64> {
        let (s, c) = self.yaw.sin_cos();
        let (x, y) = (p.x - self.center.x, p.y - self.center.y);
        Point3::new(c * x + s * y, -s * x + c * y, p.z - self.center.z)
    }

    pub fn footprint(&self) -> Footprint {
        match self.shape {
            Shape::Box { .. } => Footprint::Polygon(self.footprint_polygon()),
            Shape::Cylinder { radius, .. } => Footprint::Circle { center: [self.center.x, self.center.y], radius },
        }
    }

    /// Footprint as a CCW polygon; cylinders use an inscribed regular polygon.
    pub fn footprint_polygon(&self) -> Vec<P2> {
        match self.shape {
            Shape::Box { dx, dy, .. } => {
                let (hx, hy) = (dx / 2.0, dy / 2.0);
                [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)].iter().map(|&(x, y)| self.to_world_xy(x, y)).collect()
            }
            Shape::Cylinder { radius, .. } => (0..CYLINDER_SIDES)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / CYLINDER_SIDES as f64;
                    [self.center.x + radius * a.cos(), self.center.y + radius * a.sin()]
                })
                .collect(),
        }
    }

    /// Exact axis-aligned bounds.
    pub fn aabb(&self) -> Aabb<f64> {
        let hz = self.shape.height() / 2.0;
        let half = match self.shape {
            Shape::Box { dx, dy, .. } => {
                let (s, c) = self.yaw.sin_cos();
                let (hx, hy) = (dx / 2.0, dy / 2.0);
                Point3::new(c.abs() * hx + s.abs() * hy, s.abs() * hx + c.abs() * hy, hz)
            }
            Shape::Cylinder { radius, .. } => Point3::new(radius, radius, hz),
        };
        Aabb::from_center_half_extents(self.center, half)
    }

    /// Exact surface-to-surface distance (zero on contact or overlap).
    pub fn distance(&self, other: &Primitive) -> f64 {
        let dxy = self.footprint().distance(&other.footprint());
        let dz = (other.bottom() - self.top()).max(self.bottom() - other.top()).max(0.0);
        dxy.hypot(dz)
    }

    /// Signed distance from `p` to the surface, negative inside.
    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        let l = self.to_local(p);
        let hz = self.shape.height() / 2.0;
        let q: Vec<f64> = match self.shape {
            Shape::Box { dx, dy, .. } => vec![l.x.abs() - dx / 2.0, l.y.abs() - dy / 2.0, l.z.abs() - hz],
            Shape::Cylinder { radius, .. } => vec![l.x.hypot(l.y) - radius, l.z.abs() - hz],
        };
        let outside = q.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt();
        let inside = q.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)).min(0.0);
        outside + inside
    }

    /// Smallest `t > eps` with `origin + t dir` on the surface.
    pub fn ray_hit(&self, origin: &Point3<f64>, dir: &Point3<f64>) -> Option<f64> {
        const EPS: f64 = 1e-9;
        let o = self.to_local(origin);
        let (s, c) = self.yaw.sin_cos();
        let d = Point3::new(c * dir.x + s * dir.y, -s * dir.x + c * dir.y, dir.z);
        let hz = self.shape.height() / 2.0;
        match self.shape {
            Shape::Box { dx, dy, .. } => slab_hit(&o, &d, &Point3::new(dx / 2.0, dy / 2.0, hz), EPS),
            Shape::Cylinder { radius, .. } => {
                let mut best = f64::INFINITY;
                let a = d.x * d.x + d.y * d.y;
                if a > 0.0 {
                    let b = 2.0 * (o.x * d.x + o.y * d.y);
                    let cc = o.x * o.x + o.y * o.y - radius * radius;
                    let disc = b * b - 4.0 * a * cc;
                    if disc >= 0.0 {
                        let sq = disc.sqrt();
                        for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                            if t > EPS && (o.z + t * d.z).abs() <= hz {
                                best = best.min(t);
                            }
                        }
                    }
                }
                if d.z != 0.0 {
                    for zc in [-hz, hz] {
                        let t = (zc - o.z) / d.z;
                        if t > EPS && (o.x + t * d.x).hypot(o.y + t * d.y) <= radius {
                            best = best.min(t);
                        }
                    }
                }
                best.is_finite().then_some(best)
            }
        }
    }

    /// Surface samples at roughly `spacing`, including face boundaries.
    /// Samples are symmetric about the center, so their centroid is the center.
    pub fn sample_surface(&self, spacing: f64) -> Vec<Point3<f64>> {
        let steps = |len: f64| ((len / spacing).ceil() as usize).max(1);
        let lin = |h: f64, n: usize, k: usize| -h + 2.0 * h * k as f64 / n as f64;
        let mut local = Vec::new();
        match self.shape {
            Shape::Box { dx, dy, dz } => {
                let (hx, hy, hz) = (dx / 2.0, dy / 2.0, dz / 2.0);
                let (nx, ny, nz) = (steps(dx), steps(dy), steps(dz));
                for i in 0..=nx {
                    for j in 0..=ny {
                        let (x, y) = (lin(hx, nx, i), lin(hy, ny, j));
                        local.push(Point3::new(x, y, -hz));
                        local.push(Point3::new(x, y, hz));
                    }
                }
                for k in 1..nz {
                    let z = lin(hz, nz, k);
                    for i in 0..=nx {
                        let x = lin(hx, nx, i);
                        local.push(Point3::new(x, -hy, z));
                        local.push(Point3::new(x, hy, z));
                    }
                    for j in 1..ny {
                        let y = lin(hy, ny, j);
                        local.push(Point3::new(-hx, y, z));
                        local.push(Point3::new(hx, y, z));
                    }
                }
            }
            Shape::Cylinder { radius, height } => {
                let hz = height / 2.0;
                // Even ring sizes keep every ring point-symmetric.
                let ring = |r: f64| {
                    let n = (steps(std::f64::consts::TAU * r) + 1) / 2 * 2;
                    (0..n).map(move |k| {
                        let a = std::f64::consts::TAU * k as f64 / n as f64;
                        (r * a.cos(), r * a.sin())
                    })
                };
                let nr = steps(radius);
                for z in [-hz, hz] {
                    local.push(Point3::new(0.0, 0.0, z));
                    for m in 1..=nr {
                        local.extend(ring(radius * m as f64 / nr as f64).map(|(x, y)| Point3::new(x, y, z)));
                    }
                }
                let nz = steps(height);
                for k in 1..nz {
                    let z = lin(hz, nz, k);
                    local.extend(ring(radius).map(|(x, y)| Point3::new(x, y, z)));
                }
            }
        }
        local.into_iter().map(|p| self.to_world(p)).collect()
    }
}

/// Ray against an axis-aligned box centered at the origin.
pub(crate) fn slab_hit(o: &Point3<f64>, d: &Point3<f64>, half: &Point3<f64>, eps: f64) -> Option<f64> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for a in 0..3 {
        if d[a] == 0.0 {
            if o[a].abs() > half[a] {
                return None;
            }
        } else {
            let (ta, tb) = ((-half[a] - o[a]) / d[a], (half[a] - o[a]) / d[a]);
            t0 = t0.max(ta.min(tb));
            t1 = t1.min(ta.max(tb));
        }
    }
    if t0 > t1 {
        return None;
    }
    if t0 > eps {
        Some(t0)
    } else if t1 > eps {
        Some(t1)
    } else {
        None
    }
}
