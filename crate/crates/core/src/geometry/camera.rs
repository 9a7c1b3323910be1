use serde::{Deserialize, Serialize};

use super::{PointCloud, Point3};
use crate::{Error, Real, Result};

/// Fraction of a cloud that must project inside the image for it to count as visible.
pub const DEFAULT_IN_VIEW_FRACTION: f64 = 0.95;

/// Pinhole camera. The pose maps world points into the camera frame
/// (x right, y down, z along the optical axis): `p_cam = R * p_world + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraModel<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: u32,
    pub height: u32,
    rotation: [[T; 3]; 3],
    translation: [T; 3],
}

impl<T: Real> CameraModel<T> {
    pub fn new(
        fx: T,
        fy: T,
        cx: T,
        cy: T,
        width: u32,
        height: u32,
        rotation: [[T; 3]; 3],
        translation: [T; 3],
    ) -> Result<Self> {
        if !(fx > T::zero() && fy > T::zero()) {
            return Err(Error::InvalidCamera("focal lengths must be positive".into()));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidCamera("image size must be positive".into()));
        }
        let tol = T::structural_tol();
        for i in 0..3 {
            for j in 0..3 {
                let dot = (0..3).map(|k| rotation[i][k] * rotation[j][k]).fold(T::zero(), |a, b| a + b);
                let expect = if i == j { T::one() } else { T::zero() };
                if (dot - expect).abs() > tol {
                    return Err(Error::InvalidCamera("rotation is not orthonormal".into()));
                }
            }
        }
        if rotation.iter().flatten().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCamera("non-finite pose".into()));
        }
        Ok(Self { fx, fy, cx, cy, width, height, rotation, translation })
    }

    /// Builds a camera from a (w, x, y, z) quaternion, normalized here.
    #[allow(clippy::too_many_arguments)]
    pub fn from_quaternion(
        fx: T,
        fy: T,
        cx: T,
        cy: T,
        width: u32,
        height: u32,
        q: [T; 4],
        translation: [T; 3],
    ) -> Result<Self> {
        let n = q.iter().map(|v| *v * *v).fold(T::zero(), |a, b| a + b).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::InvalidCamera("degenerate quaternion".into()));
        }
        let [w, x, y, z] = q.map(|v| v / n);
        let two = T::of(2.0);
        let one = T::one();
        let r = [
            [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
            [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
            [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
        ];
        Self::new(fx, fy, cx, cy, width, height, r, translation)
    }

    /// Camera at `eye` looking at `target`, with world +z projecting upward in the image.
    #[allow(clippy::too_many_arguments)]
    pub fn look_at(
        eye: Point3<T>,
        target: Point3<T>,
        fx: T,
        fy: T,
        cx: T,
        cy: T,
        width: u32,
        height: u32,
    ) -> Result<Self> {
        let f = target - eye;
        let fnorm = f.norm();
        if !(fnorm > T::zero()) {
            return Err(Error::InvalidCamera("eye and target coincide".into()));
        }
        let f = f * (T::one() / fnorm);
        let up = Point3::new(T::zero(), T::zero(), T::one());
        let right = cross(&f, &up);
        let rn = right.norm();
        if !(rn > T::of(1e-6)) {
            return Err(Error::InvalidCamera("viewing direction parallel to world up".into()));
        }
        let right = right * (T::one() / rn);
        let down = cross(&f, &right);
        let rotation = [[right.x, right.y, right.z], [down.x, down.y, down.z], [f.x, f.y, f.z]];
        let t = mat_vec(&rotation, &eye);
        Self::new(fx, fy, cx, cy, width, height, rotation, [-t.x, -t.y, -t.z])
    }

    pub fn rotation(&self) -> &[[T; 3]; 3] {
        &self.rotation
    }

    pub fn translation(&self) -> &[T; 3] {
        &self.translation
    }

    /// Rotation as a unit (w, x, y, z) quaternion with w >= 0.
    pub fn quaternion(&self) -> [T; 4] {
        let r = &self.rotation;
        let one = T::one();
        let quarter = T::of(0.25);
        let trace = r[0][0] + r[1][1] + r[2][2];
        let q = if trace > T::zero() {
            let s = (trace + one).sqrt() * T::of(2.0);
            [quarter * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s]
        } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
            let s = (one + r[0][0] - r[1][1] - r[2][2]).sqrt() * T::of(2.0);
            [(r[2][1] - r[1][2]) / s, quarter * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s]
        } else if r[1][1] > r[2][2] {
            let s = (one + r[1][1] - r[0][0] - r[2][2]).sqrt() * T::of(2.0);
            [(r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, quarter * s, (r[1][2] + r[2][1]) / s]
        } else {
            let s = (one + r[2][2] - r[0][0] - r[1][1]).sqrt() * T::of(2.0);
            [(r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, quarter * s]
        };
        if q[0] < T::zero() {
            q.map(|v| -v)
        } else {
            q
        }
    }

    pub fn world_to_camera(&self, p: &Point3<T>) -> Point3<T> {
        let t = &self.translation;
        mat_vec(&self.rotation, p) + Point3::new(t[0], t[1], t[2])
    }

    /// Camera center in world coordinates.
    pub fn eye(&self) -> Point3<T> {
        let t = &self.translation;
        -mat_t_vec(&self.rotation, &Point3::new(t[0], t[1], t[2]))
    }

    /// Pixel coordinates of `p`, or `None` when it is not in front of the camera.
    pub fn project(&self, p: &Point3<T>) -> Option<(T, T)> {
        let c = self.world_to_camera(p);
        if c.z <= T::zero() {
            return None;
        }
        Some((self.fx * c.x / c.z + self.cx, self.fy * c.y / c.z + self.cy))
    }

    pub fn in_image(&self, u: T, v: T) -> bool {
        u >= T::zero() && v >= T::zero() && u < T::of(self.width as f64) && v < T::of(self.height as f64)
    }

    /// World-frame unit direction of the ray through pixel coordinates (u, v).
    pub fn pixel_ray(&self, u: T, v: T) -> Point3<T> {
        let d = Point3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, T::one());
        let w = mat_t_vec(&self.rotation, &d);
        w * (T::one() / w.norm())
    }
}

/// True when at least `min_fraction` of the points project inside the image
/// with positive depth. An empty cloud is never in view.
pub fn in_view<T: Real>(cloud: &PointCloud<T>, camera: &CameraModel<T>, min_fraction: T) -> bool {
    if cloud.is_empty() {
        return false;
    }
    let inside = cloud
        .points()
        .iter()
        .filter(|p| camera.project(p).is_some_and(|(u, v)| camera.in_image(u, v)))
        .count();
    T::of(inside as f64) >= min_fraction * T::of(cloud.len() as f64)
}

pub(crate) fn cross<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    Point3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)
}

fn mat_vec<T: Real>(m: &[[T; 3]; 3], p: &Point3<T>) -> Point3<T> {
    Point3::new(
        m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
        m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
        m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
    )
}

fn mat_t_vec<T: Real>(m: &[[T; 3]; 3], p: &Point3<T>) -> Point3<T> {
    Point3::new(
        m[0][0] * p.x + m[1][0] * p.y + m[2][0] * p.z,
        m[0][1] * p.x + m[1][1] * p.y + m[2][1] * p.z,
        m[0][2] * p.x + m[1][2] * p.y + m[2][2] * p.z,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const I3: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    fn identity_camera() -> CameraModel<f64> {
        CameraModel::new(280.0, 280.0, 160.0, 120.0, 320, 240, I3, [0.0; 3]).unwrap()
    }

    fn single(p: Point3<f64>) -> PointCloud<f64> {
        PointCloud::new(vec![p]).unwrap()
    }

    #[test]
    fn optical_axis_projects_to_principal_point() {
        let cam = identity_camera();
        assert_eq!(cam.project(&Point3::new(0.0, 0.0, 1.0)), Some((160.0, 120.0)));
        assert!(in_view(&single(Point3::new(0.0, 0.0, 1.0)), &cam, 0.95));
    }

    #[test]
    fn behind_camera_is_not_in_view() {
        let cam = identity_camera();
        assert_eq!(cam.project(&Point3::new(0.0, 0.0, -1.0)), None);
        assert!(!in_view(&single(Point3::new(0.0, 0.0, -1.0)), &cam, 0.95));
    }

    #[test]
    fn beyond_right_border_is_not_in_view() {
        // u = fx * X / Z + cx = width + 10  =>  X = (330 - 160) / 280 at Z = 1.
        let cam = identity_camera();
        let x = (330.0 - 160.0) / 280.0;
        let (u, _) = cam.project(&Point3::new(x, 0.0, 1.0)).unwrap();
        assert!((u - 330.0).abs() < 1e-9);
        assert!(!in_view(&single(Point3::new(x, 0.0, 1.0)), &cam, 0.95));
    }

    #[test]
    fn fraction_threshold() {
        let cam = identity_camera();
        let mut pts = vec![Point3::new(0.0, 0.0, 1.0); 19];
        pts.push(Point3::new(0.0, 0.0, -1.0));
        let c = PointCloud::new(pts).unwrap();
        assert!(in_view(&c, &cam, 0.95));
        assert!(!in_view(&c, &cam, 0.96));
        assert!(!in_view(&PointCloud::default(), &cam, 0.5));
    }

    #[test]
    fn rejects_bad_intrinsics_and_rotation() {
        assert!(CameraModel::new(0.0, 1.0, 0.0, 0.0, 10, 10, I3, [0.0; 3]).is_err());
        assert!(CameraModel::new(1.0, 1.0, 0.0, 0.0, 0, 10, I3, [0.0; 3]).is_err());
        let mut r = I3;
        r[0][0] = 1.0 + 1e-6;
        assert!(CameraModel::new(1.0, 1.0, 0.0, 0.0, 10, 10, r, [0.0; 3]).is_err());
    }

    #[test]
    fn look_at_round_trips_quaternion() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cam = CameraModel::look_at(
            Point3::new(0.0, -s, s),
            Point3::origin(),
            280.0,
            280.0,
            160.0,
            120.0,
            320,
            240,
        )
        .unwrap();
        let (u, v) = cam.project(&Point3::origin()).unwrap();
        assert!((u - 160.0).abs() < 1e-9 && (v - 120.0).abs() < 1e-9);
        // Upward in the world is upward in the image.
        let (_, v_up) = cam.project(&Point3::new(0.0, 0.0, 0.1)).unwrap();
        assert!(v_up < v);
        let eye = cam.eye();
        assert!((eye.y + s).abs() < 1e-12 && (eye.z - s).abs() < 1e-12);

        let q = cam.quaternion();
        let t = *cam.translation();
        let back = CameraModel::from_quaternion(280.0, 280.0, 160.0, 120.0, 320, 240, q, t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.rotation()[i][j] - cam.rotation()[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pixel_ray_hits_projected_point() {
        let cam = CameraModel::look_at(
            Point3::new(0.3, -0.8, 0.6),
            Point3::new(0.0, 0.1, 0.0),
            280.0,
            280.0,
            160.0,
            120.0,
            320,
            240,
        )
        .unwrap();
        let p = Point3::new(0.05, 0.02, 0.07);
        let (u, v) = cam.project(&p).unwrap();
        let d = cam.pixel_ray(u, v);
        let to_p = p - cam.eye();
        let along = to_p * (1.0 / to_p.norm());
        assert!((along - d).norm() < 1e-12);
    }
}
