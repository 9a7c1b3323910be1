use placer::geometry::{CameraModel, Point3, SegmentId};
use serde::{Deserialize, Serialize};

use crate::polygon::P2;
use crate::primitive::Primitive;
use crate::{ForgeError, Result};

/// Rectangular table top centered at the origin with its surface at z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub half_x: f64,
    pub half_y: f64,
}

impl Table {
    pub fn polygon(&self) -> Vec<P2> {
        let (x, y) = (self.half_x, self.half_y);
        vec![[-x, -y], [x, -y], [x, y], [-x, y]]
    }
}

/// Pinhole camera placed on a sphere around the table center, looking at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub width: u32,
    pub height: u32,
    pub focal: f64,
    pub distance: f64,
    /// Elevation above the table plane, radians.
    pub elevation: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self { width: 320, height: 240, focal: 280.0, distance: 1.0, elevation: std::f64::consts::FRAC_PI_4 }
    }
}

impl CameraSpec {
    /// The camera sits at negative y so that +y points away from it.
    pub fn build(&self) -> Result<CameraModel<f64>> {
        let eye = Point3::new(0.0, -self.distance * self.elevation.cos(), self.distance * self.elevation.sin());
        let (cx, cy) = (self.width as f64 / 2.0, self.height as f64 / 2.0);
        Ok(CameraModel::look_at(eye, Point3::origin(), self.focal, self.focal, cx, cy, self.width, self.height)?)
    }
}

/// Ground-truth tabletop: movable objects, fixed obstacle slabs, a table and a floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthScene {
    pub table: Table,
    pub floor_z: f64,
    pub objects: Vec<Primitive>,
    /// Fixed geometry (open-top bins). Rendered as background.
    pub obstacles: Vec<Primitive>,
    pub camera: CameraModel<f64>,
}

impl GroundTruthScene {
    pub fn object(&self, id: SegmentId) -> Result<&Primitive> {
        self.objects.iter().find(|p| p.id == id).ok_or(ForgeError::UnknownObject(id))
    }

    pub fn object_index(&self, id: SegmentId) -> Result<usize> {
        self.objects.iter().position(|p| p.id == id).ok_or(ForgeError::UnknownObject(id))
    }

    /// Copy with object `id` replaced by `p` (which keeps the id).
    pub fn with_object(&self, p: Primitive) -> Result<Self> {
        let i = self.object_index(p.id)?;
        let mut s = self.clone();
        s.objects[i] = p;
        Ok(s)
    }

    pub fn object_ids(&self) -> impl Iterator<Item = SegmentId> + '_ {
        self.objects.iter().map(|p| p.id)
    }
}
