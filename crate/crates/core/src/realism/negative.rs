use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{Point3, PoseOffset, SegmentId, SegmentedScene};
use crate::{Real, Result};

/// Smallest and largest displacement of a negative sample, meters.
pub const NEGATIVE_RANGE: (f64, f64) = (0.02, 0.15);

/// Random translation with a direction uniform on the sphere and a length
/// uniform in [`NEGATIVE_RANGE`].
pub fn negative_offset<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PoseOffset<T> {
    let dir = loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut *rng));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            break Point3::new(v[0] / n, v[1] / n, v[2] / n);
        }
    };
    let len = rng.random_range(NEGATIVE_RANGE.0..=NEGATIVE_RANGE.1);
    PoseOffset::translation(T::of(dir.x * len), T::of(dir.y * len), T::of(dir.z * len))
}

/// Scene with `query` displaced by a [`negative_offset`], plus the offset used.
pub fn make_negative_with_offset<T: Real, R: Rng + ?Sized>(
    scene: &SegmentedScene<T>,
    query: SegmentId,
    rng: &mut R,
) -> Result<(SegmentedScene<T>, PoseOffset<T>)> {
    scene.cloud(query)?;
    let delta = negative_offset(rng);
    Ok((scene.transform_scene(query, &delta)?, delta))
}

pub fn make_negative<T: Real, R: Rng + ?Sized>(scene: &SegmentedScene<T>, query: SegmentId, rng: &mut R) -> Result<SegmentedScene<T>> {
    make_negative_with_offset(scene, query, rng).map(|(s, _)| s)
}
