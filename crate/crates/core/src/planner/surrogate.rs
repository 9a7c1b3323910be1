use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geometry::PoseOffset;
use crate::prior::POSE_DIMS;
use crate::{wrap_angle, Error, Real, Result};

/// Diagonal Gaussian over pose offsets refit to each iteration's elites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateDistribution<T> {
    pub mu: [T; POSE_DIMS],
    pub sigma: [T; POSE_DIMS],
}

impl<T: Real> SurrogateDistribution<T> {
    /// Per-dimension draw; yaw stays at the mean when `rotation` is off.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, rotation: bool) -> PoseOffset<T> {
        let mut v = self.mu;
        let dims = if rotation { POSE_DIMS } else { POSE_DIMS - 1 };
        for d in 0..dims {
            let z: f64 = StandardNormal.sample(rng);
            v[d] = self.mu[d] + self.sigma[d] * T::of(z);
        }
        PoseOffset::from_array(v)
    }
}

/// Mean and population standard deviation of the elites, with each std
/// clamped to at least `floor`. Yaw uses the circular mean and wrapped
/// residuals.
pub fn fit_surrogate<T: Real>(elites: &[PoseOffset<T>], floor: &[T; POSE_DIMS]) -> Result<SurrogateDistribution<T>> {
    if elites.len() < 2 {
        return Err(Error::InsufficientElites(elites.len()));
    }
    let n = T::of(elites.len() as f64);
    let rows: Vec<[T; POSE_DIMS]> = elites.iter().map(|d| d.to_array()).collect();
    let mut mu = [T::zero(); POSE_DIMS];
    let mut sigma = [T::zero(); POSE_DIMS];
    for d in 0..POSE_DIMS {
        let residual = |x: T, m: T| if d == 3 { wrap_angle(x - m) } else { x - m };
        mu[d] = if d == 3 {
            let (s, c) = rows.iter().fold((T::zero(), T::zero()), |(s, c), r| (s + r[d].sin(), c + r[d].cos()));
            if s == T::zero() && c == T::zero() {
                T::zero()
            } else {
                s.atan2(c)
            }
        } else {
            rows.iter().map(|r| r[d]).sum::<T>() / n
        };
        let var = rows.iter().map(|r| residual(r[d], mu[d]).powi(2)).sum::<T>() / n;
        sigma[d] = var.sqrt().max(floor[d]);
    }
    Ok(SurrogateDistribution { mu, sigma })
}
