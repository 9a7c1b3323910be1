//! Gaussian-mixture prior over pose offsets.

mod heuristic;

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use heuristic::{build_heuristic_prior, HeuristicPriorConfig};

use crate::geometry::PoseOffset;
use crate::real::wrap_angle;
use crate::{Error, Real, Result};

/// Number of pose dimensions: dx, dy, dz, yaw.
pub const POSE_DIMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmComponent<T> {
    pub weight: T,
    pub mean: [T; POSE_DIMS],
    /// Per-dimension standard deviation (meters, meters, meters, radians).
    pub sigma: [T; POSE_DIMS],
}

/// K-component diagonal Gaussian mixture over [`PoseOffset`].
///
/// When `rotation` is false the prior is 3-DoF: samples carry zero yaw and
/// the density ignores the yaw dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmPrior<T> {
    components: Vec<GmmComponent<T>>,
    rotation: bool,
}

impl<T: Real> GmmPrior<T> {
    pub fn new(components: Vec<GmmComponent<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidPrior("at least one component required".into()));
        }
        let mut total = T::zero();
        for c in &components {
            if !(c.weight >= T::zero()) || !c.weight.is_finite() {
                return Err(Error::InvalidPrior("weights must be finite and non-negative".into()));
            }
            if c.sigma.iter().any(|s| !(*s > T::zero()) || !s.is_finite()) {
                return Err(Error::InvalidPrior("standard deviations must be positive".into()));
            }
            if c.mean.iter().any(|m| !m.is_finite()) {
                return Err(Error::InvalidPrior("means must be finite".into()));
            }
            total = total + c.weight;
        }
        if (total - T::one()).abs() > T::structural_tol() {
            return Err(Error::InvalidPrior(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { components, rotation: true })
    }

    /// Mixture with equal weights.
    pub fn uniform(means_and_sigmas: impl IntoIterator<Item = ([T; POSE_DIMS], [T; POSE_DIMS])>) -> Result<Self> {
        let parts: Vec<_> = means_and_sigmas.into_iter().collect();
        let w = T::one() / T::of(parts.len().max(1) as f64);
        Self::new(parts.into_iter().map(|(mean, sigma)| GmmComponent { weight: w, mean, sigma }).collect())
    }

    pub fn with_rotation(mut self, rotation: bool) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn rotation(&self) -> bool {
        self.rotation
    }

    pub fn components(&self) -> &[GmmComponent<T>] {
        &self.components
    }

    fn dims(&self) -> usize {
        if self.rotation {
            POSE_DIMS
        } else {
            POSE_DIMS - 1
        }
    }

    /// Index of a component drawn with probability proportional to its weight.
    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = T::of(rng.random::<f64>());
        let mut acc = T::zero();
        for (k, c) in self.components.iter().enumerate() {
            acc = acc + c.weight;
            if u < acc {
                return k;
            }
        }
        // Rounding left u >= the running total; take the last positive-weight component.
        self.components.iter().rposition(|c| c.weight > T::zero()).unwrap_or(0)
    }

    /// Standard GMM sampling: categorical component choice, then a diagonal Gaussian draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PoseOffset<T> {
        let c = &self.components[self.sample_component(rng)];
        let mut v = [T::zero(); POSE_DIMS];
        for d in 0..self.dims() {
            let z: f64 = StandardNormal.sample(rng);
            v[d] = c.mean[d] + c.sigma[d] * T::of(z);
        }
        PoseOffset::from_array(v)
    }

    /// Log of the mixture density at `delta`. Yaw residuals are wrapped into (-pi, pi].
    pub fn log_density(&self, delta: &PoseOffset<T>) -> T {
        let x = delta.to_array();
        let dims = self.dims();
        let terms = self.components.iter().map(|c| {
            let mut lp = c.weight.ln();
            for d in 0..dims {
                let r = if d == 3 { wrap_angle(x[d] - c.mean[d]) } else { x[d] - c.mean[d] };
                lp = lp + normal_log_pdf(r, c.sigma[d]);
            }
            lp
        });
        log_sum_exp(terms)
    }

    /// Log density of the one-dimensional marginal along `dim`.
    pub fn marginal_log_density(&self, dim: usize, x: T) -> T {
        log_sum_exp(self.components.iter().map(|c| c.weight.ln() + normal_log_pdf(x - c.mean[dim], c.sigma[dim])))
    }

    /// Mixture mean of each dimension.
    pub fn mean(&self) -> [T; POSE_DIMS] {
        let mut m = [T::zero(); POSE_DIMS];
        for c in &self.components {
            for d in 0..POSE_DIMS {
                m[d] = m[d] + c.weight * c.mean[d];
            }
        }
        m
    }

    /// Text dump: a line with K, then one line per component with
    /// `alpha mu(4) sigma(4)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.components.len());
        for c in &self.components {
            let _ = write!(out, "{}", c.weight);
            for v in c.mean.iter().chain(c.sigma.iter()) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (i, first) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty prior".into() })?;
        let k: usize = first.trim().parse().map_err(|_| Error::Parse { line: i + 1, msg: "expected K".into() })?;
        let mut components = Vec::with_capacity(k);
        for (i, line) in lines {
            let vals = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map(T::of))
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|_| Error::Parse { line: i + 1, msg: "bad number".into() })?;
            if vals.len() != 1 + 2 * POSE_DIMS {
                return Err(Error::Parse { line: i + 1, msg: format!("expected 9 values, got {}", vals.len()) });
            }
            components.push(GmmComponent {
                weight: vals[0],
                mean: std::array::from_fn(|d| vals[1 + d]),
                sigma: std::array::from_fn(|d| vals[1 + POSE_DIMS + d]),
            });
        }
        if components.len() != k {
            return Err(Error::Parse { line: 1, msg: format!("header says {k} components, found {}", components.len()) });
        }
        Self::new(components)
    }
}

fn normal_log_pdf<T: Real>(r: T, sigma: T) -> T {
    let z = r / sigma;
    -(sigma.ln()) - T::of(0.5 * (2.0 * std::f64::consts::PI).ln()) - T::of(0.5) * z * z
}

fn log_sum_exp<T: Real>(terms: impl Iterator<Item = T> + Clone) -> T {
    let max = terms.clone().fold(T::neg_infinity(), |m, v| m.max(v));
    if max == T::neg_infinity() {
        return max;
    }
    max + terms.map(|v| (v - max).exp()).fold(T::zero(), |a, b| a + b).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn comp(weight: f64, mean: [f64; 4], sigma: [f64; 4]) -> GmmComponent<f64> {
        GmmComponent { weight, mean, sigma }
    }

    #[test]
    fn degenerate_variance_returns_mean() {
        let prior = GmmPrior::new(vec![comp(1.0, [0.2, 0.0, 0.0, 0.0], [1e-12; 4])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let d = prior.sample(&mut rng);
            assert!((d.dx - 0.2).abs() < 1e-6 && d.dy.abs() < 1e-6 && d.dz.abs() < 1e-6 && d.yaw.abs() < 1e-6);
        }
    }

    #[test]
    fn zero_weight_never_selected() {
        let prior = GmmPrior::new(vec![comp(1.0, [0.0; 4], [0.1; 4]), comp(0.0, [1.0; 4], [0.1; 4])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!((0..100_000).all(|_| prior.sample_component(&mut rng) == 0));
    }

    #[test]
    fn component_frequencies_match_weights() {
        let prior = GmmPrior::new(vec![comp(0.3, [-0.1, 0.0, 0.0, 0.0], [0.02; 4]), comp(0.7, [0.1, 0.0, 0.0, 0.0], [0.02; 4])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let first = (0..n).filter(|_| prior.sample_component(&mut rng) == 0).count() as f64;
        let sd = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((first - 0.3 * n as f64).abs() < 3.0 * sd);
    }

    #[test]
    fn density_at_mean_is_closed_form() {
        let sigma = [0.05, 0.05, 0.02, std::f64::consts::PI / 8.0];
        let prior = GmmPrior::new(vec![comp(1.0, [0.1, -0.2, 0.03, 0.4], sigma)]).unwrap();
        let expect: f64 = sigma.iter().map(|s| (1.0 / (s * (2.0 * std::f64::consts::PI).sqrt())).ln()).sum();
        let got = prior.log_density(&PoseOffset::new(0.1, -0.2, 0.03, 0.4));
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn density_decreases_away_from_mean() {
        let sigma = [0.05, 0.04, 0.02, 0.3];
        let mean = [0.1, 0.0, 0.0, 0.0];
        let prior = GmmPrior::new(vec![comp(1.0, mean, sigma)]).unwrap();
        let at_mean = prior.log_density(&PoseOffset::from_array(mean));
        for d in 0..4 {
            let mut x = mean;
            x[d] += 3.0 * sigma[d];
            assert!(prior.log_density(&PoseOffset::from_array(x)) <= at_mean);
        }
    }

    #[test]
    fn mixture_density_is_weighted_sum() {
        let comps = vec![
            comp(0.2, [0.0, 0.0, 0.0, 0.0], [0.05, 0.05, 0.02, 0.4]),
            comp(0.5, [0.1, 0.05, 0.01, 0.2], [0.03, 0.06, 0.01, 0.3]),
            comp(0.3, [-0.1, 0.0, 0.02, -0.1], [0.04, 0.02, 0.03, 0.2]),
        ];
        let prior = GmmPrior::new(comps.clone()).unwrap();
        let x = [0.03, 0.02, 0.012, 0.1];
        // Independent term-by-term evaluation with explicit Gaussian pdfs.
        let mut total = 0.0;
        for c in &comps {
            let mut dens = c.weight;
            for d in 0..4 {
                let z = (x[d] - c.mean[d]) / c.sigma[d];
                dens *= (-0.5 * z * z).exp() / (c.sigma[d] * (2.0 * std::f64::consts::PI).sqrt());
            }
            total += dens;
        }
        assert!((prior.log_density(&PoseOffset::from_array(x)) - total.ln()).abs() < 1e-10);
    }

    #[test]
    fn three_dof_prior_ignores_yaw() {
        let prior = GmmPrior::new(vec![comp(1.0, [0.0; 4], [0.05, 0.05, 0.02, 0.3])]).unwrap().with_rotation(false);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!((0..100).all(|_| prior.sample(&mut rng).yaw == 0.0));
        assert_eq!(
            prior.log_density(&PoseOffset::new(0.0, 0.0, 0.0, 0.0)),
            prior.log_density(&PoseOffset::new(0.0, 0.0, 0.0, 1.0))
        );
    }

    #[test]
    fn validation() {
        assert!(GmmPrior::<f64>::new(vec![]).is_err());
        assert!(GmmPrior::new(vec![comp(0.5, [0.0; 4], [0.1; 4])]).is_err());
        assert!(GmmPrior::new(vec![comp(1.0, [0.0; 4], [0.1, 0.0, 0.1, 0.1])]).is_err());
        assert!(GmmPrior::new(vec![comp(-0.5, [0.0; 4], [0.1; 4]), comp(1.5, [0.0; 4], [0.1; 4])]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let prior = GmmPrior::new(vec![comp(0.25, [0.1, 0.2, 0.3, 0.4], [0.05, 0.05, 0.02, 0.39]), comp(0.75, [-0.1, 0.0, 0.0, 0.0], [0.01; 4])]).unwrap();
        let text = prior.to_text();
        assert!(text.starts_with("2\n0.25 0.1 0.2 0.3 0.4 0.05 0.05 0.02 0.39\n"));
        assert_eq!(GmmPrior::from_text(&text).unwrap(), prior);
        assert!(GmmPrior::<f64>::from_text("2\n1 0 0 0 0 1 1 1 1\n").is_err());
    }
}
