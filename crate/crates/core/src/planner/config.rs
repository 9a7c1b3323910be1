use serde::{Deserialize, Serialize};

use crate::geometry::DEFAULT_IN_VIEW_FRACTION;
use crate::predicates::PredicateConfig;
use crate::prior::{HeuristicPriorConfig, POSE_DIMS};
use crate::realism::RealismConfig;
use crate::{Error, Real, Result};

/// How candidates are proposed and ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerMode {
    /// Cross-entropy search with the realism term in the cost.
    #[default]
    Full,
    /// Evaluate only the prior's component means; no refitting.
    MeanOnly,
    /// Cross-entropy search with the prior's negative log density in place of the realism term.
    PriorCost,
}

impl std::str::FromStr for PlannerMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "mean-only" => Ok(Self::MeanOnly),
            "prior-cost" => Ok(Self::PriorCost),
            _ => Err(Error::InvalidConfig(format!("unknown planner mode {s:?}"))),
        }
    }
}

/// Restricts candidate offsets to a horizontal lattice with fixed height and yaw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRestriction<T> {
    pub step: T,
    pub dz: T,
    pub yaw: T,
}

impl<T: Real> GridRestriction<T> {
    pub fn snap(&self, dx: T, dy: T) -> [T; POSE_DIMS] {
        [(dx / self.step).round() * self.step, (dy / self.step).round() * self.step, self.dz, self.yaw]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig<T> {
    pub lambda_f: T,
    pub lambda_rho: T,
    /// Realism threshold; 0 disables the realism constraint.
    pub eps_f: T,
    pub eps_rho: T,
    /// Accepted candidates per iteration.
    pub batch: usize,
    pub iterations: usize,
    pub n_elite: usize,
    /// Wall-clock limit on rejection sampling within one iteration, seconds.
    pub time_budget_secs: f64,
    /// Deterministic limit on candidates drawn within one iteration.
    pub max_draws_per_iter: usize,
    pub seed: u64,
    pub mode: PlannerMode,
    /// Lower bounds on the surrogate standard deviations (dx, dy, dz, yaw).
    pub sigma_floor: [T; POSE_DIMS],
    /// Fraction of query points that must project into the image.
    pub in_view_fraction: T,
    pub grid: Option<GridRestriction<T>>,
    pub predicates: PredicateConfig<T>,
    pub realism: RealismConfig<T>,
    pub prior: HeuristicPriorConfig<T>,
}

impl<T: Real> Default for PlannerConfig<T> {
    fn default() -> Self {
        Self {
            lambda_f: T::of(100.0),
            lambda_rho: T::one(),
            eps_f: T::of(0.5),
            eps_rho: T::of(0.5),
            batch: 100,
            iterations: 5,
            n_elite: 10,
            time_budget_secs: 2.0,
            max_draws_per_iter: 2000,
            seed: 0,
            mode: PlannerMode::Full,
            sigma_floor: [T::of(0.005), T::of(0.005), T::of(0.005), T::of(0.02)],
            in_view_fraction: T::of(DEFAULT_IN_VIEW_FRACTION),
            grid: None,
            predicates: PredicateConfig::for_clouds(),
            realism: RealismConfig::default(),
            prior: HeuristicPriorConfig::default(),
        }
    }
}

impl<T: Real> PlannerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.batch >= self.n_elite && self.n_elite >= 2) {
            return bad("need batch >= n_elite >= 2");
        }
        if self.iterations == 0 {
            return bad("need at least one iteration");
        }
        if !(self.lambda_f >= T::zero() && self.lambda_rho >= T::zero()) {
            return bad("cost weights must be non-negative");
        }
        let unit = |e: T| e >= T::zero() && e < T::one();
        if !(unit(self.eps_f) && unit(self.eps_rho)) {
            return bad("thresholds must lie in [0, 1)");
        }
        if !(self.time_budget_secs > 0.0) || self.max_draws_per_iter == 0 {
            return bad("sampling budgets must be positive");
        }
        if !self.sigma_floor.iter().all(|s| *s > T::zero()) {
            return bad("sigma floors must be positive");
        }
        if let Some(g) = &self.grid {
            if !(g.step > T::zero()) {
                return bad("grid step must be positive");
            }
        }
        self.realism.validate()
    }

    /// Whether the realism score is needed at all.
    pub(crate) fn uses_realism(&self) -> bool {
        self.eps_f > T::zero() || (self.mode == PlannerMode::Full && self.lambda_f > T::zero())
    }
}
