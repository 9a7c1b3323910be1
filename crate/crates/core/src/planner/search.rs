use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{PlannerConfig, PlannerMode};
use super::context::{PlanningContext, Rejection};
use super::surrogate::{fit_surrogate, SurrogateDistribution};
use crate::geometry::{PoseOffset, SegmentId, SegmentedScene};
use crate::predicates::PredicateGoal;
use crate::prior::{build_heuristic_prior, GmmPrior};
use crate::{Real, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionTally {
    pub not_in_view: usize,
    pub goal_failed: usize,
    pub unrealistic: usize,
}

impl RejectionTally {
    fn add(&mut self, r: Rejection) {
        match r {
            Rejection::NotInView => self.not_in_view += 1,
            Rejection::GoalFailed => self.goal_failed += 1,
            Rejection::Unrealistic => self.unrealistic += 1,
        }
    }
}

/// Why rejection sampling in an iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BatchFull,
    DrawCap,
    TimeBudget,
    /// Mean-only mode evaluates a fixed candidate list.
    Exhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanDiagnostics<T> {
    pub accepted: Vec<usize>,
    pub drawn: Vec<usize>,
    /// Lowest cost seen so far after each iteration.
    pub best_cost_trace: Vec<Option<T>>,
    pub stop_reasons: Vec<StopReason>,
    pub rejections: RejectionTally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult<T> {
    pub best_delta: Option<PoseOffset<T>>,
    pub best_cost: Option<T>,
    pub diagnostics: PlanDiagnostics<T>,
}

enum Proposal<'a, T> {
    Prior(&'a GmmPrior<T>),
    Surrogate(SurrogateDistribution<T>),
}

/// Candidate `index` of iteration `iter` gets its own ChaCha stream so
/// results do not depend on thread scheduling.
fn candidate_rng(seed: u64, iter: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iter as u64) << 40) | index as u64);
    rng
}

struct Searcher<'a, T> {
    ctx: &'a PlanningContext<T>,
    prior: &'a GmmPrior<T>,
    best: Option<(T, PoseOffset<T>)>,
    diag: PlanDiagnostics<T>,
}

impl<T: Real> Searcher<'_, T> {
    fn snap(&self, d: PoseOffset<T>) -> PoseOffset<T> {
        match &self.ctx.config().grid {
            Some(g) => PoseOffset::from_array(g.snap(d.dx, d.dy)),
            None => d,
        }
    }

    fn cost_prior(&self) -> Option<&GmmPrior<T>> {
        (self.ctx.config().mode == PlannerMode::PriorCost).then_some(self.prior)
    }

    /// Screens `candidates` in parallel and folds them in index order.
    /// Returns accepted (cost, delta) pairs, at most `room` of them.
    fn screen_batch(&mut self, candidates: &[PoseOffset<T>], room: usize) -> Result<Vec<(T, PoseOffset<T>)>> {
        let prior = self.cost_prior();
        let outcomes: Vec<_> = candidates.par_iter().map(|d| self.ctx.screen(d, prior)).collect::<Result<_>>()?;
        let mut accepted = Vec::new();
        for (d, outcome) in candidates.iter().zip(outcomes) {
            match outcome {
                Ok(c) if accepted.len() < room => accepted.push((c, *d)),
                Ok(_) => {}
                Err(r) => self.diag.rejections.add(r),
            }
        }
        Ok(accepted)
    }

    fn record(&mut self, accepted: &[(T, PoseOffset<T>)]) {
        for (c, d) in accepted {
            if self.best.as_ref().is_none_or(|(b, _)| *c < *b) {
                self.best = Some((*c, *d));
            }
        }
        self.diag.best_cost_trace.push(self.best.as_ref().map(|(c, _)| *c));
    }

    fn iterate(&mut self, iter: usize, proposal: &Proposal<'_, T>) -> Result<Vec<(T, PoseOffset<T>)>> {
        let cfg = self.ctx.config();
        let start = Instant::now();
        let rotation = self.prior.rotation();
        let mut accepted = Vec::new();
        let mut drawn = 0;
        let stop = loop {
            if accepted.len() >= cfg.batch {
                break StopReason::BatchFull;
            }
            if drawn >= cfg.max_draws_per_iter {
                break StopReason::DrawCap;
            }
            if start.elapsed().as_secs_f64() >= cfg.time_budget_secs {
                break StopReason::TimeBudget;
            }
            let chunk = cfg.batch.min(cfg.max_draws_per_iter - drawn);
            let candidates: Vec<PoseOffset<T>> = (drawn..drawn + chunk)
                .map(|k| {
                    let mut rng = candidate_rng(cfg.seed, iter, k);
                    let d = match proposal {
                        Proposal::Prior(p) => p.sample(&mut rng),
                        Proposal::Surrogate(s) => s.sample(&mut rng, rotation),
                    };
                    self.snap(d)
                })
                .collect();
            drawn += chunk;
            let room = cfg.batch - accepted.len();
            accepted.extend(self.screen_batch(&candidates, room)?);
        };
        self.diag.accepted.push(accepted.len());
        self.diag.drawn.push(drawn);
        self.diag.stop_reasons.push(stop);
        self.record(&accepted);
        Ok(accepted)
    }

    fn run_cem(&mut self) -> Result<()> {
        let cfg = self.ctx.config().clone();
        let mut proposal = Proposal::Prior(self.prior);
        for iter in 0..cfg.iterations {
            let mut accepted = self.iterate(iter, &proposal)?;
            // Stable sort keeps index order among equal costs.
            accepted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            let elites: Vec<PoseOffset<T>> = accepted.iter().take(cfg.n_elite).map(|(_, d)| *d).collect();
            if elites.len() >= 2 {
                proposal = Proposal::Surrogate(fit_surrogate(&elites, &cfg.sigma_floor)?);
            }
        }
        Ok(())
    }

    fn run_mean_only(&mut self) -> Result<()> {
        let candidates: Vec<PoseOffset<T>> = self.prior.components().iter().map(|c| self.snap(PoseOffset::from_array(c.mean))).collect();
        let accepted = self.screen_batch(&candidates, candidates.len())?;
        self.diag.accepted.push(accepted.len());
        self.diag.drawn.push(candidates.len());
        self.diag.stop_reasons.push(StopReason::Exhausted);
        self.record(&accepted);
        Ok(())
    }
}


/// Search with an explicit prior over a prepared context.
pub fn find_placement_with_context<T: Real>(ctx: &PlanningContext<T>, prior: &GmmPrior<T>) -> Result<PlanResult<T>> {
    let mut s = Searcher { ctx, prior, best: None, diag: PlanDiagnostics::default() };
    match ctx.config().mode {
        PlannerMode::MeanOnly => s.run_mean_only()?,
        PlannerMode::Full | PlannerMode::PriorCost => s.run_cem()?,
    }
    Ok(PlanResult { best_delta: s.best.map(|(_, d)| d), best_cost: s.best.map(|(c, _)| c), diagnostics: s.diag })
}

/// Builds the heuristic prior for the goal and searches for the lowest-cost
/// offset that passes every constraint.
pub fn find_placement<T: Real>(
    query: SegmentId,
    anchor: SegmentId,
    scene: &SegmentedScene<T>,
    goal: &PredicateGoal,
    cfg: &PlannerConfig<T>,
) -> Result<PlanResult<T>> {
    let ctx = PlanningContext::new(scene, query, anchor, goal, cfg)?;
    let prior = build_heuristic_prior(scene.cloud(query)?, scene.cloud(anchor)?, &scene.without(query)?, goal, &cfg.prior)?;
    find_placement_with_context(&ctx, &prior)
}
