use forge::{evaluate_placement, render_cloud};
use placer::geometry::PoseOffset;
use placer::prior::build_heuristic_prior;
use placer::realism::PreparedRealism;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::ablation::{run_trial, trial_rng, HarnessConfig};
use crate::corpus::Corpus;
use crate::task::choose_task;
use crate::{HarnessError, Result};

/// Placements at or beyond this displacement are dropped as outliers.
pub const OUTLIER_CUTOFF: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub score: f64,
    pub displacement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub r: f64,
    /// Two-sided p-value of r = 0 under a t distribution with n - 2 degrees of freedom.
    pub p: f64,
    pub n: usize,
    pub outlier_cutoff: f64,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    /// Offsets drawn from the pose prior without any filtering.
    pub random: CorrelationReport,
    /// Planner outputs.
    pub planned: CorrelationReport,
}

/// Pearson correlation between `x` and `y` with its two-sided p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Err(HarnessError::TooFewPoints(n));
    }
    let mean = |v: &[f64]| v[..n].iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(HarnessError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(HarnessError::ZeroVariance("y"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok((r, p))
}

/// Correlation of realism score against settling displacement after dropping outliers.
pub fn correlate(placements: &[Placement], cutoff: f64) -> Result<CorrelationReport> {
    let kept: Vec<&Placement> = placements.iter().filter(|p| p.displacement < cutoff).collect();
    let scores: Vec<f64> = kept.iter().map(|p| p.score).collect();
    let disp: Vec<f64> = kept.iter().map(|p| p.displacement).collect();
    let (r, p) = pearson(&scores, &disp)?;
    Ok(CorrelationReport { r, p, n: kept.len(), outlier_cutoff: cutoff, dropped: placements.len() - kept.len() })
}

/// Realism score against displacement after settling, once for raw prior
/// samples and once for planner outputs. Each scene contributes
/// `tasks_per_scene` planning tasks and as many prior samples per task.
pub fn run_correlation(corpus: &Corpus, cfg: &HarnessConfig, tasks_per_scene: usize) -> Result<(CorrelationSummary, Vec<Placement>, Vec<Placement>)> {
    if corpus.is_empty() {
        return Err(HarnessError::EmptyCorpus);
    }
    let per_scene: Vec<(Vec<Placement>, Vec<Placement>)> = corpus
        .par_iter()
        .map(|entry| {
            let cloud = render_cloud(&entry.scene)?;
            let mut rng = trial_rng(cfg.seed ^ 0xC0FF_EE00, entry.seed);
            let (mut random, mut planned) = (Vec::new(), Vec::new());
            for _ in 0..tasks_per_scene {
                let Some(task) = choose_task(&entry.scene, &cloud, cfg.min_visible_points, &mut rng) else {
                    break;
                };
                let query = cloud.cloud(task.query)?;
                let pivot = query.centroid()?;
                let support = cloud.without(task.query)?;
                let realism = PreparedRealism::new(&support, cfg.planner.realism)?;
                let measure = |delta: &PoseOffset<f64>| -> Result<Placement> {
                    let score = realism.score(&query.apply_offset_with_pivot(delta, &pivot))?.score;
                    let displacement = evaluate_placement(&entry.scene, task.query, delta, Some(pivot))?.displacement;
                    Ok(Placement { score, displacement })
                };
                let prior = build_heuristic_prior(query, cloud.cloud(task.anchor)?, &support, &task.goal, &cfg.planner.prior)?;
                random.push(measure(&prior.sample(&mut rng))?);
                let pc = placer::planner::PlannerConfig { seed: rng.random(), ..cfg.planner.clone() };
                if let Some(delta) = run_trial(&entry.scene, &cloud, &task, &pc)?.plan.best_delta {
                    planned.push(measure(&delta)?);
                }
            }
            Ok((random, planned))
        })
        .collect::<Result<_>>()?;
    let (random, planned): (Vec<Vec<Placement>>, Vec<Vec<Placement>>) = per_scene.into_iter().unzip();
    let (random, planned): (Vec<Placement>, Vec<Placement>) = (random.concat(), planned.concat());
    let summary = CorrelationSummary { random: correlate(&random, OUTLIER_CUTOFF)?, planned: correlate(&planned, OUTLIER_CUTOFF)? };
    Ok((summary, random, planned))
}
