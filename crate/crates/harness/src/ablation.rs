use std::io::Write;
use std::str::FromStr;

use forge::{evaluate_placement, label_primitives, render_cloud, GroundTruthScene};
use placer::planner::{find_placement, PlanResult, PlannerConfig, PlannerMode};
use placer::predicates::PredicateConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::task::{choose_task, PlanningTask};
use crate::{HarnessError, Result};

/// Planner variants compared in the ablation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Realism weight 100.
    Full100,
    /// Realism weight 1.
    Full1,
    /// No realism term and no realism constraint.
    NoDisc,
    /// Prior component means only.
    Mean,
    /// Prior log density as the cost.
    PriorCost,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Full100, Variant::Full1, Variant::NoDisc, Variant::Mean, Variant::PriorCost];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full100 => "full100",
            Variant::Full1 => "full1",
            Variant::NoDisc => "nodisc",
            Variant::Mean => "mean",
            Variant::PriorCost => "priorcost",
        }
    }

    pub fn planner_config(self, base: &PlannerConfig<f64>) -> PlannerConfig<f64> {
        let mut c = base.clone();
        match self {
            Variant::Full100 => c.lambda_f = 100.0,
            Variant::Full1 => c.lambda_f = 1.0,
            Variant::NoDisc => {
                c.lambda_f = 0.0;
                c.eps_f = 0.0;
            }
            Variant::Mean => {
                c.mode = PlannerMode::MeanOnly;
                c.lambda_f = 0.0;
                c.eps_f = 0.0;
            }
            Variant::PriorCost => {
                c.mode = PlannerMode::PriorCost;
                c.lambda_f = 0.0;
                c.eps_f = 0.0;
            }
        }
        c
    }

    /// Parses a comma-separated list such as `full100,nodisc`.
    pub fn parse_list(s: &str) -> Result<Vec<Variant>> {
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl FromStr for Variant {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| HarnessError::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub planner: PlannerConfig<f64>,
    /// Objects with fewer rendered points are not used as query or anchor.
    pub min_visible_points: usize,
    pub seed: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        // Rejection sampling is bounded by the draw cap; the wall-clock budget
        // is raised so that CPU contention cannot change results.
        let planner = PlannerConfig { time_budget_secs: 60.0, ..PlannerConfig::default() };
        Self { planner, min_visible_points: 50, seed: 0 }
    }
}

/// Per-trial outcome used by the ablation and correlation experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub task: PlanningTask,
    pub plan: PlanResult<f64>,
    pub found_predicates: bool,
    pub found_realistic: bool,
    pub displacement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: String,
    pub trials: usize,
    /// Trials where the planner returned an offset.
    pub planned: usize,
    pub found_predicates: usize,
    pub found_realistic: usize,
    pub successful: usize,
    pub stable_pose: usize,
}

pub(crate) fn trial_rng(seed: u64, scene_seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(scene_seed);
    rng.set_stream(seed);
    rng
}

/// Plans one task and judges the result on ground truth after settling.
pub(crate) fn run_trial(gt: &GroundTruthScene, cloud: &placer::geometry::SegmentedScene<f64>, task: &PlanningTask, cfg: &PlannerConfig<f64>) -> Result<Trial> {
    let plan = find_placement(task.query, task.anchor, cloud, &task.goal, cfg)?;
    let Some(delta) = plan.best_delta else {
        return Ok(Trial { task: task.clone(), plan, found_predicates: false, found_realistic: false, displacement: None });
    };
    let pivot = cloud.cloud(task.query)?.centroid()?;
    let report = evaluate_placement(gt, task.query, &delta, Some(pivot))?;
    let label = label_primitives(&report.settled, gt.object(task.anchor)?, &PredicateConfig::ground_truth());
    let found_predicates = task.goal.required().iter().all(|p| label.predicates.holds(*p));
    Ok(Trial { task: task.clone(), plan, found_predicates, found_realistic: report.supported, displacement: Some(report.displacement) })
}

/// Every variant on every scene of the corpus. Each scene gets one random
/// task shared by all variants.
pub fn run_ablation(corpus: &Corpus, variants: &[Variant], cfg: &HarnessConfig) -> Result<Vec<AblationRow>> {
    if corpus.is_empty() {
        return Err(HarnessError::EmptyCorpus);
    }
    let per_scene: Vec<Vec<Option<Trial>>> = corpus
        .par_iter()
        .map(|entry| {
            let cloud = render_cloud(&entry.scene)?;
            let mut rng = trial_rng(cfg.seed, entry.seed);
            let Some(task) = choose_task(&entry.scene, &cloud, cfg.min_visible_points, &mut rng) else {
                return Ok(vec![None; variants.len()]);
            };
            let planner_seed = rand::Rng::random::<u64>(&mut rng);
            variants
                .iter()
                .map(|v| {
                    let pc = PlannerConfig { seed: planner_seed, ..v.planner_config(&cfg.planner) };
                    run_trial(&entry.scene, &cloud, &task, &pc).map(Some)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(variants
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let trials: Vec<&Trial> = per_scene.iter().filter_map(|s| s[k].as_ref()).collect();
            let count = |f: &dyn Fn(&Trial) -> bool| trials.iter().filter(|t| f(t)).count();
            AblationRow {
                variant: v.name().to_string(),
                trials: corpus.len(),
                planned: count(&|t| t.plan.best_delta.is_some()),
                found_predicates: count(&|t| t.found_predicates),
                found_realistic: count(&|t| t.found_realistic),
                successful: count(&|t| t.found_predicates && t.found_realistic),
                stable_pose: count(&|t| t.displacement.is_some_and(|d| d < forge::STABLE_DISPLACEMENT)),
            }
        })
        .collect())
}

pub fn write_ablation_csv<W: Write>(rows: &[AblationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: "csv output".into(), source })?;
    Ok(())
}
