use forge::render_cloud;
use placer::realism::{make_negative, score};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ablation::{trial_rng, HarnessConfig};
use crate::corpus::Corpus;
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub positives: usize,
    pub negatives: usize,
    pub mean_positive: f64,
    pub mean_negative: f64,
    pub gap: f64,
}

/// Realism score of every visible object at its generated pose against the
/// same object under one random negative perturbation.
pub fn run_separability(corpus: &Corpus, cfg: &HarnessConfig) -> Result<SeparabilityReport> {
    if corpus.is_empty() {
        return Err(HarnessError::EmptyCorpus);
    }
    let realism = cfg.planner.realism;
    let pairs: Vec<Vec<(f64, f64)>> = corpus
        .par_iter()
        .map(|entry| {
            let cloud = render_cloud(&entry.scene)?;
            let mut rng = trial_rng(cfg.seed ^ 0x5E9A_0000, entry.seed);
            let mut out = Vec::new();
            let ids: Vec<_> = cloud.object_ids().collect();
            for id in ids {
                let query = cloud.cloud(id)?;
                if query.len() < cfg.min_visible_points {
                    continue;
                }
                let support = cloud.without(id)?;
                let pos = score(query, &support, &realism)?.score;
                let moved = make_negative(&cloud, id, &mut rng)?;
                let neg = score(moved.cloud(id)?, &support, &realism)?.score;
                out.push((pos, neg));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let pairs = pairs.concat();
    let n = pairs.len();
    if n == 0 {
        return Err(HarnessError::EmptyCorpus);
    }
    let mean_positive = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mean_negative = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
    Ok(SeparabilityReport { positives: n, negatives: n, mean_positive, mean_negative, gap: mean_positive - mean_negative })
}
