use std::io::Write;

use forge::{label_primitives, render_cloud};
use placer::geometry::SegmentId;
use placer::predicates::{classify, Predicate, PredicateConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn add(&mut self, predicted: bool, truth: bool) {
        match (predicted, truth) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    fn merge(mut self, o: Confusion) -> Self {
        self.tp += o.tp;
        self.fp += o.fp;
        self.tn += o.tn;
        self.fn_ += o.fn_;
        self
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Row {
    pub predicate: String,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub f1: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub prevalence_true: f64,
    pub prevalence_false: f64,
    /// Set when the predicate never holds in the ground truth or is never
    /// predicted, so precision or recall is undefined; f1 is then 0.
    pub degenerate: bool,
}

impl F1Row {
    pub fn from_confusion(p: Predicate, c: Confusion) -> Self {
        let precision_den = c.tp + c.fp;
        let recall_den = c.tp + c.fn_;
        let degenerate = precision_den == 0 || recall_den == 0;
        let f1 = if c.tp == 0 { 0.0 } else { 2.0 * c.tp as f64 / (2 * c.tp + c.fp + c.fn_) as f64 };
        Self {
            predicate: p.name().to_string(),
            tp: c.tp,
            fp: c.fp,
            tn: c.tn,
            fn_: c.fn_,
            f1,
            sensitivity: ratio(c.tp, recall_den),
            specificity: ratio(c.tn, c.tn + c.fp),
            prevalence_true: ratio(recall_den, c.total()),
            prevalence_false: ratio(c.tn + c.fp, c.total()),
            degenerate,
        }
    }
}

/// Rule engine on rendered clouds against exact ground-truth labels, over
/// every ordered pair of objects that both have `min_points` rendered points.
pub fn run_predicate_eval(corpus: &Corpus, min_points: usize) -> Result<Vec<F1Row>> {
    if corpus.is_empty() {
        return Err(HarnessError::EmptyCorpus);
    }
    let engine = PredicateConfig::for_clouds();
    let truth_cfg = PredicateConfig::ground_truth();
    let per_scene: Vec<[Confusion; Predicate::COUNT]> = corpus
        .par_iter()
        .map(|e| {
            let cloud = render_cloud(&e.scene)?;
            let ids: Vec<SegmentId> = cloud.object_ids().filter(|id| cloud.cloud(*id).is_ok_and(|c| c.len() >= min_points)).collect();
            let mut conf = [Confusion::default(); Predicate::COUNT];
            for &q in &ids {
                for &a in &ids {
                    if q == a {
                        continue;
                    }
                    let predicted = classify(cloud.cloud(q)?, cloud.cloud(a)?, &engine)?;
                    let truth = label_primitives(e.scene.object(q)?, e.scene.object(a)?, &truth_cfg);
                    for p in Predicate::ALL {
                        conf[p.index()].add(predicted.holds(p), truth.predicates.holds(p));
                    }
                }
            }
            Ok(conf)
        })
        .collect::<Result<_>>()?;
    let total = per_scene.into_iter().fold([Confusion::default(); Predicate::COUNT], |mut acc, c| {
        for k in 0..Predicate::COUNT {
            acc[k] = acc[k].merge(c[k]);
        }
        acc
    });
    Ok(Predicate::ALL.iter().map(|p| F1Row::from_confusion(*p, total[p.index()])).collect())
}

pub fn write_f1_csv<W: Write>(rows: &[F1Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: "csv output".into(), source })?;
    Ok(())
}
