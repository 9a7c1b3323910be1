//! Experiment driver over generated scene corpora: planner ablations,
//! predicate accuracy against ground truth, and realism score versus
//! settling displacement.

mod ablation;
mod corpus;
mod correlation;
mod predeval;
mod separability;
mod task;

pub use ablation::{run_ablation, write_ablation_csv, AblationRow, HarnessConfig, Variant};
pub use corpus::{generate_corpus, load_corpus, save_corpus, scene_seed, Corpus, CorpusEntry, MANIFEST};
pub use correlation::{correlate, pearson, OUTLIER_CUTOFF, run_correlation, CorrelationReport, CorrelationSummary, Placement};
pub use predeval::{run_predicate_eval, write_f1_csv, Confusion, F1Row};
pub use separability::{run_separability, SeparabilityReport};
pub use task::{choose_task, PlanningTask, DIRECTIONAL_GOALS};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] placer::Error),
    #[error(transparent)]
    Forge(#[from] forge::ForgeError),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("unknown variant {0:?}")]
    UnknownVariant(String),
    #[error("correlation needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
