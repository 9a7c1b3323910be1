use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use forge::io::parse_ground_truth;
use forge::{label_all, render_cloud, ForgeConfig};
use harness::{
    generate_corpus, load_corpus, run_ablation, run_correlation, run_predicate_eval, save_corpus, write_ablation_csv, write_f1_csv, HarnessConfig,
    Variant,
};
use placer::geometry::io::{format_scene, parse_scene};
use placer::geometry::{SegmentId, SegmentedScene};
use placer::planner::{find_placement, PlannerConfig, PlannerMode};
use placer::predicates::PredicateGoal;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "placer", version, about = "Plan object placements in segmented point-cloud scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of synthetic tabletop scenes.
    Gen {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of bins per scene.
        #[arg(long, default_value_t = 0)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a scene file to a segmented point cloud.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground-truth predicate labels for every ordered object pair.
    Label {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan a placement of QUERY relative to ANCHOR in a point-cloud scene.
    Plan {
        /// Segmented point-cloud file, as written by `render`.
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        query: u32,
        #[arg(long)]
        anchor: u32,
        /// Comma-separated predicate names, e.g. left_of,near.
        #[arg(long)]
        goal: PredicateGoal,
        #[arg(long)]
        lambda_f: Option<f64>,
        #[arg(long)]
        eps_f: Option<f64>,
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "full")]
        mode: PlannerMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Planner ablation table over a corpus.
    Ablate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "full100,full1,nodisc,mean,priorcost")]
        variants: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predicate engine accuracy against ground-truth labels.
    Predeval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation of realism score with settling displacement.
    Correlate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Planning tasks drawn per scene.
        #[arg(long, default_value_t = 2)]
        tasks_per_scene: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen { count, seed, bins, out } => {
            if count == 0 {
                bail!("--count must be positive");
            }
            let corpus = generate_corpus(count, seed, &ForgeConfig { bins, ..ForgeConfig::default() })?;
            save_corpus(&corpus, &out)?;
        }
        Command::Render { scene, out } => {
            let gt = parse_ground_truth(&read(&scene)?)?;
            write(&out, format_scene(&render_cloud(&gt)?))?;
        }
        Command::Label { scene, out } => {
            let gt = parse_ground_truth(&read(&scene)?)?;
            write_json(&out, &label_all(&gt))?;
        }
        Command::Plan { scene, query, anchor, goal, lambda_f, eps_f, batch, iters, seed, mode, out } => {
            let cloud: SegmentedScene<f64> = parse_scene(&read(&scene)?)?;
            let d = PlannerConfig::default();
            let cfg = PlannerConfig {
                lambda_f: lambda_f.unwrap_or(d.lambda_f),
                eps_f: eps_f.unwrap_or(d.eps_f),
                batch: batch.unwrap_or(d.batch),
                iterations: iters.unwrap_or(d.iterations),
                seed,
                mode,
                ..d
            };
            let result = find_placement(SegmentId(query), SegmentId(anchor), &cloud, &goal, &cfg)?;
            write_json(&out, &result)?;
        }
        Command::Ablate { corpus, variants, seed, out } => {
            let corpus = load_corpus(&corpus)?;
            let variants = Variant::parse_list(&variants)?;
            let rows = run_ablation(&corpus, &variants, &HarnessConfig { seed, ..HarnessConfig::default() })?;
            let mut buf = Vec::new();
            write_ablation_csv(&rows, &mut buf)?;
            write(&out, buf)?;
        }
        Command::Predeval { corpus, out } => {
            let corpus = load_corpus(&corpus)?;
            let rows = run_predicate_eval(&corpus, HarnessConfig::default().min_visible_points)?;
            let mut buf = Vec::new();
            write_f1_csv(&rows, &mut buf)?;
            write(&out, buf)?;
        }
        Command::Correlate { corpus, seed, tasks_per_scene, out } => {
            let corpus = load_corpus(&corpus)?;
            let (summary, random, planned) = run_correlation(&corpus, &HarnessConfig { seed, ..HarnessConfig::default() }, tasks_per_scene)?;
            write_json(&out, &serde_json::json!({ "summary": summary, "random": random, "planned": planned }))?;
        }
    }
    Ok(())
}

