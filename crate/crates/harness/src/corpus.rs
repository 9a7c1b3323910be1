use std::fs;
use std::path::Path;

use forge::io::{format_ground_truth, parse_ground_truth};
use forge::{generate_scene, ForgeConfig, GroundTruthScene};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Manifest file name inside a corpus directory.
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    /// Seed the scene was generated from; also seeds per-scene experiment choices.
    pub seed: u64,
    pub scene: GroundTruthScene,
}

pub type Corpus = Vec<CorpusEntry>;

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    scenes: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    file: String,
    seed: u64,
}

/// Seed of scene `index` in a corpus generated from `seed`.
pub fn scene_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

pub fn generate_corpus(count: usize, seed: u64, cfg: &ForgeConfig) -> Result<Corpus> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let s = scene_seed(seed, i);
            let scene = generate_scene(&mut ChaCha8Rng::seed_from_u64(s), cfg)?;
            Ok(CorpusEntry { name: format!("scene_{i:04}.txt"), seed: s, scene })
        })
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for e in corpus {
        let path = dir.join(&e.name);
        fs::write(&path, format_ground_truth(&e.scene)).map_err(io_err(&path))?;
    }
    let manifest = Manifest { scenes: corpus.iter().map(|e| ManifestEntry { file: e.name.clone(), seed: e.seed }).collect() };
    let path = dir.join(MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(io_err(&path))?;
    Ok(())
}

pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let path = dir.join(MANIFEST);
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&path).map_err(io_err(&path))?)?;
    manifest
        .scenes
        .into_iter()
        .map(|m| {
            let path = dir.join(&m.file);
            let scene = parse_ground_truth(&fs::read_to_string(&path).map_err(io_err(&path))?)?;
            Ok(CorpusEntry { name: m.file, seed: m.seed, scene })
        })
        .collect()
}
