//! Report payloads and result-file plumbing shared by the subcommands.
//!
//! Every command prints one JSON document to stdout. With `--out` the
//! same document lands in `summary.json` next to the front CSVs, plus a
//! `manifest.json` recording what produced them. Timing lives only in
//! the manifest so the data files stay byte-identical across runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use vmdp::fronts::render_front_csv;
use vmdp::{RewardVector, VmdpModel};

pub fn model_digest(model: &VmdpModel) -> String {
    let mut hasher = Sha256::new();
    hasher.update(model.to_json_string().as_bytes());
    format!("{:x}", hasher.finalize())
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// File-name-safe state labels. Falls back to positional labels if
/// sanitizing makes two names collide.
pub fn state_labels(model: &VmdpModel) -> Vec<String> {
    let sanitized: Vec<String> = model
        .states()
        .iter()
        .map(|name| {
            let cleaned: String = name
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                .collect();
            if cleaned.is_empty() {
                "_".to_string()
            } else {
                cleaned
            }
        })
        .collect();
    let distinct: std::collections::BTreeSet<&String> = sanitized.iter().collect();
    if distinct.len() == sanitized.len() {
        sanitized
    } else {
        (0..sanitized.len()).map(|i| format!("state{i}")).collect()
    }
}

#[derive(Serialize)]
pub struct ModelInfo {
    pub digest: String,
    pub objectives: usize,
    pub horizon: usize,
    pub states: Vec<String>,
    pub stationary: bool,
    pub deterministic: bool,
    pub markov_policies: String,
    pub history_policies: String,
}

impl ModelInfo {
    pub fn of(model: &VmdpModel) -> ModelInfo {
        let props = model.analyze();
        ModelInfo {
            digest: model_digest(model),
            objectives: model.num_objectives(),
            horizon: model.horizon(),
            states: model.states().to_vec(),
            stationary: props.is_stationary,
            deterministic: props.is_deterministic,
            markov_policies: props.markov_policy_count.to_string(),
            history_policies: props.history_policy_count.to_string(),
        }
    }
}

/// One front with everything needed to render it as CSV or JSON.
pub struct FrontData {
    pub epoch: usize,
    pub state_name: String,
    pub state_label: String,
    pub vectors: Vec<RewardVector>,
    /// Parallel to `vectors`; present when generator actions are kept.
    pub actions: Option<Vec<String>>,
}

impl FrontData {
    pub fn file_name(&self) -> String {
        format!("fronts_{}_{}.csv", self.epoch, self.state_label)
    }

    pub fn csv(&self, places: u32) -> String {
        render_front_csv(&self.vectors, places, self.actions.as_deref())
    }

    pub fn entry(&self, places: u32, with_file: bool) -> FrontEntry {
        let vectors = self
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| FrontVector {
                exact: v.clone(),
                rounded: v.components().iter().map(|c| c.decimal_string(places)).collect(),
                generator_action: self.actions.as_ref().map(|a| a[i].clone()),
            })
            .collect();
        FrontEntry {
            epoch: self.epoch,
            state: self.state_name.clone(),
            size: self.vectors.len(),
            vectors,
            file: with_file.then(|| self.file_name()),
        }
    }
}

#[derive(Serialize)]
pub struct FrontVector {
    pub exact: RewardVector,
    pub rounded: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_action: Option<String>,
}

#[derive(Serialize)]
pub struct FrontEntry {
    pub epoch: usize,
    pub state: String,
    pub size: usize,
    pub vectors: Vec<FrontVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Serialize)]
pub struct ValidationSummary {
    pub command: &'static str,
    pub ok: bool,
    pub violations: Vec<String>,
    pub model: ModelInfo,
}

#[derive(Serialize)]
pub struct SolveSummary {
    pub command: &'static str,
    pub model: ModelInfo,
    pub round: u32,
    pub keep_f_sets: bool,
    pub fronts: Vec<FrontEntry>,
}

#[derive(Serialize)]
pub struct OracleSummary {
    pub command: &'static str,
    pub space: &'static str,
    pub model: ModelInfo,
    pub cap: u64,
    pub round: u32,
    pub policy_count: u64,
    pub fronts: Vec<FrontEntry>,
}

#[derive(Serialize)]
pub struct ViolationEntry {
    pub epoch: usize,
    pub site: String,
    pub vector: RewardVector,
    pub rounded: Vec<String>,
    pub generator_action: String,
}

#[derive(Serialize)]
pub struct CheckSummary {
    pub command: &'static str,
    pub which: &'static str,
    pub model: ModelInfo,
    pub cap: u64,
    pub verdict: &'static str,
    pub holds: bool,
    pub policy_count: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<ViolationEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mismatched_sites: Vec<String>,
}

#[derive(Serialize)]
pub struct ComparisonReport {
    pub command: &'static str,
    pub left_label: String,
    pub right_label: String,
    #[serde(rename = "match")]
    pub matches: bool,
    pub only_left: Vec<RewardVector>,
    pub only_right: Vec<RewardVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounding_places: Option<u32>,
}

#[derive(Serialize)]
pub struct DemoCheck {
    pub name: String,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct DemoSummary {
    pub command: &'static str,
    pub model: ModelInfo,
    pub round: u32,
    pub recursion_front: FrontEntry,
    pub markov_front: FrontEntry,
    pub history_front: FrontEntry,
    pub markov_policies: u64,
    pub history_policies: u64,
    pub infeasible_vector: FrontVector,
    pub infeasible_has_markov_witness: bool,
    pub infeasible_has_history_witness: bool,
    pub deterministic_front: FrontEntry,
    pub checks: Vec<DemoCheck>,
    pub all_checks_pass: bool,
}

/// Collects result files under one directory and closes with a
/// manifest naming them all.
pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<OutDir> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, &to_pretty_json(value))
    }

    pub fn finish(
        self,
        command: &str,
        model_path: Option<&Path>,
        model_digest: Option<String>,
        flags: BTreeMap<&'static str, serde_json::Value>,
        started: Instant,
    ) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            model_path: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            model_digest: Option<String>,
            flags: BTreeMap<&'static str, serde_json::Value>,
            elapsed_ms: u128,
            results: Vec<String>,
        }
        let manifest = Manifest {
            command,
            model_path: model_path.map(|p| p.display().to_string()),
            model_digest,
            flags,
            elapsed_ms: started.elapsed().as_millis(),
            results: self.files.clone(),
        };
        let path = self.dir.join("manifest.json");
        fs::write(&path, to_pretty_json(&manifest))
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
