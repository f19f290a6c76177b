//! Experiment configuration files.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::degree_model::LimitDistribution;
use crate::logic::{parse_formula, Formula};
use crate::sampler::{Conditioning, DEFAULT_MAX_REJECTIONS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Census,
    BgwCompare,
    Axioms,
    Estimate,
    Clustering,
    Simplicity,
    Admissibility,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Census,
        Task::BgwCompare,
        Task::Axioms,
        Task::Estimate,
        Task::Clustering,
        Task::Simplicity,
        Task::Admissibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Census => "census",
            Task::BgwCompare => "bgw-compare",
            Task::Axioms => "axioms",
            Task::Estimate => "estimate",
            Task::Clustering => "clustering",
            Task::Simplicity => "simplicity",
            Task::Admissibility => "admissibility",
        }
    }

    /// Fixed seed-tree index, so a task's streams do not depend on which
    /// other tasks are listed.
    pub(crate) fn seed_index(self) -> u64 {
        self as u64
    }
}

/// Per-task knobs; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOptions {
    /// Sentence for the `estimate` task, as an s-expression. Defaults to
    /// "there is a double hyper-edge".
    pub formula: Option<String>,
    pub bgw_radius: usize,
    pub bgw_samples: usize,
    /// Y axioms for degrees up to this bound.
    pub axiom_max_degree: usize,
    /// Z axioms for `r + s` up to this bound.
    pub axiom_z_total: usize,
    /// X axioms for paths with up to this many vertices.
    pub axiom_path_vertices: usize,
    /// X axioms require up to this many disjoint copies.
    pub axiom_copies: usize,
    pub admissibility_tolerance: f64,
    pub max_rejections: u64,
}

impl Default for TaskOptions {
    fn default() -> Self {
        TaskOptions {
            formula: None,
            bgw_radius: 2,
            bgw_samples: 20_000,
            axiom_max_degree: 6,
            axiom_z_total: 4,
            axiom_path_vertices: 3,
            axiom_copies: 1,
            admissibility_tolerance: 1e-2,
            max_rejections: DEFAULT_MAX_REJECTIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub vdist: LimitDistribution,
    pub edist: LimitDistribution,
    pub sizes: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub conditioning: Conditioning,
    pub tasks: Vec<Task>,
    pub output_dir: PathBuf,
    pub options: TaskOptions,
}

fn take<T: DeserializeOwned>(obj: &mut Map<String, Value>, key: &str, prefix: &str) -> Result<Option<T>> {
    let path = if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    obj.remove(key)
        .map(|v| serde_json::from_value(v).map_err(|e| Error::config(path, e.to_string())))
        .transpose()
}

fn required<T: DeserializeOwned>(obj: &mut Map<String, Value>, key: &str) -> Result<T> {
    take(obj, key, "")?.ok_or_else(|| Error::config(key, "missing required field"))
}

fn reject_unknown(obj: &Map<String, Value>, prefix: &str) -> Result<()> {
    match obj.keys().next() {
        Some(k) if prefix.is_empty() => Err(Error::config(k.clone(), "unknown field")),
        Some(k) => Err(Error::config(format!("{prefix}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn options_from(value: Value) -> Result<TaskOptions> {
    let Value::Object(mut obj) = value else {
        return Err(Error::config("options", "expected an object"));
    };
    let d = TaskOptions::default();
    let p = "options";
    let options = TaskOptions {
        formula: take::<Option<String>>(&mut obj, "formula", p)?.flatten(),
        bgw_radius: take(&mut obj, "bgw_radius", p)?.unwrap_or(d.bgw_radius),
        bgw_samples: take(&mut obj, "bgw_samples", p)?.unwrap_or(d.bgw_samples),
        axiom_max_degree: take(&mut obj, "axiom_max_degree", p)?.unwrap_or(d.axiom_max_degree),
        axiom_z_total: take(&mut obj, "axiom_z_total", p)?.unwrap_or(d.axiom_z_total),
        axiom_path_vertices: take(&mut obj, "axiom_path_vertices", p)?.unwrap_or(d.axiom_path_vertices),
        axiom_copies: take(&mut obj, "axiom_copies", p)?.unwrap_or(d.axiom_copies),
        admissibility_tolerance: take(&mut obj, "admissibility_tolerance", p)?.unwrap_or(d.admissibility_tolerance),
        max_rejections: take(&mut obj, "max_rejections", p)?.unwrap_or(d.max_rejections),
    };
    reject_unknown(&obj, p)?;
    Ok(options)
}

impl ExperimentConfig {
    /// Parses and validates a JSON configuration. Errors name the offending
    /// field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("", e.to_string()))?;
        let Value::Object(mut obj) = value else {
            return Err(Error::config("", "expected a JSON object"));
        };
        let config = ExperimentConfig {
            vdist: required(&mut obj, "vdist")?,
            edist: required(&mut obj, "edist")?,
            sizes: required(&mut obj, "sizes")?,
            samples: required(&mut obj, "samples")?,
            seed: take(&mut obj, "seed", "")?.unwrap_or(0),
            conditioning: take(&mut obj, "conditioning", "")?.unwrap_or(Conditioning::None),
            tasks: take(&mut obj, "tasks", "")?.unwrap_or_default(),
            output_dir: take(&mut obj, "output_dir", "")?.unwrap_or_else(|| PathBuf::from("results")),
            options: obj.remove("options").map(options_from).transpose()?.unwrap_or_default(),
        };
        reject_unknown(&obj, "")?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.vdist
            .validate()
            .map_err(|e| Error::config("vdist", e.to_string()))?;
        self.edist
            .validate_edge_side()
            .map_err(|e| Error::config("edist", e.to_string()))?;
        if self.sizes.is_empty() {
            return Err(Error::config("sizes", "must be nonempty"));
        }
        if let Some(i) = self.sizes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::config(format!("sizes[{}]", i + 1), "sizes must be strictly ascending"));
        }
        if let Some(i) = self.sizes.iter().position(|&n| n == 0) {
            return Err(Error::config(format!("sizes[{i}]"), "sizes must be positive"));
        }
        if self.samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        if self.tasks.contains(&Task::Admissibility) && self.sizes.len() < 3 {
            return Err(Error::config("sizes", "the admissibility task needs at least 3 sizes"));
        }
        if self.options.bgw_samples == 0 {
            return Err(Error::config("options.bgw_samples", "must be at least 1"));
        }
        if !(self.options.admissibility_tolerance > 0.0) {
            return Err(Error::config("options.admissibility_tolerance", "must be positive"));
        }
        self.formula()?;
        Ok(())
    }

    /// The `estimate` sentence, parsed.
    pub fn formula(&self) -> Result<Formula> {
        match &self.options.formula {
            None => Ok(crate::logic::sentences::double_hyperedge()),
            Some(text) => {
                let f = parse_formula(text).map_err(|e| Error::config("options.formula", e.to_string()))?;
                if !f.is_sentence() {
                    return Err(Error::config("options.formula", "formula has free variables"));
                }
                Ok(f)
            }
        }
    }
}
