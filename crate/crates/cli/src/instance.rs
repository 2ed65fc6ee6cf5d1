//! The JSON instance file: schema, loading, validation, and conversion to
//! solver types.
//!
//! ```json
//! {
//!   "version": "1",
//!   "items": [
//!     { "c": 1.0, "m": 1.0, "d": 1.0,
//!       "a": 10.0, "mu": 30.0, "b": 50.0, "mad": 10.0,
//!       "beta": 0.5, "sigma": 11.5,
//!       "ground_truth": { "family": "triangular", "mode": 30.0 } }
//!   ],
//!   "budget": 45.0,
//!   "budget_grid": [0.0, 15.0, 30.0, 45.0],
//!   "options": {
//!     "seed": 42, "grid_points": 101, "gamma": 0.75,
//!     "yields": [ { "a": 0.65, "mu": 0.8, "b": 0.95, "mad": 0.075 } ],
//!     "extra_constraints": [ { "coeffs": [1.0, 1.0], "budget": 45.0 } ]
//!   }
//! }
//! ```
//!
//! `uniform`, `beta` and `triangular` ground truths take their support from
//! the item's `a` and `b`. Per-item `beta`/`sigma` override values derived
//! from the ground truth.

use serde::{Deserialize, Serialize};

use robust_newsvendor::baselines::GroundTruth;
use robust_newsvendor::moments::DiscreteDistribution;
use robust_newsvendor::{Item, ItemEconomics, MomentSpec};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

fn default_unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub items: Vec<ItemEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemEntry {
    #[serde(default = "default_unit")]
    pub c: f64,
    pub m: f64,
    pub d: f64,
    pub a: f64,
    pub mu: f64,
    pub b: f64,
    pub mad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroundTruthEntry {
    Uniform,
    Beta { shape1: f64, shape2: f64 },
    Triangular { mode: f64 },
    Discrete { points: Vec<f64>, probs: Vec<f64> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yields: Option<Vec<YieldEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_constraints: Option<Vec<ConstraintEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YieldEntry {
    pub a: f64,
    pub mu: f64,
    pub b: f64,
    pub mad: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub coeffs: Vec<f64>,
    pub budget: f64,
}

/// An instance ready for the solver: items, optional ground truths, and
/// the raw file for echoing.
pub struct LoadedInstance {
    pub file: InstanceFile,
    pub items: Vec<Item>,
}

impl LoadedInstance {
    pub fn econs(&self) -> Vec<ItemEconomics> {
        self.items.iter().map(|it| it.econ).collect()
    }

    /// Ground truths for every item; errors when any item lacks one.
    pub fn ground_truths(&self) -> Result<Vec<GroundTruth>, CliError> {
        self.file
            .items
            .iter()
            .enumerate()
            .map(|(i, entry)| {
                let gt = entry.ground_truth.as_ref().ok_or_else(|| {
                    CliError::Schema(format!("item {i}: ground_truth required for this command"))
                })?;
                ground_truth_from_entry(gt, entry, i)
            })
            .collect()
    }

    /// Items with `beta` present on every spec (from the entry or derived
    /// from its ground truth). Errors naming the first item without one.
    pub fn items_with_beta(&self) -> Result<Vec<Item>, CliError> {
        self.file
            .items
            .iter()
            .zip(&self.items)
            .enumerate()
            .map(|(i, (entry, item))| {
                let mut item = *item;
                if item.spec.beta.is_none() {
                    if let Some(gt) = &entry.ground_truth {
                        let dist = ground_truth_from_entry(gt, entry, i)?;
                        item.spec = item.spec.with_beta(dist.prob_at_least_mean());
                    } else {
                        return Err(CliError::Schema(format!(
                            "item {i}: beta required for lower bound"
                        )));
                    }
                }
                Ok(item)
            })
            .collect()
    }

    pub fn yields(&self) -> Result<Vec<MomentSpec>, CliError> {
        let entries = self
            .file
            .options
            .yields
            .as_ref()
            .ok_or_else(|| CliError::Schema("options.yields required for ext-yield".into()))?;
        if entries.len() != self.items.len() {
            return Err(CliError::Schema(format!(
                "{} yield entries for {} items",
                entries.len(),
                self.items.len()
            )));
        }
        Ok(entries
            .iter()
            .map(|y| MomentSpec::new(y.a, y.mu, y.b, y.mad))
            .collect())
    }

    pub fn constraints(&self) -> Result<(Vec<Vec<f64>>, Vec<f64>), CliError> {
        let entries = self
            .file
            .options
            .extra_constraints
            .as_ref()
            .ok_or_else(|| {
                CliError::Schema("options.extra_constraints required for ext-multi".into())
            })?;
        let mut weights = Vec::with_capacity(entries.len());
        let mut budgets = Vec::with_capacity(entries.len());
        for (j, entry) in entries.iter().enumerate() {
            if entry.coeffs.len() != self.items.len() {
                return Err(CliError::Schema(format!(
                    "constraint {j}: {} coefficients for {} items",
                    entry.coeffs.len(),
                    self.items.len()
                )));
            }
            weights.push(entry.coeffs.clone());
            budgets.push(entry.budget);
        }
        Ok((weights, budgets))
    }
}

fn ground_truth_from_entry(
    entry: &GroundTruthEntry,
    item: &ItemEntry,
    index: usize,
) -> Result<GroundTruth, CliError> {
    let truth = match entry {
        GroundTruthEntry::Uniform => GroundTruth::Uniform {
            lo: item.a,
            hi: item.b,
        },
        GroundTruthEntry::Beta { shape1, shape2 } => GroundTruth::ScaledBeta {
            alpha: *shape1,
            beta: *shape2,
            lo: item.a,
            hi: item.b,
        },
        GroundTruthEntry::Triangular { mode } => GroundTruth::Triangular {
            lo: item.a,
            hi: item.b,
            mode: *mode,
        },
        GroundTruthEntry::Discrete { points, probs } => {
            let dist = DiscreteDistribution::new(points.clone(), probs.clone())
                .map_err(|e| CliError::Schema(format!("item {index}: {e}")))?;
            GroundTruth::Discrete(dist)
        }
    };
    Ok(truth)
}

/// Reads, parses and validates an instance file. Parse failures map to
/// exit 2, schema failures to exit 3, infeasible moments to exit 4.
pub fn load_instance(path: &std::path::Path) -> Result<LoadedInstance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: InstanceFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => {
            return Err(if e.is_syntax() || e.is_eof() || e.is_io() {
                CliError::Parse(format!("{}: {e}", path.display()))
            } else {
                CliError::Schema(format!("{}: {e}", path.display()))
            });
        }
    };
    if file.version != SCHEMA_VERSION {
        return Err(CliError::Schema(format!(
            "unsupported instance version `{}` (expected `{SCHEMA_VERSION}`)",
            file.version
        )));
    }
    if file.items.is_empty() {
        return Err(CliError::Schema("instance has no items".into()));
    }

    let mut items = Vec::with_capacity(file.items.len());
    let mut violations = Vec::new();
    for (i, entry) in file.items.iter().enumerate() {
        let econ = match ItemEconomics::new(entry.c, entry.m, entry.d) {
            Ok(e) => e,
            Err(e) => {
                return Err(CliError::Schema(format!("item {i}: {e}")));
            }
        };
        let mut spec = MomentSpec::new(entry.a, entry.mu, entry.b, entry.mad);
        if let Some(beta) = entry.beta {
            spec = spec.with_beta(beta);
        }
        if let Some(sigma) = entry.sigma {
            spec = spec.with_sigma(sigma);
        }
        let report = spec.validate();
        if !report.is_ok() {
            for v in &report.violations {
                violations.push(format!("item {i}: {v}"));
            }
        }
        items.push(Item::new(econ, spec));
    }
    if !violations.is_empty() {
        return Err(CliError::InfeasibleMoments(violations));
    }
    Ok(LoadedInstance { file, items })
}
