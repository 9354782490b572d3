//! Replicated attack sweeps over a fixed grid.
//!
//! A sweep generates the grid once, then for every attack kind, attack size
//! and replication draws a fresh attack (seeded from a stable hash of the
//! job coordinates) and runs the cascade on a copy of the pristine grid.
//! Jobs run in parallel; results are always ordered by (kind, x, rep).

use std::fs::File;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{predict_with, AnalyticModel, NumericalError};
use crate::attacks::{sample_attack, AttackError, AttackKind, AttackSpec};
use crate::cascade::{run_cascade, CascadeError, CascadeOptions};
use crate::netgen::{generate_grid, GenerationError, InterdependentGrid, NetworkRecipe};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error(transparent)]
    Numerical(#[from] NumericalError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

fn default_replications() -> usize {
    50
}

/// Sweep description, read from JSON:
///
/// ```json
/// {"comm": {"kind": "scale_free", "n": 10000, "alpha": 2.5, "min_degree": 2, "seed": 1},
///  "power": {"kind": "scale_free", "n": 1000, "seed": 2},
///  "attacks": ["targeted", "random", "mixed"],
///  "x_values": [0, 100, 200],
///  "replications": 50, "base_seed": 7, "output": "out/sweep"}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub comm: NetworkRecipe,
    pub power: NetworkRecipe,
    pub attacks: Vec<AttackKind>,
    pub x_values: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub base_seed: u64,
    /// Output stem; see [`emit_csv`].
    #[serde(default)]
    pub output: String,
    /// Seed for the support links; derived from `base_seed` when absent.
    #[serde(default)]
    pub support_seed: Option<u64>,
    /// Build a new grid for every replication instead of reusing one.
    #[serde(default)]
    pub regenerate_grid: bool,
    #[serde(default)]
    pub cascade: CascadeOptions,
    /// Report a side's fraction as 0 unless its giant holds at least this
    /// fraction of the side's nodes. 0 reports the raw largest component.
    #[serde(default)]
    pub giant_threshold: f64,
    /// Stage-equation variant used by [`compare_analytic`].
    #[serde(default)]
    pub analytic: AnalyticModel,
}

impl ExperimentConfig {
    pub fn new(comm: NetworkRecipe, power: NetworkRecipe) -> Self {
        ExperimentConfig {
            comm,
            power,
            attacks: AttackKind::ALL.to_vec(),
            x_values: vec![0],
            replications: default_replications(),
            base_seed: 0,
            output: String::new(),
            support_seed: None,
            regenerate_grid: false,
            cascade: CascadeOptions::default(),
            giant_threshold: 0.0,
            analytic: AnalyticModel::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::InvalidConfig(msg) => {
                HarnessError::InvalidConfig(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.comm.validate()?;
        self.power.validate()?;
        if self.replications == 0 {
            return Err(HarnessError::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        let n_a = self.comm.node_count();
        if let Some(x) = self.x_values.iter().find(|&&x| x > n_a) {
            return Err(HarnessError::InvalidConfig(format!(
                "x = {x} exceeds the {n_a} comm nodes"
            )));
        }
        if !(0.0..=1.0).contains(&self.giant_threshold) {
            return Err(HarnessError::InvalidConfig(format!(
                "giant_threshold {} is outside [0, 1]",
                self.giant_threshold
            )));
        }
        Ok(())
    }

    pub fn support_seed(&self) -> u64 {
        self.support_seed
            .unwrap_or_else(|| derive_seed(self.base_seed, SUPPORT_TAG, 0, 0))
    }

    /// The grid shared by every replication (or replication `rep`'s grid
    /// when `regenerate_grid` is set).
    pub fn build_grid(&self, rep: Option<usize>) -> Result<InterdependentGrid, HarnessError> {
        match rep {
            Some(rep) if self.regenerate_grid => {
                let r = rep as u64;
                let comm = self
                    .comm
                    .with_seed(derive_seed(self.comm.seed(), GRID_TAG, 0, r));
                let power = self
                    .power
                    .with_seed(derive_seed(self.power.seed(), GRID_TAG, 1, r));
                let support = derive_seed(self.support_seed(), GRID_TAG, 2, r);
                Ok(generate_grid(&comm, &power, support)?)
            }
            _ => Ok(generate_grid(&self.comm, &self.power, self.support_seed())?),
        }
    }
}

const SUPPORT_TAG: u64 = 0x5350;
const GRID_TAG: u64 = 0x4752;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable seed for one job: SplitMix64 chained over the four coordinates.
pub fn derive_seed(base: u64, tag: u64, x: u64, rep: u64) -> u64 {
    let mut h = splitmix64(base);
    h = splitmix64(h ^ tag);
    h = splitmix64(h ^ x);
    splitmix64(h ^ rep)
}

/// Seed of the attack in job `(kind, x, rep)`.
pub fn attack_seed(base: u64, kind: AttackKind, x: usize, rep: usize) -> u64 {
    let tag = match kind {
        AttackKind::Random => 1,
        AttackKind::Targeted => 2,
        AttackKind::Mixed => 3,
    };
    derive_seed(base, tag, x as u64, rep as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub kind: AttackKind,
    pub x: usize,
    pub rep: usize,
    #[serde(rename = "mu_A")]
    pub mu_a: f64,
    #[serde(rename = "mu_B")]
    pub mu_b: f64,
    pub stages: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub kind: AttackKind,
    pub x: usize,
    #[serde(rename = "mean_mu_A")]
    pub mean_mu_a: f64,
    #[serde(rename = "std_mu_A")]
    pub std_mu_a: f64,
    #[serde(rename = "mean_mu_B")]
    pub mean_mu_b: f64,
    #[serde(rename = "std_mu_B")]
    pub std_mu_b: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<RawRow>,
    pub aggregates: Vec<AggregateRow>,
}

impl SweepResult {
    pub fn aggregate_for(&self, kind: AttackKind, x: usize) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| a.kind == kind && a.x == x)
    }
}

fn thresholded(size: usize, base: usize, threshold: f64) -> f64 {
    if (size as f64) < threshold * base as f64 {
        0.0
    } else {
        size as f64 / base as f64
    }
}

/// Runs one attack + cascade on a copy of `pristine`.
fn run_job(
    pristine: &InterdependentGrid,
    config: &ExperimentConfig,
    kind: AttackKind,
    x: usize,
    rep: usize,
) -> Result<RawRow, HarnessError> {
    let mut grid = pristine.clone();
    let spec = AttackSpec::new(kind, x, attack_seed(config.base_seed, kind, x, rep));
    let attack = sample_attack(grid.comm(), &spec)?;
    let trace = run_cascade(&mut grid, &attack.attacked, config.cascade)?;
    Ok(RawRow {
        kind,
        x,
        rep,
        mu_a: thresholded(
            grid.comm().alive_count(),
            grid.comm().node_count(),
            config.giant_threshold,
        ),
        mu_b: thresholded(
            grid.power().alive_count(),
            grid.power().node_count(),
            config.giant_threshold,
        ),
        stages: trace.stages(),
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    config.validate()?;
    let jobs: Vec<(AttackKind, usize, usize)> = config
        .attacks
        .iter()
        .flat_map(|&kind| {
            config
                .x_values
                .iter()
                .flat_map(move |&x| (0..config.replications).map(move |rep| (kind, x, rep)))
        })
        .collect();

    let rows: Vec<RawRow> = if config.regenerate_grid {
        let grids: Vec<InterdependentGrid> = (0..config.replications)
            .into_par_iter()
            .map(|rep| config.build_grid(Some(rep)))
            .collect::<Result<_, _>>()?;
        jobs.par_iter()
            .map(|&(kind, x, rep)| run_job(&grids[rep], config, kind, x, rep))
            .collect::<Result<_, _>>()?
    } else {
        let pristine = config.build_grid(None)?;
        jobs.par_iter()
            .map(|&(kind, x, rep)| run_job(&pristine, config, kind, x, rep))
            .collect::<Result<_, _>>()?
    };

    let aggregates = aggregate(&rows);
    Ok(SweepResult { rows, aggregates })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-(kind, x) mean and sample standard deviation, in first-seen order.
pub fn aggregate(rows: &[RawRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(AttackKind, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.kind, r.x)) {
            keys.push((r.kind, r.x));
        }
    }
    keys.into_iter()
        .map(|(kind, x)| {
            let group: Vec<&RawRow> = rows.iter().filter(|r| r.kind == kind && r.x == x).collect();
            let a: Vec<f64> = group.iter().map(|r| r.mu_a).collect();
            let b: Vec<f64> = group.iter().map(|r| r.mu_b).collect();
            let (mean_mu_a, std_mu_a) = mean_std(&a);
            let (mean_mu_b, std_mu_b) = mean_std(&b);
            AggregateRow {
                kind,
                x,
                mean_mu_a,
                std_mu_a,
                mean_mu_b,
                std_mu_b,
                n: group.len(),
            }
        })
        .collect()
}

pub const RAW_HEADER: [&str; 6] = ["kind", "x", "rep", "mu_A", "mu_B", "stages"];
pub const SUMMARY_HEADER: [&str; 7] = [
    "kind",
    "x",
    "mean_mu_A",
    "std_mu_A",
    "mean_mu_B",
    "std_mu_B",
    "n",
];

/// File names written by [`emit_csv`] for an output stem.
pub fn output_paths(stem: &Path) -> (PathBuf, PathBuf) {
    let name = stem
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    (
        stem.with_file_name(format!("{name}_raw.csv")),
        stem.with_file_name(format!("{name}_summary.csv")),
    )
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(header)
        .map_err(|e| HarnessError::io(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes `<stem>_raw.csv` and `<stem>_summary.csv`, creating parent
/// directories as needed. Returns the two paths.
pub fn emit_csv(result: &SweepResult, stem: &Path) -> Result<(PathBuf, PathBuf), HarnessError> {
    if let Some(parent) = stem.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    let (raw, summary) = output_paths(stem);
    write_rows(&raw, &RAW_HEADER, &result.rows)?;
    write_rows(&summary, &SUMMARY_HEADER, &result.aggregates)?;
    Ok((raw, summary))
}

pub fn read_raw_csv(path: &Path) -> Result<Vec<RawRow>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::io(path, e))
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<AggregateRow>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::io(path, e))
}

/// Simulated versus predicted steady state at one attack size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub kind: AttackKind,
    pub x: usize,
    pub sim_mu_a: f64,
    pub analytic_mu_a: f64,
    pub delta_a: f64,
    pub sim_mu_b: f64,
    pub analytic_mu_b: f64,
    pub delta_b: f64,
}

/// Runs the sweep and sets each simulated mean beside the stage-recursion
/// prediction built from the grid's empirical distributions.
pub fn compare_analytic(config: &ExperimentConfig) -> Result<Vec<ComparisonRow>, HarnessError> {
    if let Some(&kind) = config.attacks.iter().find(|&&k| k == AttackKind::Mixed) {
        return Err(NumericalError::UnsupportedAttack(kind).into());
    }
    let sweep = run_experiment(config)?;
    let grid = config.build_grid(None)?;
    compare_with_sweep(&grid, &sweep, config.analytic)
}

/// Comparison against an existing sweep over `grid`.
pub fn compare_with_sweep(
    grid: &InterdependentGrid,
    sweep: &SweepResult,
    model: AnalyticModel,
) -> Result<Vec<ComparisonRow>, HarnessError> {
    sweep
        .aggregates
        .iter()
        .map(|agg| {
            let p = predict_with(grid, agg.kind, agg.x, model)?;
            Ok(ComparisonRow {
                kind: agg.kind,
                x: agg.x,
                sim_mu_a: agg.mean_mu_a,
                analytic_mu_a: p.steady_mu_a,
                delta_a: (agg.mean_mu_a - p.steady_mu_a).abs(),
                sim_mu_b: agg.mean_mu_b,
                analytic_mu_b: p.steady_mu_b,
                delta_b: (agg.mean_mu_b - p.steady_mu_b).abs(),
            })
        })
        .collect()
}

pub fn write_comparison_csv(rows: &[ComparisonRow], path: &Path) -> Result<(), HarnessError> {
    write_rows(
        path,
        &[
            "kind",
            "x",
            "sim_mu_A",
            "analytic_mu_A",
            "delta_A",
            "sim_mu_B",
            "analytic_mu_B",
            "delta_B",
        ],
        rows,
    )
}
