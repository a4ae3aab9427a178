//! Sweep orchestration over (family, n, L, opt_level, run) cells.
//!
//! Each cell builds the logical ansatz, transpiles it once (or once per run
//! with `vary_transpile_seed`), and evaluates both circuits with identical
//! sampler seeds so the overheads compare like with like. Cells run in
//! parallel; results are always reported in canonical cell order.

mod output;
pub mod seed;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ansatz::{build_ansatz, AnsatzError, AnsatzFamily};
use crate::circuit::Circuit;
use crate::metrics::{
    expressibility, expressibility_kl, gradient_variance, overheads, CircuitMetrics,
    ExpressibilityConfig, MetricRecord, MetricsError, SamplerSignature, TrainabilityConfig,
    WireMode,
};
use crate::target::{load_target, Target, TargetError};
use crate::transpiler::{transpile, TranspileError, TranspileOptions, TranspiledCircuit};

pub use output::{
    export_heatmap, heatmap_from_means, heatmap_on_grid, read_records_csv, write_outputs, write_records_csv,
    Heatmap, HeatmapMetric, Metadata, CSV_HEADER,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error(transparent)]
    Transpile(#[from] TranspileError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("no results for family {family} at opt level {opt_level}{detail}")]
    MissingSlice {
        family: AnsatzFamily,
        opt_level: u8,
        detail: String,
    },
    #[error("malformed records file: {0}")]
    Records(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Hilbert dimension used for the Haar reference of each circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarReference {
    /// `2^width` of the circuit being measured (m for transpiled, n for logical).
    #[default]
    ActiveQubits,
    /// `2^n` for both circuits.
    LogicalQubits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpressibilitySettings {
    pub n_pairs: usize,
    pub bins: usize,
    pub epsilon: f64,
    pub haar_reference: HaarReference,
}

impl Default for ExpressibilitySettings {
    fn default() -> Self {
        Self {
            n_pairs: expressibility::DEFAULT_PAIRS,
            bins: expressibility::DEFAULT_BINS,
            epsilon: expressibility::DEFAULT_EPSILON,
            haar_reference: HaarReference::ActiveQubits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainabilitySettings {
    pub n_grad: usize,
}

impl Default for TrainabilitySettings {
    fn default() -> Self {
        Self {
            n_grad: crate::metrics::trainability::DEFAULT_GRAD_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub families: Vec<AnsatzFamily>,
    pub n_values: Vec<usize>,
    pub l_values: Vec<usize>,
    pub opt_levels: Vec<u8>,
    pub runs: usize,
    pub base_seed: u64,
    pub expressibility: ExpressibilitySettings,
    pub trainability: TrainabilitySettings,
    /// Coupling-map JSON; the bundled 65-qubit heavy-hex map when absent.
    pub target: Option<PathBuf>,
    pub wire_mode: WireMode,
    pub output_dir: Option<PathBuf>,
    /// Derive a fresh transpiler seed for every run instead of one per cell.
    pub vary_transpile_seed: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            families: AnsatzFamily::ALL.to_vec(),
            n_values: vec![2, 4, 6, 8, 10],
            l_values: vec![2, 4, 6, 8, 10],
            opt_levels: vec![0, 1, 2, 3],
            runs: 5,
            base_seed: 0,
            expressibility: ExpressibilitySettings::default(),
            trainability: TrainabilitySettings::default(),
            target: None,
            wire_mode: WireMode::Tracked,
            output_dir: None,
            vary_transpile_seed: false,
        }
    }
}

/// Identity of one sweep cell, excluding the run index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub family: AnsatzFamily,
    pub n: usize,
    pub reps: usize,
    pub opt_level: u8,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SweepError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |m: &str| Err(SweepError::Config(m.to_string()));
        if self.families.is_empty() {
            return fail("families must not be empty");
        }
        if self.n_values.is_empty() {
            return fail("n_values must not be empty");
        }
        if self.l_values.is_empty() {
            return fail("l_values must not be empty");
        }
        if self.opt_levels.is_empty() {
            return fail("opt_levels must not be empty");
        }
        if self.runs == 0 {
            return fail("runs must be at least 1");
        }
        if let Some(&k) = self.opt_levels.iter().find(|&&k| k > 3) {
            return Err(SweepError::Config(format!("opt level {k} out of range 0..=3")));
        }
        self.expressibility_config(2, 0).validate()?;
        self.trainability_config(0).validate()?;
        Ok(())
    }

    /// Cells in canonical order: families as listed, then ascending n, L and
    /// opt level. Duplicate list entries collapse.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut keys = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let sorted = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut opts = self.opt_levels.clone();
        opts.sort_unstable();
        opts.dedup();
        for &family in &self.families {
            if !seen.insert(family) {
                continue;
            }
            for &n in &sorted(&self.n_values) {
                for &reps in &sorted(&self.l_values) {
                    for &opt_level in &opts {
                        keys.push(CellKey {
                            family,
                            n,
                            reps,
                            opt_level,
                        });
                    }
                }
            }
        }
        keys
    }

    fn expressibility_config(&self, haar_qubits: usize, seed: u64) -> ExpressibilityConfig {
        ExpressibilityConfig {
            n_pairs: self.expressibility.n_pairs,
            bins: self.expressibility.bins,
            epsilon: self.expressibility.epsilon,
            seed,
            haar_dimension_qubits: haar_qubits,
        }
    }

    fn trainability_config(&self, seed: u64) -> TrainabilityConfig {
        TrainabilityConfig {
            n_grad: self.trainability.n_grad,
            seed,
            observable_wire_mode: self.wire_mode,
        }
    }

    pub fn load_target(&self) -> Result<Target, SweepError> {
        Ok(match &self.target {
            Some(path) => load_target(path)?,
            None => Target::default_heavy_hex(),
        })
    }
}

/// Per-cell means over runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMean {
    pub key: CellKey,
    pub e_kl_logical: f64,
    pub e_kl_transpiled: f64,
    pub delta_e_kl: f64,
    pub gradvar_logical: f64,
    pub gradvar_transpiled: f64,
    pub delta_gradvar: f64,
    pub depth_logical: f64,
    pub depth_transpiled: f64,
    pub qubits_transpiled: f64,
}

impl CellMean {
    pub fn from_runs(key: CellKey, runs: &[MetricRecord]) -> Self {
        let m = runs.len() as f64;
        let mean = |f: &dyn Fn(&MetricRecord) -> f64| runs.iter().map(f).sum::<f64>() / m;
        Self {
            key,
            e_kl_logical: mean(&|r| r.e_kl_logical),
            e_kl_transpiled: mean(&|r| r.e_kl_transpiled),
            delta_e_kl: mean(&|r| r.delta_e_kl),
            gradvar_logical: mean(&|r| r.gradvar_logical),
            gradvar_transpiled: mean(&|r| r.gradvar_transpiled),
            delta_gradvar: mean(&|r| r.delta_gradvar),
            depth_logical: mean(&|r| r.depth_logical as f64),
            depth_transpiled: mean(&|r| r.depth_transpiled as f64),
            qubits_transpiled: mean(&|r| r.qubits_transpiled as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub key: CellKey,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub target_name: String,
    pub target_qubits: usize,
    /// Run records in canonical cell order, runs ascending within a cell.
    pub records: Vec<MetricRecord>,
    pub means: Vec<CellMean>,
    pub failures: Vec<CellFailure>,
    pub wall_clock_seconds: f64,
}

impl SweepResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Logical and transpiled metrics of one run of a cell, with sampler seeds
/// derived from `(base_seed, key, run)`.
pub fn evaluate_run(
    key: CellKey,
    run: usize,
    logical: &Circuit,
    transpiled: &TranspiledCircuit,
    cfg: &SweepConfig,
) -> Result<MetricRecord, SweepError> {
    let cell = seed::cell_seed(cfg.base_seed, key.family, key.n, key.reps, key.opt_level, run);
    let expr_seed = seed::stream(cell, seed::EXPRESSIBILITY_STREAM);
    let train = cfg.trainability_config(seed::stream(cell, seed::TRAINABILITY_STREAM));

    let m = transpiled.active_qubit_count();
    let (haar_logical, haar_transpiled) = match cfg.expressibility.haar_reference {
        HaarReference::ActiveQubits => (logical.num_qubits(), m),
        HaarReference::LogicalQubits => (logical.num_qubits(), logical.num_qubits()),
    };
    let expr_logical = cfg.expressibility_config(haar_logical, expr_seed);
    let expr_transpiled = cfg.expressibility_config(haar_transpiled, expr_seed);
    let wire = match cfg.wire_mode {
        WireMode::Tracked => transpiled.output_wire_of(0)?,
        WireMode::RawZero => 0,
    };

    let logical_metrics = CircuitMetrics {
        e_kl: expressibility_kl(logical, &expr_logical)?,
        gradvar: gradient_variance(logical, &train, 0)?,
        sampler: SamplerSignature::new(&expr_logical, &train),
    };
    let transpiled_metrics = CircuitMetrics {
        e_kl: expressibility_kl(&transpiled.circuit, &expr_transpiled)?,
        gradvar: gradient_variance(&transpiled.circuit, &train, wire)?,
        sampler: SamplerSignature::new(&expr_logical, &train),
    };
    let (delta_e_kl, delta_gradvar) = overheads(&logical_metrics, &transpiled_metrics)?;
    Ok(MetricRecord {
        family: key.family,
        n_logical: key.n,
        reps: key.reps,
        opt_level: key.opt_level,
        run_index: run,
        e_kl_logical: logical_metrics.e_kl,
        e_kl_transpiled: transpiled_metrics.e_kl,
        delta_e_kl,
        gradvar_logical: logical_metrics.gradvar,
        gradvar_transpiled: transpiled_metrics.gradvar,
        delta_gradvar,
        depth_logical: logical.depth(),
        depth_transpiled: transpiled.circuit.depth(),
        qubits_transpiled: m,
    })
}

pub fn transpile_cell(
    key: CellKey,
    run: Option<usize>,
    logical: &Circuit,
    target: &Target,
    cfg: &SweepConfig,
) -> Result<TranspiledCircuit, SweepError> {
    let seed = match run {
        Some(r) => seed::cell_seed(cfg.base_seed, key.family, key.n, key.reps, key.opt_level, r),
        None => seed::transpile_seed(cfg.base_seed, key.family, key.n, key.reps, key.opt_level),
    };
    Ok(transpile(logical, target, &TranspileOptions::new(key.opt_level, seed)?)?)
}

/// All runs of one cell.
pub fn run_cell(key: CellKey, target: &Target, cfg: &SweepConfig) -> Result<Vec<MetricRecord>, SweepError> {
    let logical = build_ansatz(key.family, key.n, key.reps)?;
    let shared = if cfg.vary_transpile_seed {
        None
    } else {
        Some(transpile_cell(key, None, &logical, target, cfg)?)
    };
    (0..cfg.runs)
        .into_par_iter()
        .map(|run| match &shared {
            Some(t) => evaluate_run(key, run, &logical, t, cfg),
            None => {
                let t = transpile_cell(key, Some(run), &logical, target, cfg)?;
                evaluate_run(key, run, &logical, &t, cfg)
            }
        })
        .collect()
}

/// Runs the sweep on the target named in `cfg`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let target = cfg.load_target()?;
    run_sweep_on(cfg, &target)
}

/// Runs the sweep on an explicit target. A failing cell is recorded in
/// `failures` and the remaining cells still run.
pub fn run_sweep_on(cfg: &SweepConfig, target: &Target) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let start = Instant::now();
    let keys = cfg.cells();
    let outcomes: Vec<Result<Vec<MetricRecord>, SweepError>> = keys
        .par_iter()
        .map(|&key| run_cell(key, target, cfg))
        .collect();

    let mut records = Vec::new();
    let mut means = Vec::new();
    let mut failures = Vec::new();
    for (key, outcome) in keys.into_iter().zip(outcomes) {
        match outcome {
            Ok(runs) => {
                means.push(CellMean::from_runs(key, &runs));
                records.extend(runs);
            }
            Err(e) => failures.push(CellFailure {
                key,
                reason: e.to_string(),
            }),
        }
    }
    Ok(SweepResult {
        config: cfg.clone(),
        target_name: target.name().to_string(),
        target_qubits: target.num_qubits(),
        records,
        means,
        failures,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
