//! Expressibility and trainability estimators and the transpiled-minus-logical
//! overheads built from them.

pub mod expressibility;
pub mod trainability;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::SimError;

pub use expressibility::{
    expressibility_kl, fidelity_histogram, haar_bin_mass, haar_histogram, kl_divergence,
    kl_from_fidelities, sample_fidelities, ExpressibilityConfig,
};
pub use trainability::{
    gradient_variance, parameter_shift_gradient, sample_gradients, TrainabilityConfig, WireMode,
};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("histogram bin counts differ: {0} vs {1}")]
    BinMismatch(usize, usize),
    #[error("circuit has no trainable parameters")]
    Degenerate,
    #[error("sampler configurations differ between logical and transpiled metrics")]
    SamplerMismatch,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Sampler settings that must agree for two metric values to be comparable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSignature {
    pub n_pairs: usize,
    pub bins: usize,
    pub epsilon: f64,
    pub expressibility_seed: u64,
    pub n_grad: usize,
    pub trainability_seed: u64,
}

impl SamplerSignature {
    pub fn new(expr: &ExpressibilityConfig, train: &TrainabilityConfig) -> Self {
        Self {
            n_pairs: expr.n_pairs,
            bins: expr.bins,
            epsilon: expr.epsilon,
            expressibility_seed: expr.seed,
            n_grad: train.n_grad,
            trainability_seed: train.seed,
        }
    }
}

/// Expressibility and trainability of one circuit under one sampler setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub e_kl: f64,
    pub gradvar: f64,
    pub sampler: SamplerSignature,
}

/// `(ΔE_KL, ΔGradVar)` = transpiled − logical.
///
/// Positive ΔE_KL means reduced expressibility; positive ΔGradVar means
/// improved trainability.
pub fn overheads(logical: &CircuitMetrics, transpiled: &CircuitMetrics) -> Result<(f64, f64), MetricsError> {
    if logical.sampler != transpiled.sampler {
        return Err(MetricsError::SamplerMismatch);
    }
    Ok((
        transpiled.e_kl - logical.e_kl,
        transpiled.gradvar - logical.gradvar,
    ))
}

/// One sweep cell for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub family: crate::ansatz::AnsatzFamily,
    pub n_logical: usize,
    pub reps: usize,
    pub opt_level: u8,
    pub run_index: usize,
    pub e_kl_logical: f64,
    pub e_kl_transpiled: f64,
    pub delta_e_kl: f64,
    pub gradvar_logical: f64,
    pub gradvar_transpiled: f64,
    pub delta_gradvar: f64,
    pub depth_logical: usize,
    pub depth_transpiled: usize,
    pub qubits_transpiled: usize,
}
