//! Trainability as mean per-parameter gradient variance of `⟨Z⟩` on one wire.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expressibility::uniform_angles;
use super::MetricsError;
use crate::circuit::Circuit;
use crate::harness::seed::mix;
use crate::sim::{SimError, Statevector};

pub const DEFAULT_GRAD_SAMPLES: usize = 100;

/// Which wire of a transpiled circuit carries the measured observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireMode {
    /// The wire holding logical qubit 0 after layout, routing and compaction.
    #[default]
    Tracked,
    /// Compacted wire 0, regardless of where logical qubit 0 ended up.
    RawZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainabilityConfig {
    pub n_grad: usize,
    pub seed: u64,
    pub observable_wire_mode: WireMode,
}

impl TrainabilityConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            n_grad: DEFAULT_GRAD_SAMPLES,
            seed,
            observable_wire_mode: WireMode::Tracked,
        }
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.n_grad < 2 {
            return Err(MetricsError::Config(format!(
                "n_grad must be at least 2, got {}",
                self.n_grad
            )));
        }
        Ok(())
    }
}

/// `⟨Z_wire⟩` of the circuit at `theta`.
pub fn cost(circuit: &Circuit, theta: &[f64], wire: usize) -> Result<f64, MetricsError> {
    Ok(crate::sim::simulate(circuit, theta)?.expectation_z(wire)?)
}

/// Exact gradient of `⟨Z_wire⟩` by the parameter-shift rule.
///
/// Each rotation occurrence is shifted by ±π/2 at the gate level; its
/// contribution to `∂C/∂θ_k` is scaled by the coefficient of `θ_k` in the
/// gate's angle expression and summed over occurrences.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    theta: &[f64],
    wire: usize,
) -> Result<Vec<f64>, MetricsError> {
    if theta.len() != circuit.param_count() {
        return Err(SimError::ParamLength {
            expected: circuit.param_count(),
            got: theta.len(),
        }
        .into());
    }
    if wire >= circuit.num_qubits() {
        return Err(SimError::WireOutOfRange {
            wire,
            width: circuit.num_qubits(),
        }
        .into());
    }
    let insts = circuit.instructions();
    let mut grad = vec![0.0; circuit.param_count()];
    let mut prefix = Statevector::zero(circuit.num_qubits())?;
    for (k, inst) in insts.iter().enumerate() {
        if let Some(expr) = inst.param.as_ref().filter(|e| !e.is_constant()) {
            let angle = expr.evaluate(theta);
            let shifted = |delta: f64| -> Result<f64, SimError> {
                let mut s = prefix.clone();
                s.apply_gate(inst.kind, &inst.qubits, angle + delta);
                for rest in &insts[k + 1..] {
                    s.apply(rest, theta);
                }
                s.expectation_z(wire)
            };
            let gate_grad = 0.5 * (shifted(FRAC_PI_2)? - shifted(-FRAC_PI_2)?);
            for &(index, coeff) in expr.terms() {
                grad[index] += coeff * gate_grad;
            }
        }
        prefix.apply(inst, theta);
    }
    Ok(grad)
}

/// Gradients at `n_grad` uniform parameter draws; draw `i` uses a generator
/// seeded with `mix(seed) ^ i`.
pub fn sample_gradients(
    circuit: &Circuit,
    cfg: &TrainabilityConfig,
    wire: usize,
) -> Result<Vec<Vec<f64>>, MetricsError> {
    let p = circuit.param_count();
    let base = mix(cfg.seed);
    (0..cfg.n_grad)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(base ^ i as u64);
            let theta = uniform_angles(&mut rng, p);
            parameter_shift_gradient(circuit, &theta, wire)
        })
        .collect()
}

/// Mean over parameters of the unbiased (N−1) sample variance of each
/// gradient component.
pub fn mean_component_variance(samples: &[Vec<f64>]) -> f64 {
    let n = samples.len() as f64;
    let p = samples.first().map_or(0, Vec::len);
    if p == 0 {
        return 0.0;
    }
    let total: f64 = (0..p)
        .map(|k| {
            let mean = samples.iter().map(|g| g[k]).sum::<f64>() / n;
            samples.iter().map(|g| (g[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        })
        .sum();
    total / p as f64
}

pub fn gradient_variance(circuit: &Circuit, cfg: &TrainabilityConfig, wire: usize) -> Result<f64, MetricsError> {
    cfg.validate()?;
    if circuit.param_count() == 0 {
        return Err(MetricsError::Degenerate);
    }
    let samples = sample_gradients(circuit, cfg, wire)?;
    Ok(mean_component_variance(&samples))
}
