//! Expressibility as KL divergence between the circuit's pairwise-fidelity
//! histogram and the Haar fidelity law `P(F) = (d−1)(1−F)^(d−2)`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::circuit::Circuit;
use crate::harness::seed::mix;
use crate::sim::{fidelity, simulate};

pub const DEFAULT_PAIRS: usize = 2000;
pub const DEFAULT_BINS: usize = 75;
pub const DEFAULT_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpressibilityConfig {
    pub n_pairs: usize,
    pub bins: usize,
    pub epsilon: f64,
    pub seed: u64,
    /// Haar reference dimension is `2^haar_dimension_qubits`.
    pub haar_dimension_qubits: usize,
}

impl ExpressibilityConfig {
    pub fn new(haar_dimension_qubits: usize, seed: u64) -> Self {
        Self {
            n_pairs: DEFAULT_PAIRS,
            bins: DEFAULT_BINS,
            epsilon: DEFAULT_EPSILON,
            seed,
            haar_dimension_qubits,
        }
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.n_pairs < 100 {
            return Err(MetricsError::Config(format!(
                "n_pairs must be at least 100, got {}",
                self.n_pairs
            )));
        }
        if self.bins < 2 {
            return Err(MetricsError::Config(format!(
                "bins must be at least 2, got {}",
                self.bins
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(MetricsError::Config("epsilon must be positive".into()));
        }
        if self.haar_dimension_qubits == 0 || self.haar_dimension_qubits > 63 {
            return Err(MetricsError::Config(format!(
                "haar dimension qubits must be in 1..=63, got {}",
                self.haar_dimension_qubits
            )));
        }
        Ok(())
    }
}

/// Haar probability mass of fidelities in `[lo, hi]` for Hilbert dimension `d`:
/// `(1−lo)^(d−1) − (1−hi)^(d−1)`.
pub fn haar_bin_mass(lo: f64, hi: f64, d: u64) -> Result<f64, MetricsError> {
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(MetricsError::Domain(format!(
            "bin [{lo}, {hi}] must satisfy 0 ≤ lo < hi ≤ 1"
        )));
    }
    if d < 2 {
        return Err(MetricsError::Domain(format!("dimension must be ≥ 2, got {d}")));
    }
    let k = (d - 1) as f64;
    let tail = |x: f64| if x >= 1.0 { 0.0 } else { (k * (-x).ln_1p()).exp() };
    Ok(tail(lo) - tail(hi))
}

/// Haar masses of `bins` uniform bins on [0, 1].
pub fn haar_histogram(bins: usize, haar_qubits: usize) -> Result<Vec<f64>, MetricsError> {
    if haar_qubits == 0 || haar_qubits > 63 {
        return Err(MetricsError::Domain(format!(
            "haar dimension qubits must be in 1..=63, got {haar_qubits}"
        )));
    }
    let d = 1u64 << haar_qubits;
    (0..bins)
        .map(|b| haar_bin_mass(b as f64 / bins as f64, (b + 1) as f64 / bins as f64, d))
        .collect()
}

/// Counts of fidelities falling in `bins` uniform bins on [0, 1]; F = 1 goes
/// to the last bin.
pub fn fidelity_histogram(fidelities: &[f64], bins: usize) -> Vec<f64> {
    let mut counts = vec![0.0; bins];
    for &f in fidelities {
        let b = ((f * bins as f64).floor() as usize).min(bins - 1);
        counts[b] += 1.0;
    }
    counts
}

/// `Σ p̂ ln(p̂/q̂)` after adding `epsilon` to every cell of both histograms and
/// normalizing each to unit sum.
pub fn kl_divergence(p: &[f64], q: &[f64], epsilon: f64) -> Result<f64, MetricsError> {
    if p.len() != q.len() {
        return Err(MetricsError::BinMismatch(p.len(), q.len()));
    }
    if p.iter().chain(q).any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(MetricsError::Domain("histogram cells must be finite and nonnegative".into()));
    }
    let normalize = |h: &[f64]| {
        let total: f64 = h.iter().map(|x| x + epsilon).sum();
        h.iter().map(|x| (x + epsilon) / total).collect::<Vec<_>>()
    };
    let (p, q) = (normalize(p), normalize(q));
    Ok(p.iter()
        .zip(&q)
        .filter(|(&pb, _)| pb > 0.0)
        .map(|(&pb, &qb)| pb * (pb / qb).ln())
        .sum())
}

/// Uniform draw from `[0, 2π)^count`.
pub(crate) fn uniform_angles<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random::<f64>() * TAU).collect()
}

/// Fidelities of `n_pairs` independent parameter pairs. Pair `i` draws from a
/// generator seeded with `mix(seed) ^ i`, so the result does not depend on
/// scheduling.
pub fn sample_fidelities(circuit: &Circuit, n_pairs: usize, seed: u64) -> Result<Vec<f64>, MetricsError> {
    let p = circuit.param_count();
    if p == 0 {
        return Err(MetricsError::Degenerate);
    }
    let base = mix(seed);
    (0..n_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(base ^ i as u64);
            let a = uniform_angles(&mut rng, p);
            let b = uniform_angles(&mut rng, p);
            let sa = simulate(circuit, &a)?;
            let sb = simulate(circuit, &b)?;
            Ok(fidelity(&sa, &sb)?)
        })
        .collect()
}

/// KL divergence of a fidelity sample against the Haar reference in `cfg`.
pub fn kl_from_fidelities(fidelities: &[f64], cfg: &ExpressibilityConfig) -> Result<f64, MetricsError> {
    let p = fidelity_histogram(fidelities, cfg.bins);
    let q = haar_histogram(cfg.bins, cfg.haar_dimension_qubits)?;
    kl_divergence(&p, &q, cfg.epsilon)
}

/// Expressibility of `circuit`; lower is closer to Haar.
pub fn expressibility_kl(circuit: &Circuit, cfg: &ExpressibilityConfig) -> Result<f64, MetricsError> {
    cfg.validate()?;
    let fids = sample_fidelities(circuit, cfg.n_pairs, cfg.seed)?;
    kl_from_fidelities(&fids, cfg)
}
