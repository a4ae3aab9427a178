//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the amplitude index (little-endian). Gates are
//! applied in place by striding over amplitude pairs; no full unitary is ever
//! formed.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Instruction};

/// Largest width `simulate` accepts.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{0} qubits exceeds the simulator cap of {MAX_QUBITS}")]
    Capacity(usize),
    #[error("expected {expected} parameters, got {got}")]
    ParamLength { expected: usize, got: usize },
    #[error("width mismatch: {0} vs {1} qubits")]
    WidthMismatch(usize, usize),
    #[error("wire {wire} out of range for {width} qubits")]
    WireOutOfRange { wire: usize, width: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
}

type Matrix2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2×2 unitary of a single-qubit gate at the given angle.
pub fn single_qubit_matrix(kind: GateKind, angle: f64) -> Matrix2 {
    let (s, co) = (angle / 2.0).sin_cos();
    match kind {
        GateKind::RX => [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]],
        GateKind::RY => [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
        GateKind::RZ => [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]],
        GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::H => [
            [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        ],
        GateKind::CX | GateKind::CZ | GateKind::SWAP => {
            panic!("{kind} is not a single-qubit gate")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `num_qubits` wires.
    pub fn zero(num_qubits: usize) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::Capacity(num_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector, checking its length and norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(SimError::Capacity(num_qubits));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Haar-random pure state: normalized vector of i.i.d. complex Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::Capacity(num_qubits));
        }
        let mut amplitudes: Vec<Complex64> = (0..1usize << num_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_single(&mut self, q: usize, m: &Matrix2) {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn apply_rz(&mut self, q: usize, angle: f64) {
        let (s, co) = (angle / 2.0).sin_cos();
        let (p0, p1) = (c(co, -s), c(co, s));
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.iter_mut().for_each(|a| *a *= p0);
            hi.iter_mut().for_each(|a| *a *= p1);
        }
    }

    fn apply_x(&mut self, q: usize) {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amplitudes.swap(i, i | tm);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (am, bm) = (1usize << a, 1usize << b);
        for i in 0..self.amplitudes.len() {
            if i & am != 0 && i & bm == 0 {
                self.amplitudes.swap(i, (i & !am) | bm);
            }
        }
    }

    /// Applies one gate with an already-evaluated angle (ignored for fixed gates).
    pub fn apply_gate(&mut self, kind: GateKind, qubits: &[usize], angle: f64) {
        match kind {
            GateKind::RZ => self.apply_rz(qubits[0], angle),
            GateKind::X => self.apply_x(qubits[0]),
            GateKind::CX => self.apply_cx(qubits[0], qubits[1]),
            GateKind::CZ => self.apply_cz(qubits[0], qubits[1]),
            GateKind::SWAP => self.apply_swap(qubits[0], qubits[1]),
            _ => self.apply_single(qubits[0], &single_qubit_matrix(kind, angle)),
        }
    }

    /// Applies an instruction, evaluating its angle at `theta`.
    pub fn apply(&mut self, inst: &Instruction, theta: &[f64]) {
        let angle = inst.param.as_ref().map_or(0.0, |e| e.evaluate(theta));
        self.apply_gate(inst.kind, &inst.qubits, angle);
    }

    /// `⟨Z⟩` on `wire`: `Σ ±|a_i|²` with sign from bit `wire` of `i`.
    pub fn expectation_z(&self, wire: usize) -> Result<f64, SimError> {
        if wire >= self.num_qubits {
            return Err(SimError::WireOutOfRange {
                wire,
                width: self.num_qubits,
            });
        }
        let mask = 1usize << wire;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & mask == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    /// Probability that `wire` reads 1.
    pub fn probability_one(&self, wire: usize) -> Result<f64, SimError> {
        if wire >= self.num_qubits {
            return Err(SimError::WireOutOfRange {
                wire,
                width: self.num_qubits,
            });
        }
        let mask = 1usize << wire;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn inner(&self, other: &Statevector) -> Result<Complex64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::WidthMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Relabels wires: the qubit on wire `q` moves to wire `perm[q]`.
    pub fn permute_wires(&self, perm: &[usize]) -> Statevector {
        assert_eq!(perm.len(), self.num_qubits);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let j = perm
                .iter()
                .enumerate()
                .filter(|&(q, _)| i >> q & 1 == 1)
                .fold(0usize, |acc, (_, &p)| acc | 1 << p);
            out[j] = *a;
        }
        Statevector {
            num_qubits: self.num_qubits,
            amplitudes: out,
        }
    }
}

/// Runs `circuit` bound at `theta` on `|0…0⟩`.
pub fn simulate(circuit: &Circuit, theta: &[f64]) -> Result<Statevector, SimError> {
    if theta.len() != circuit.param_count() {
        return Err(SimError::ParamLength {
            expected: circuit.param_count(),
            got: theta.len(),
        });
    }
    let mut state = Statevector::zero(circuit.num_qubits())?;
    for inst in circuit.instructions() {
        state.apply(inst, theta);
    }
    Ok(state)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64, SimError> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

pub fn expectation_z(state: &Statevector, wire: usize) -> Result<f64, SimError> {
    state.expectation_z(wire)
}
