//! Reference implementations used as oracles by the integration tests.
//!
//! Gate matrices are written out independently of the library, and states are
//! propagated by dense full-register matrix-vector products rather than the
//! simulator's stride kernels.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use pqc_core::{simulate, Circuit, GateKind, Statevector, TranspiledCircuit};

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Local gate matrix. For two-qubit gates the local index is
/// `bit(qubits[0]) + 2·bit(qubits[1])`.
pub fn gate_matrix(kind: GateKind, angle: f64) -> Vec<Vec<C>> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::RX => vec![vec![c(cs, 0.0), c(0.0, -sn)], vec![c(0.0, -sn), c(cs, 0.0)]],
        GateKind::RY => vec![vec![c(cs, 0.0), c(-sn, 0.0)], vec![c(sn, 0.0), c(cs, 0.0)]],
        GateKind::RZ => vec![vec![C::from_polar(1.0, -angle / 2.0), z], vec![z, C::from_polar(1.0, angle / 2.0)]],
        GateKind::SX => vec![vec![c(0.5, 0.5), c(0.5, -0.5)], vec![c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::X => vec![vec![z, o], vec![o, z]],
        GateKind::H => vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]],
        // control = qubits[0] (local bit 0), target = qubits[1] (local bit 1)
        GateKind::CX => permutation_matrix(&[0, 3, 2, 1]),
        GateKind::CZ => {
            let mut m = permutation_matrix(&[0, 1, 2, 3]);
            m[3][3] = c(-1.0, 0.0);
            m
        }
        GateKind::SWAP => permutation_matrix(&[0, 2, 1, 3]),
    }
}

/// Matrix sending basis state `j` to `images[j]`.
fn permutation_matrix(images: &[usize]) -> Vec<Vec<C>> {
    let d = images.len();
    let mut m = vec![vec![c(0.0, 0.0); d]; d];
    for (j, &i) in images.iter().enumerate() {
        m[i][j] = c(1.0, 0.0);
    }
    m
}

/// Full-register matrix of a gate on `qubits` within `n` qubits.
pub fn embed(n: usize, qubits: &[usize], local: &[Vec<C>]) -> Vec<Vec<C>> {
    let d = 1 << n;
    let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
    let local_index = |i: usize| {
        qubits
            .iter()
            .enumerate()
            .map(|(k, &q)| ((i >> q) & 1) << k)
            .sum::<usize>()
    };
    let mut m = vec![vec![c(0.0, 0.0); d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i & !mask == j & !mask {
                *cell = local[local_index(i)][local_index(j)];
            }
        }
    }
    m
}

pub fn matvec(m: &[Vec<C>], v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matmul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn angle_of(inst: &pqc_core::Instruction, theta: &[f64]) -> f64 {
    inst.param.as_ref().map_or(0.0, |e| e.evaluate(theta))
}

/// Output state of `circuit` on `|0…0⟩` by dense propagation.
pub fn oracle_state(circuit: &Circuit, theta: &[f64]) -> Vec<C> {
    let n = circuit.num_qubits();
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    for inst in circuit.instructions() {
        let m = embed(n, &inst.qubits, &gate_matrix(inst.kind, angle_of(inst, theta)));
        v = matvec(&m, &v);
    }
    v
}

/// Full unitary of `circuit` as a dense matrix.
pub fn unitary(circuit: &Circuit, theta: &[f64]) -> Vec<Vec<C>> {
    let n = circuit.num_qubits();
    let d = 1 << n;
    let mut u: Vec<Vec<C>> = (0..d)
        .map(|i| (0..d).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    for inst in circuit.instructions() {
        let m = embed(n, &inst.qubits, &gate_matrix(inst.kind, angle_of(inst, theta)));
        u = matmul(&m, &u);
    }
    u
}

/// Largest entrywise deviation between `a` and `b` after aligning `b` to `a`
/// by the global phase that best matches them.
pub fn phase_aligned_distance(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let overlap: C = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max)
}

pub fn matrix_phase_distance(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let fa: Vec<C> = a.iter().flatten().copied().collect();
    let fb: Vec<C> = b.iter().flatten().copied().collect();
    phase_aligned_distance(&fa, &fb)
}

/// The state a faithful transpilation must produce: the logical amplitudes
/// placed on each logical qubit's output wire, with every other wire in `|0⟩`.
pub fn embed_logical(logical: &[C], n: usize, t: &TranspiledCircuit) -> Vec<C> {
    let m = t.active_qubit_count();
    let wires: Vec<usize> = (0..n).map(|l| t.output_wire_of(l).unwrap()).collect();
    let mut out = vec![c(0.0, 0.0); 1 << m];
    for (idx, amp) in logical.iter().enumerate() {
        let b: usize = (0..n).map(|l| ((idx >> l) & 1) << wires[l]).sum();
        out[b] = *amp;
    }
    out
}

/// Max deviation between the transpiled output state and the logical state
/// carried onto the tracked output wires.
pub fn transpiled_deviation(logical: &Circuit, t: &TranspiledCircuit, theta: &[f64]) -> f64 {
    let psi = simulate(logical, theta).unwrap();
    let phi = simulate(&t.circuit, theta).unwrap();
    let expected = embed_logical(psi.amplitudes(), logical.num_qubits(), t);
    phase_aligned_distance(&expected, phi.amplitudes())
}

/// ⟨Z_wire⟩ by direct evaluation of the oracle state.
pub fn oracle_z(circuit: &Circuit, theta: &[f64], wire: usize) -> f64 {
    oracle_state(circuit, theta)
        .iter()
        .enumerate()
        .map(|(i, a)| if (i >> wire) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

/// Central finite difference of ⟨Z_wire⟩.
pub fn finite_difference_gradient(circuit: &Circuit, theta: &[f64], wire: usize, h: f64) -> Vec<f64> {
    (0..theta.len())
        .map(|k| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[k] += h;
            minus[k] -= h;
            (oracle_z(circuit, &plus, wire) - oracle_z(circuit, &minus, wire)) / (2.0 * h)
        })
        .collect()
}

/// Exact binned KL of a single-qubit `RY(θ)|0⟩` ensemble against Haar at d = 2.
///
/// For independent uniform angles, `F = cos²((θ−θ′)/2)` follows the arcsine
/// law with CDF `(2/π)·asin(√F)`; Haar at d = 2 is uniform on [0, 1].
pub fn single_ry_exact_kl(bins: usize) -> f64 {
    let cdf = |f: f64| 2.0 / std::f64::consts::PI * f.sqrt().asin();
    (0..bins)
        .map(|b| {
            let (lo, hi) = (b as f64 / bins as f64, (b + 1) as f64 / bins as f64);
            let p = cdf(hi) - cdf(lo);
            let q = hi - lo;
            p * (p / q).ln()
        })
        .sum()
}

pub fn random_theta(p: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    (0..p).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect()
}

pub fn state_of(v: Vec<C>) -> Statevector {
    Statevector::from_amplitudes(v).unwrap()
}

pub mod strategies {
    use std::collections::BTreeMap;

    use pqc_core::{Circuit, GateKind, Instruction, ParamExpr};
    use proptest::prelude::*;

    /// (kind, two distinct qubit picks, constant, optional term (index, coeff)).
    type RawGate = (GateKind, usize, usize, f64, Option<(usize, f64)>);

    fn raw_gate(kinds: &'static [GateKind]) -> impl Strategy<Value = RawGate> {
        (
            prop::sample::select(kinds),
            0usize..64,
            1usize..64,
            -4.0f64..4.0,
            prop::option::of((0usize..4, prop::sample::select(vec![1.0, -1.0, 0.5, 2.0]))),
        )
    }

    /// Assembles a circuit, renumbering referenced parameters densely so none
    /// is dead.
    fn assemble(n: usize, raw: Vec<RawGate>) -> Circuit {
        let mut renumber = BTreeMap::new();
        let mut insts = Vec::new();
        for (kind, a, off, constant, term) in raw {
            let q0 = a % n;
            if kind.num_qubits() == 2 {
                if n < 2 {
                    continue;
                }
                let q1 = (q0 + 1 + off % (n - 1)) % n;
                insts.push(Instruction::two(kind, q0, q1));
            } else if kind.num_params() == 1 {
                let terms: Vec<(usize, f64)> = term
                    .map(|(i, coeff)| {
                        let next = renumber.len();
                        (*renumber.entry(i).or_insert(next), coeff)
                    })
                    .into_iter()
                    .collect();
                insts.push(Instruction::rotation(kind, q0, ParamExpr::new(constant, terms)));
            } else {
                insts.push(Instruction::one(kind, q0));
            }
        }
        Circuit::new(n, renumber.len(), insts).unwrap()
    }

    pub fn circuit(kinds: &'static [GateKind], max_n: usize, max_len: usize) -> impl Strategy<Value = Circuit> {
        (1..=max_n, prop::collection::vec(raw_gate(kinds), 0..=max_len))
            .prop_map(|(n, raw)| assemble(n, raw))
    }

    pub fn with_theta(c: Circuit) -> impl Strategy<Value = (Circuit, Vec<f64>)> {
        let p = c.param_count();
        (Just(c), prop::collection::vec(0.0f64..std::f64::consts::TAU, p))
    }
}
