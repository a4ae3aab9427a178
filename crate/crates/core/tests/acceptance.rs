//! Acceptance gate. Each test checks one criterion and writes a single
//! `PASS`/`FAIL` line to stdout, bypassing libtest's output capture so the
//! verdicts appear in every run.

mod common;

use std::io::Write;

use pqc_core::harness::write_records_csv;
use pqc_core::metrics::expressibility::kl_from_fidelities;
use pqc_core::{
    build_ansatz, expressibility_kl, fidelity, gradient_variance, haar_bin_mass, kl_divergence,
    parameter_shift_gradient, run_sweep_on, simulate, transpile, AnsatzFamily, Circuit, CouplingMap,
    ExpressibilityConfig, GateKind, Instruction, ParamExpr, Statevector, SweepConfig, Target,
    TrainabilityConfig, TranspileOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [usize; 5] = [2, 4, 6, 8, 10];

fn verdict(id: u8, name: &str, ok: bool, detail: &str) {
    let line = format!(
        "criterion {id:>2} {:<4} {name}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
    (m, var.sqrt())
}

#[test]
fn c01_semantic_preservation() {
    let target = Target::default_heavy_hex();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst, mut checked) = (0.0f64, 0);
    for family in AnsatzFamily::ALL {
        for n in 2..=4 {
            for reps in 1..=2 {
                let c = build_ansatz(family, n, reps).unwrap();
                for level in 0..=3 {
                    let t = transpile(&c, &target, &TranspileOptions::new(level, rng.random()).unwrap()).unwrap();
                    for _ in 0..5 {
                        let theta = common::random_theta(c.param_count(), &mut rng);
                        let logical = common::oracle_state(&c, &theta);
                        let expected = common::embed_logical(&logical, n, &t);
                        let actual = common::oracle_state(&t.circuit, &theta);
                        worst = worst.max(common::phase_aligned_distance(&expected, &actual));
                        checked += 1;
                    }
                }
            }
        }
    }
    verdict(
        1,
        "semantic preservation",
        worst < 1e-9,
        &format!("{checked} bindings, max amplitude deviation {worst:.2e} (< 1e-9)"),
    );
}

#[test]
fn c02_parameter_preservation() {
    let target = Target::default_heavy_hex();
    let (mut total, mut bad) = (0, Vec::new());
    for family in AnsatzFamily::ALL {
        for n in GRID {
            for reps in GRID {
                let c = build_ansatz(family, n, reps).unwrap();
                for level in 0..=3 {
                    let t = transpile(&c, &target, &TranspileOptions::new(level, 7).unwrap()).unwrap();
                    total += 1;
                    if t.param_count() != c.param_count() || t.circuit.param_count() != c.param_count() {
                        bad.push((family, n, reps, level));
                    }
                }
            }
        }
    }
    verdict(
        2,
        "parameter preservation",
        bad.is_empty(),
        &format!("{} of {total} transpilations changed P {bad:?}", bad.len()),
    );
}

#[test]
fn c03_connectivity_and_basis() {
    let target = Target::default_heavy_hex();
    let (mut gates, mut edge_violations, mut basis_violations) = (0, 0, 0);
    for family in AnsatzFamily::ALL {
        for n in GRID {
            for reps in GRID {
                let c = build_ansatz(family, n, reps).unwrap();
                for level in 0..=3 {
                    let t = transpile(&c, &target, &TranspileOptions::new(level, 7).unwrap()).unwrap();
                    for inst in t.physical_circuit().instructions() {
                        gates += 1;
                        if !target.basis().contains(&inst.kind) {
                            basis_violations += 1;
                        }
                        if inst.is_two_qubit() && !target.coupling().contains_edge(inst.qubits[0], inst.qubits[1]) {
                            edge_violations += 1;
                        }
                    }
                }
            }
        }
    }
    let basis_ok = [GateKind::CX, GateKind::RZ, GateKind::SX, GateKind::X]
        .iter()
        .all(|k| target.basis().contains(k))
        && target.basis().len() == 4;
    verdict(
        3,
        "connectivity and basis compliance",
        basis_ok && edge_violations == 0 && basis_violations == 0,
        &format!("{gates} gates, {edge_violations} off-edge, {basis_violations} outside {{CX, RZ, SX, X}}"),
    );
}

#[test]
fn c04_gradient_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut worst, mut components) = (0.0f64, 0);
    for family in AnsatzFamily::ALL {
        for n in 2..=4 {
            for reps in GRID {
                let c = build_ansatz(family, n, reps).unwrap();
                for _ in 0..3 {
                    let theta = common::random_theta(c.param_count(), &mut rng);
                    let shift = parameter_shift_gradient(&c, &theta, 0).unwrap();
                    let fd = central_difference(&c, &theta, 1e-5);
                    for (a, b) in shift.iter().zip(&fd) {
                        worst = worst.max((a - b).abs());
                        components += 1;
                    }
                }
            }
        }
    }
    verdict(
        4,
        "gradient correctness",
        worst < 1e-6,
        &format!("{components} components, max |shift - central difference| {worst:.2e} (< 1e-6)"),
    );
}

fn central_difference(c: &Circuit, theta: &[f64], h: f64) -> Vec<f64> {
    let z = |t: &[f64]| simulate(c, t).unwrap().expectation_z(0).unwrap();
    (0..theta.len())
        .map(|k| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[k] += h;
            minus[k] -= h;
            (z(&plus) - z(&minus)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn c05_haar_machinery() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut partition_err = 0.0f64;
    for _ in 0..200 {
        let qubits = rng.random_range(1..=20u32);
        let mut edges: Vec<f64> = (0..rng.random_range(0..30)).map(|_| rng.random::<f64>()).collect();
        edges.extend([0.0, 1.0]);
        edges.sort_by(f64::total_cmp);
        let total: f64 = edges
            .windows(2)
            .map(|w| haar_bin_mass(w[0], w[1], 1 << qubits).unwrap())
            .sum();
        partition_err = partition_err.max((total - 1.0).abs());
    }
    let mut self_kl = 0.0f64;
    for _ in 0..50 {
        let p: Vec<f64> = (0..75).map(|_| rng.random::<f64>()).collect();
        self_kl = self_kl.max(kl_divergence(&p, &p, 1e-12).unwrap().abs());
    }
    let fids: Vec<f64> = (0..5000)
        .map(|_| {
            let a = Statevector::haar_random(4, &mut rng).unwrap();
            let b = Statevector::haar_random(4, &mut rng).unwrap();
            fidelity(&a, &b).unwrap()
        })
        .collect();
    let cfg = ExpressibilityConfig {
        n_pairs: 5000,
        ..ExpressibilityConfig::new(4, 0)
    };
    let haar_kl = kl_from_fidelities(&fids, &cfg).unwrap();
    verdict(
        5,
        "Haar machinery",
        partition_err < 1e-12 && self_kl < 1e-12 && haar_kl < 0.05,
        &format!(
            "partition error {partition_err:.1e} (< 1e-12), KL(p||p) {self_kl:.1e} (< 1e-12), Haar self-test KL {haar_kl:.4} (< 0.05)"
        ),
    );
}

#[test]
fn c06_single_rotation_variance() {
    let c = Circuit::new(1, 1, vec![Instruction::rotation(GateKind::RY, 0, ParamExpr::param(0))]).unwrap();
    let cfg = TrainabilityConfig {
        n_grad: 2000,
        ..TrainabilityConfig::new(606)
    };
    let v = gradient_variance(&c, &cfg, 0).unwrap();
    verdict(
        6,
        "single RY gradient variance",
        (v - 0.5).abs() < 0.03,
        &format!("variance {v:.4}, |v - 0.5| {:.4} (< 0.03)", (v - 0.5).abs()),
    );
}

#[test]
fn c07_barren_plateau_trend() {
    let means: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&n| {
            let c = build_ansatz(AnsatzFamily::EfficientSu2Full, n, 6).unwrap();
            let runs: Vec<f64> = (0..5u64)
                .map(|run| gradient_variance(&c, &TrainabilityConfig::new(700 + run), 0).unwrap())
                .collect();
            mean_sd(&runs).0
        })
        .collect();
    verdict(
        7,
        "barren plateau trend",
        means[0] > means[1] && means[1] > means[2],
        &format!(
            "EfficientSU2Full L=6 mean variance n=2 {:.4}, n=4 {:.4}, n=6 {:.5}",
            means[0], means[1], means[2]
        ),
    );
}

#[test]
fn c08_neutrality_at_fixed_width() {
    let families = [AnsatzFamily::MpsBrick, AnsatzFamily::TtnTree];
    let cfg = SweepConfig {
        families: families.to_vec(),
        n_values: vec![4, 6],
        l_values: vec![2, 4],
        opt_levels: vec![0, 1, 2, 3],
        runs: 5,
        base_seed: 808,
        ..SweepConfig::default()
    };
    let result = run_sweep_on(&cfg, &Target::default_heavy_hex()).unwrap();
    let mut outside = Vec::new();
    let (mut max_e, mut max_g) = (0.0f64, 0.0f64);
    for family in families {
        for n in [4, 6] {
            for reps in [2, 4] {
                let c = build_ansatz(family, n, reps).unwrap();
                let (e, g): (Vec<f64>, Vec<f64>) = (0..10u64)
                    .map(|s| {
                        (
                            expressibility_kl(&c, &ExpressibilityConfig::new(n, 8000 + s)).unwrap(),
                            gradient_variance(&c, &TrainabilityConfig::new(9000 + s), 0).unwrap(),
                        )
                    })
                    .unzip();
                let (band_e, band_g) = (3.0 * mean_sd(&e).1, 3.0 * mean_sd(&g).1);
                for r in result
                    .records
                    .iter()
                    .filter(|r| r.family == family && r.n_logical == n && r.reps == reps)
                {
                    max_e = max_e.max(r.delta_e_kl.abs());
                    max_g = max_g.max(r.delta_gradvar.abs());
                    if r.qubits_transpiled != n || r.delta_e_kl.abs() > band_e || r.delta_gradvar.abs() > band_g {
                        outside.push((family, n, reps, r.opt_level, r.run_index));
                    }
                }
            }
        }
    }
    verdict(
        8,
        "transpilation neutrality at fixed width",
        result.is_complete() && result.records.len() == 160 && outside.is_empty(),
        &format!(
            "{} records, max |dE| {max_e:.2e}, max |dGradVar| {max_g:.2e}, outside 3-sigma band: {outside:?}",
            result.records.len()
        ),
    );
}

/// A 7-qubit path whose even positions 0..3 are never adjacent, so the
/// trivial layout of a 4-qubit circuit must route through the gaps.
fn spaced_path() -> Target {
    Target::new(
        "spaced_path7",
        CouplingMap::new(7, [(0, 4), (4, 1), (1, 5), (5, 2), (2, 6), (6, 3)]).unwrap(),
    )
}

#[test]
fn c09_expansion_penalty() {
    let target = spaced_path();
    let c = build_ansatz(AnsatzFamily::HeaRing, 4, 2).unwrap();
    let cfg = SweepConfig {
        families: vec![AnsatzFamily::HeaRing],
        n_values: vec![4],
        l_values: vec![2],
        opt_levels: vec![0],
        runs: 5,
        base_seed: 909,
        ..SweepConfig::default()
    };
    let m = transpile(&c, &target, &TranspileOptions::new(0, 0).unwrap())
        .unwrap()
        .active_qubit_count();
    let result = run_sweep_on(&cfg, &target).unwrap();
    let expanded = result.records.iter().all(|r| r.qubits_transpiled > 4);
    let delta = result.means[0].delta_e_kl;
    verdict(
        9,
        "qubit-expansion expressibility penalty",
        m > 4 && expanded && delta > 0.5,
        &format!("HeaRing n=4 L=2 level 0 on {}: m={m}, mean dE_KL {delta:.3} (> 0.5)", target.name()),
    );
}

#[test]
fn c10_determinism() {
    let cfg = SweepConfig {
        families: vec![AnsatzFamily::HeaRing, AnsatzFamily::MpsBrick],
        n_values: vec![2, 4],
        l_values: vec![2, 4],
        opt_levels: vec![0, 2],
        runs: 2,
        base_seed: 1010,
        ..SweepConfig::default()
    };
    let target = Target::default_heavy_hex();
    let csv = || {
        let mut out = Vec::new();
        write_records_csv(&run_sweep_on(&cfg, &target).unwrap(), &mut out).unwrap();
        out
    };
    let (a, b) = (csv(), csv());
    let rows = a.iter().filter(|&&b| b == b'\n').count();
    verdict(
        10,
        "determinism",
        a == b && rows == 1 + 16 * 3,
        &format!("{rows} CSV lines, {} bytes, identical: {}", a.len(), a == b),
    );
}
