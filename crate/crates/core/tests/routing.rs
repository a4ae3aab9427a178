mod common;

use common::strategies;
use pqc_core::transpiler::{sabre_layout_and_route, RoutingResult};
use pqc_core::{
    sabre_layout, sabre_route, simulate, Circuit, CouplingMap, GateKind, Instruction, Layout,
    ParamExpr, SabreConfig, Statevector, Target,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All injective maps of `k` items into `0..m`.
fn injections(k: usize, m: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for prefix in injections(k - 1, m) {
        for p in (0..m).filter(|p| !prefix.contains(p)) {
            let mut v = prefix.clone();
            v.push(p);
            out.push(v);
        }
    }
    out
}

fn cx(a: usize, b: usize) -> Instruction {
    Instruction::two(GateKind::CX, a, b)
}

fn path(m: usize) -> Target {
    Target::new("path", CouplingMap::path(m).unwrap())
}

/// Logical circuit relabelled onto physical wires via `layout`.
fn embedded(circuit: &Circuit, layout: &Layout) -> Circuit {
    let insts = circuit
        .instructions()
        .iter()
        .map(|i| i.with_qubits(i.qubits.iter().map(|&q| layout.physical(q)).collect()))
        .collect();
    Circuit::new(layout.num_physical(), circuit.param_count(), insts).unwrap()
}

fn assert_composed_action(circuit: &Circuit, routed: &RoutingResult, theta: &[f64]) {
    let direct = simulate(&embedded(circuit, &routed.initial_layout), theta).unwrap();
    let expected: Statevector = direct.permute_wires(&routed.output_permutation);
    let got = simulate(&routed.circuit, theta).unwrap();
    let d = common::phase_aligned_distance(expected.amplitudes(), got.amplitudes());
    assert!(d < 1e-10, "composed action deviates by {d}");
}

fn assert_on_edges(routed: &Circuit, target: &Target) {
    for inst in routed.instructions().iter().filter(|i| i.is_two_qubit()) {
        assert!(
            target.coupling().contains_edge(inst.qubits[0], inst.qubits[1]),
            "{inst:?} is not on an edge"
        );
    }
}

#[test]
fn brute_force_zero_swap_layout_is_found() {
    let c = Circuit::new(2, 0, vec![cx(0, 1)]).unwrap();
    let t = path(4);
    let zero_swap: Vec<Vec<usize>> = injections(2, 4)
        .into_iter()
        .filter(|l| {
            let layout = Layout::new(l.clone(), 4).unwrap();
            sabre_route(&c, &t, &layout, &SabreConfig::default()).unwrap().swap_count == 0
        })
        .collect();
    assert!(!zero_swap.is_empty());
    for seed in 0..20 {
        let layout = sabre_layout(&c, &t, seed, &SabreConfig::default()).unwrap();
        assert!(zero_swap.contains(&layout.logical_to_physical().to_vec()));
        assert_eq!(layout, sabre_layout(&c, &t, seed, &SabreConfig::default()).unwrap());
    }
}

#[test]
fn distance_two_gate_needs_exactly_one_swap() {
    let c = Circuit::new(3, 0, vec![cx(0, 2)]).unwrap();
    let t = path(3);
    let routed = sabre_route(&c, &t, &Layout::trivial(3, 3).unwrap(), &SabreConfig::default()).unwrap();
    // Any single edge swap makes 0 and 2 adjacent; none can do with zero.
    assert_eq!(routed.swap_count, 1);
    assert_eq!(routed.circuit.len(), 2);
    let moved: Vec<usize> = (0..3).filter(|&p| routed.output_permutation[p] != p).collect();
    assert_eq!(moved.len(), 2);
    assert_composed_action(&c, &routed, &[]);
}

#[test]
fn parameter_free_layout_is_the_seeded_start() {
    let c = Circuit::new(
        3,
        1,
        vec![Instruction::rotation(GateKind::RY, 2, ParamExpr::param(0))],
    )
    .unwrap();
    let t = path(5);
    let layout = sabre_layout(&c, &t, 42, &SabreConfig::default()).unwrap();
    assert_eq!(layout, Layout::random_connected(3, t.coupling(), 42).unwrap());
}

#[test]
fn ansatz_routing_composed_action() {
    let t = Target::new("ring5", CouplingMap::ring(5).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for family in pqc_core::AnsatzFamily::ALL {
        for n in 2..=4 {
            let c = pqc_core::build_ansatz(family, n, 2).unwrap();
            for seed in 0..3 {
                let (_, routed) = sabre_layout_and_route(&c, &t, seed, &SabreConfig::default()).unwrap();
                assert_on_edges(&routed.circuit, &t);
                for _ in 0..3 {
                    let theta = common::random_theta(c.param_count(), &mut rng);
                    assert_composed_action(&c, &routed, &theta);
                }
            }
        }
    }
}

fn sparse_target() -> impl Strategy<Value = Target> {
    (3usize..=6, prop::collection::vec((0usize..6, 0usize..6), 0..6)).prop_map(|(m, extra)| {
        let mut edges: Vec<(usize, usize)> = (0..m - 1).map(|i| (i, i + 1)).collect();
        edges.extend(extra.into_iter().map(|(a, b)| (a % m, b % m)).filter(|(a, b)| a != b));
        Target::new("random", CouplingMap::new(m, edges).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn routing_respects_edges_and_tracks_permutation(
        (c, theta) in strategies::circuit(&GateKind::ALL, 4, 20).prop_flat_map(strategies::with_theta),
        target in sparse_target(),
        seed in any::<u64>(),
    ) {
        prop_assume!(c.num_qubits() <= target.num_qubits());
        let layout = Layout::random(c.num_qubits(), target.num_qubits(), seed).unwrap();
        let routed = sabre_route(&c, &target, &layout, &SabreConfig::default()).unwrap();
        assert_on_edges(&routed.circuit, &target);
        prop_assert_eq!(routed.circuit.len(), c.len() + routed.swap_count);
        assert_composed_action(&c, &routed, &theta);
    }

    #[test]
    fn distances_satisfy_triangle_inequality(target in sparse_target()) {
        let d = target.distances();
        let m = target.num_qubits();
        for u in 0..m {
            prop_assert_eq!(d.get(u, u), 0);
            for v in 0..m {
                prop_assert_eq!(d.get(u, v), d.get(v, u));
                prop_assert_eq!(d.get(u, v) == 1, target.coupling().contains_edge(u, v));
                for w in 0..m {
                    prop_assert!(d.get(u, w) <= d.get(u, v) + d.get(v, w));
                }
            }
        }
    }
}
