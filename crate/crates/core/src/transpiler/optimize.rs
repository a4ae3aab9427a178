//! Peephole and commutation-aware simplification of native-basis circuits.
//!
//! Level 1 runs one peephole sweep (inverse-pair cancellation and RZ merging).
//! Level 2 runs the peephole sweep to a fixpoint, then a commutation-aware CX
//! cancellation, then the peephole sweep again. Level 3 repeats level 2 until
//! nothing changes, at most ten times.

use std::f64::consts::{PI, TAU};

use crate::circuit::{Circuit, GateKind, Instruction, ParamExpr};

const MAX_FIXPOINT_ROUNDS: usize = 100;
const MAX_LEVEL3_SWEEPS: usize = 10;

fn is_zero_angle(angle: f64) -> bool {
    let r = angle.rem_euclid(TAU);
    r < 1e-12 || TAU - r < 1e-12
}

/// Folds a constant into (-π, π]; RZ(a + 2π) differs from RZ(a) by a global phase.
fn wrap_constant(e: &ParamExpr) -> ParamExpr {
    let c = e.constant_part();
    let mut w = (c + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w += TAU;
    }
    ParamExpr::new(w, e.terms().iter().copied())
}

/// Whether `merged` still references every parameter of `a` and `b`. Merges
/// that cancel a parameter are skipped so the parameter count is preserved.
fn keeps_parameters(merged: &ParamExpr, a: &ParamExpr, b: &ParamExpr) -> bool {
    a.terms()
        .iter()
        .chain(b.terms())
        .all(|&(i, _)| merged.terms().iter().any(|&(j, _)| i == j))
}

fn is_identity_rz(e: &ParamExpr) -> bool {
    e.is_constant() && is_zero_angle(e.constant_part())
}

/// One left-to-right sweep keeping a per-wire stack of surviving gates.
/// Cancellations cascade: once a pair is removed, the gates it separated
/// become neighbours.
fn peephole(circuit: &Circuit) -> (Circuit, bool) {
    let mut out: Vec<Option<Instruction>> = Vec::with_capacity(circuit.len());
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); circuit.num_qubits()];
    let mut changed = false;

    let top = |stacks: &Vec<Vec<usize>>, q: usize| stacks[q].last().copied();

    for inst in circuit.instructions() {
        let q0 = inst.qubits[0];
        match inst.kind {
            GateKind::CX => {
                let q1 = inst.qubits[1];
                if let (Some(a), Some(b)) = (top(&stacks, q0), top(&stacks, q1)) {
                    if a == b {
                        let prev = out[a].as_ref().unwrap();
                        if prev.kind == GateKind::CX && prev.qubits == inst.qubits {
                            out[a] = None;
                            stacks[q0].pop();
                            stacks[q1].pop();
                            changed = true;
                            continue;
                        }
                    }
                }
            }
            GateKind::X => {
                if let Some(a) = top(&stacks, q0) {
                    if out[a].as_ref().unwrap().kind == GateKind::X {
                        out[a] = None;
                        stacks[q0].pop();
                        changed = true;
                        continue;
                    }
                }
            }
            GateKind::SX => {
                let s = &stacks[q0];
                if s.len() >= 3
                    && s[s.len() - 3..]
                        .iter()
                        .all(|&k| out[k].as_ref().unwrap().kind == GateKind::SX)
                {
                    for _ in 0..3 {
                        let k = stacks[q0].pop().unwrap();
                        out[k] = None;
                    }
                    changed = true;
                    continue;
                }
            }
            GateKind::RZ => {
                let e = inst.param.as_ref().expect("RZ carries an angle");
                if let Some(a) = top(&stacks, q0) {
                    let prev = out[a].as_mut().unwrap();
                    let merged = (prev.kind == GateKind::RZ)
                        .then(|| wrap_constant(&prev.param.as_ref().unwrap().add(e)))
                        .filter(|m| keeps_parameters(m, prev.param.as_ref().unwrap(), e));
                    if let Some(merged) = merged {
                        changed = true;
                        if is_identity_rz(&merged) {
                            out[a] = None;
                            stacks[q0].pop();
                        } else {
                            prev.param = Some(merged);
                        }
                        continue;
                    }
                }
                if is_identity_rz(e) {
                    changed = true;
                    continue;
                }
            }
            _ => {}
        }
        let idx = out.len();
        for &q in &inst.qubits {
            stacks[q].push(idx);
        }
        out.push(Some(inst.clone()));
    }
    let instructions = out.into_iter().flatten().collect();
    (
        Circuit::new_unchecked(circuit.num_qubits(), circuit.param_count(), instructions),
        changed,
    )
}

/// Whether `g` commutes with CX(control, target), for gates touching either wire.
fn commutes_with_cx(g: &Instruction, control: usize, target: usize) -> bool {
    match g.kind {
        GateKind::RZ => g.qubits[0] == control,
        GateKind::X | GateKind::SX => g.qubits[0] == target,
        GateKind::CX => {
            let (c, t) = (g.qubits[0], g.qubits[1]);
            (c == control && t != target && t != control) || (t == target && c != control && c != target)
        }
        _ => false,
    }
}

/// Cancels CX pairs on the same ordered pair whose intervening gates (on the
/// two wires) all commute with that CX.
fn commutative_cancellation(circuit: &Circuit) -> (Circuit, bool) {
    let insts = circuit.instructions();
    let mut removed = vec![false; insts.len()];
    let mut changed = false;
    for i in 0..insts.len() {
        if removed[i] || insts[i].kind != GateKind::CX {
            continue;
        }
        let (c, t) = (insts[i].qubits[0], insts[i].qubits[1]);
        for j in i + 1..insts.len() {
            let g = &insts[j];
            if removed[j] || !(g.acts_on(c) || g.acts_on(t)) {
                continue;
            }
            if g.kind == GateKind::CX && g.qubits == insts[i].qubits {
                removed[i] = true;
                removed[j] = true;
                changed = true;
                break;
            }
            if !commutes_with_cx(g, c, t) {
                break;
            }
        }
    }
    let instructions = insts
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(i, _)| i.clone())
        .collect();
    (
        Circuit::new_unchecked(circuit.num_qubits(), circuit.param_count(), instructions),
        changed,
    )
}

fn peephole_fixpoint(circuit: Circuit) -> (Circuit, bool) {
    let mut current = circuit;
    let mut any = false;
    for _ in 0..MAX_FIXPOINT_ROUNDS {
        let (next, changed) = peephole(&current);
        current = next;
        if !changed {
            break;
        }
        any = true;
    }
    (current, any)
}

fn level2(circuit: Circuit) -> (Circuit, bool) {
    let (c, a) = peephole_fixpoint(circuit);
    let (c, b) = commutative_cancellation(&c);
    let (c, d) = peephole_fixpoint(c);
    (c, a || b || d)
}

/// Simplifies a native-basis circuit. Unitary is preserved up to global phase
/// and no parameter is dropped.
pub fn optimize(circuit: &Circuit, level: u8) -> Circuit {
    match level {
        0 => circuit.clone(),
        1 => peephole(circuit).0,
        2 => level2(circuit.clone()).0,
        _ => {
            let mut current = circuit.clone();
            for _ in 0..MAX_LEVEL3_SWEEPS {
                let (next, changed) = level2(current);
                current = next;
                if !changed {
                    break;
                }
            }
            current
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(a: usize, b: usize) -> Instruction {
        Instruction::two(GateKind::CX, a, b)
    }

    fn rz(q: usize, k: usize) -> Instruction {
        Instruction::rotation(GateKind::RZ, q, ParamExpr::param(k))
    }

    #[test]
    fn inverse_pair_cancels() {
        let c = Circuit::new(2, 0, vec![cx(0, 1), cx(0, 1)]).unwrap();
        assert!(optimize(&c, 1).is_empty());
        assert_eq!(optimize(&c, 0), c);
        // Opposite orientation is not an inverse pair.
        let c = Circuit::new(2, 0, vec![cx(0, 1), cx(1, 0)]).unwrap();
        assert_eq!(optimize(&c, 3).len(), 2);
    }

    #[test]
    fn rz_merge_keeps_both_parameters() {
        let c = Circuit::new(1, 2, vec![rz(0, 0), rz(0, 1)]).unwrap();
        let o = optimize(&c, 1);
        assert_eq!(o.len(), 1);
        assert_eq!(o.param_count(), 2);
        assert_eq!(
            o.instructions()[0].param.as_ref().unwrap().terms(),
            &[(0, 1.0), (1, 1.0)]
        );
    }

    #[test]
    fn cancelling_merge_is_skipped() {
        let neg = Instruction::rotation(GateKind::RZ, 0, ParamExpr::new(0.3, [(0, -1.0)]));
        let c = Circuit::new(1, 1, vec![rz(0, 0), neg]).unwrap();
        for level in 1..=3 {
            assert_eq!(optimize(&c, level), c);
        }
    }

    #[test]
    fn x_and_sx_cycles() {
        let x = Instruction::one(GateKind::X, 0);
        let sx = Instruction::one(GateKind::SX, 0);
        let c = Circuit::new(1, 0, vec![x.clone(), x.clone()]).unwrap();
        assert!(optimize(&c, 1).is_empty());
        let c = Circuit::new(1, 0, vec![sx.clone(); 4]).unwrap();
        assert!(optimize(&c, 1).is_empty());
        let c = Circuit::new(1, 0, vec![sx.clone(); 3]).unwrap();
        assert_eq!(optimize(&c, 3).len(), 3);
    }

    #[test]
    fn constant_rz_chain_vanishes() {
        let rzc = |a: f64| Instruction::rotation(GateKind::RZ, 0, ParamExpr::constant(a));
        let c = Circuit::new(1, 0, vec![rzc(PI), rzc(PI)]).unwrap();
        assert!(optimize(&c, 1).is_empty());
    }

    #[test]
    fn commutation_through_control_rz() {
        let c = Circuit::new(2, 1, vec![cx(0, 1), rz(0, 0), cx(0, 1)]).unwrap();
        assert_eq!(optimize(&c, 1).len(), 3);
        let o = optimize(&c, 2);
        assert_eq!(o.instructions(), &[rz(0, 0)]);
        assert_eq!(o.param_count(), 1);
    }

    #[test]
    fn rz_on_target_blocks() {
        let c = Circuit::new(2, 1, vec![cx(0, 1), rz(1, 0), cx(0, 1)]).unwrap();
        assert_eq!(optimize(&c, 3).len(), 3);
    }

    #[test]
    fn commutation_through_shared_target_cx() {
        let c = Circuit::new(3, 0, vec![cx(0, 2), cx(1, 2), cx(0, 2)]).unwrap();
        assert_eq!(optimize(&c, 2).instructions(), &[cx(1, 2)]);
    }

    #[test]
    fn wrap_constant_range() {
        for c in [-7.0, -PI, 0.0, PI, 3.5 * PI, 100.0] {
            let w = wrap_constant(&ParamExpr::constant(c)).constant_part();
            assert!(w > -PI - 1e-15 && w <= PI + 1e-15);
            assert!(is_zero_angle(w - c));
        }
    }
}
