//! Rewrites into the native basis {CX, RZ, SX, X}.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, GateKind, Instruction, ParamExpr};

fn rz(q: usize, e: ParamExpr) -> Instruction {
    Instruction::rotation(GateKind::RZ, q, e)
}

fn sx(q: usize) -> Instruction {
    Instruction::one(GateKind::SX, q)
}

fn push_h(out: &mut Vec<Instruction>, q: usize) {
    out.push(rz(q, ParamExpr::constant(FRAC_PI_2)));
    out.push(sx(q));
    out.push(rz(q, ParamExpr::constant(FRAC_PI_2)));
}

/// Expands one instruction into native gates, equal up to global phase.
pub fn expand_instruction(inst: &Instruction, out: &mut Vec<Instruction>) {
    let q = &inst.qubits;
    match inst.kind {
        GateKind::CX | GateKind::RZ | GateKind::SX | GateKind::X => out.push(inst.clone()),
        GateKind::H => push_h(out, q[0]),
        // RY(e) ≅ RZ(π)·SX·RZ(e+π)·SX
        GateKind::RY => {
            let e = inst.param.as_ref().expect("RY carries an angle");
            out.push(sx(q[0]));
            out.push(rz(q[0], e.shifted(PI)));
            out.push(sx(q[0]));
            out.push(rz(q[0], ParamExpr::constant(PI)));
        }
        // RX(e) ≅ RZ(π/2)·SX·RZ(e+π)·SX·RZ(π/2)
        GateKind::RX => {
            let e = inst.param.as_ref().expect("RX carries an angle");
            out.push(rz(q[0], ParamExpr::constant(FRAC_PI_2)));
            out.push(sx(q[0]));
            out.push(rz(q[0], e.shifted(PI)));
            out.push(sx(q[0]));
            out.push(rz(q[0], ParamExpr::constant(FRAC_PI_2)));
        }
        GateKind::CZ => {
            push_h(out, q[1]);
            out.push(Instruction::two(GateKind::CX, q[0], q[1]));
            push_h(out, q[1]);
        }
        GateKind::SWAP => {
            out.push(Instruction::two(GateKind::CX, q[0], q[1]));
            out.push(Instruction::two(GateKind::CX, q[1], q[0]));
            out.push(Instruction::two(GateKind::CX, q[0], q[1]));
        }
    }
}

/// Basis translation; width, parameter indices and parameter count are kept.
pub fn translate_to_basis(circuit: &Circuit) -> Circuit {
    let mut out = Vec::with_capacity(circuit.len() * 3);
    for inst in circuit.instructions() {
        expand_instruction(inst, &mut out);
    }
    Circuit::new_unchecked(circuit.num_qubits(), circuit.param_count(), out)
}
