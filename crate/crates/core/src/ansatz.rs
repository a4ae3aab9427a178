//! Builders for the six layered ansatz families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Instruction, ParamExpr};

#[derive(Debug, Error, PartialEq)]
pub enum AnsatzError {
    #[error("ansatz needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("ansatz needs at least 1 repetition, got {0}")]
    NoRepetitions(usize),
    #[error("unknown ansatz family {0:?}")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    EfficientSu2Full,
    HeaRing,
    TtnTree,
    RealAmplitudesLinear,
    MpsBrick,
    #[serde(rename = "two_local_ryrz_linear")]
    TwoLocalRyRzLinear,
}

impl AnsatzFamily {
    pub const ALL: [AnsatzFamily; 6] = [
        AnsatzFamily::EfficientSu2Full,
        AnsatzFamily::HeaRing,
        AnsatzFamily::TtnTree,
        AnsatzFamily::RealAmplitudesLinear,
        AnsatzFamily::MpsBrick,
        AnsatzFamily::TwoLocalRyRzLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::EfficientSu2Full => "efficient_su2_full",
            AnsatzFamily::HeaRing => "hea_ring",
            AnsatzFamily::TtnTree => "ttn_tree",
            AnsatzFamily::RealAmplitudesLinear => "real_amplitudes_linear",
            AnsatzFamily::MpsBrick => "mps_brick",
            AnsatzFamily::TwoLocalRyRzLinear => "two_local_ryrz_linear",
        }
    }
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzFamily {
    type Err = AnsatzError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| AnsatzError::UnknownFamily(s.to_string()))
    }
}

fn check_dims(n: usize, reps: usize) -> Result<(), AnsatzError> {
    if n < 2 {
        return Err(AnsatzError::TooFewQubits(n));
    }
    if reps < 1 {
        return Err(AnsatzError::NoRepetitions(reps));
    }
    Ok(())
}

/// Closed-form number of trainable parameters.
pub fn param_count(family: AnsatzFamily, n: usize, reps: usize) -> Result<usize, AnsatzError> {
    check_dims(n, reps)?;
    Ok(match family {
        AnsatzFamily::EfficientSu2Full | AnsatzFamily::TwoLocalRyRzLinear => 2 * n * (reps + 1),
        AnsatzFamily::RealAmplitudesLinear => n * (reps + 1),
        AnsatzFamily::HeaRing => 2 * n * reps,
        AnsatzFamily::MpsBrick | AnsatzFamily::TtnTree => 2 * (n - 1) * reps,
    })
}

/// Appends gates while handing out parameter indices in program order.
struct Builder {
    instructions: Vec<Instruction>,
    next_param: usize,
}

impl Builder {
    fn new() -> Self {
        Self {
            instructions: Vec::new(),
            next_param: 0,
        }
    }

    fn rot(&mut self, kind: GateKind, q: usize) {
        let p = ParamExpr::param(self.next_param);
        self.next_param += 1;
        self.instructions.push(Instruction::rotation(kind, q, p));
    }

    fn layer(&mut self, kind: GateKind, n: usize) {
        for q in 0..n {
            self.rot(kind, q);
        }
    }

    fn cx(&mut self, control: usize, target: usize) {
        self.instructions
            .push(Instruction::two(GateKind::CX, control, target));
    }

    fn linear_chain(&mut self, n: usize) {
        for i in 0..n - 1 {
            self.cx(i, i + 1);
        }
    }
}

/// Builds the logical circuit for `family` on `n` qubits with `reps`
/// repetitions of the family's layer. Parameter indices follow program order.
pub fn build_ansatz(family: AnsatzFamily, n: usize, reps: usize) -> Result<Circuit, AnsatzError> {
    check_dims(n, reps)?;
    let mut b = Builder::new();
    match family {
        AnsatzFamily::EfficientSu2Full => {
            for _ in 0..reps {
                b.layer(GateKind::RY, n);
                b.layer(GateKind::RZ, n);
                for i in 0..n {
                    for j in i + 1..n {
                        b.cx(i, j);
                    }
                }
            }
            b.layer(GateKind::RY, n);
            b.layer(GateKind::RZ, n);
        }
        AnsatzFamily::RealAmplitudesLinear => {
            for _ in 0..reps {
                b.layer(GateKind::RY, n);
                b.linear_chain(n);
            }
            b.layer(GateKind::RY, n);
        }
        AnsatzFamily::TwoLocalRyRzLinear => {
            for _ in 0..reps {
                b.layer(GateKind::RY, n);
                b.layer(GateKind::RZ, n);
                b.linear_chain(n);
            }
            b.layer(GateKind::RY, n);
            b.layer(GateKind::RZ, n);
        }
        AnsatzFamily::HeaRing => {
            for _ in 0..reps {
                b.layer(GateKind::RY, n);
                b.layer(GateKind::RZ, n);
                if n == 2 {
                    b.cx(0, 1);
                } else {
                    for i in 0..n {
                        b.cx(i, (i + 1) % n);
                    }
                }
            }
        }
        AnsatzFamily::MpsBrick => {
            for _ in 0..reps {
                for start in [0, 1] {
                    for low in (start..n - 1).step_by(2) {
                        b.rot(GateKind::RY, low);
                        b.rot(GateKind::RY, low + 1);
                        b.cx(low, low + 1);
                    }
                }
            }
        }
        AnsatzFamily::TtnTree => {
            for _ in 0..reps {
                let mut survivors: Vec<usize> = (0..n).collect();
                while survivors.len() > 1 {
                    let mut next = Vec::with_capacity(survivors.len().div_ceil(2));
                    for pair in survivors.chunks(2) {
                        match *pair {
                            [low, high] => {
                                b.rot(GateKind::RY, low);
                                b.rot(GateKind::RY, high);
                                b.cx(high, low);
                                next.push(low);
                            }
                            [single] => next.push(single),
                            _ => unreachable!(),
                        }
                    }
                    survivors = next;
                }
            }
        }
    }
    let p = b.next_param;
    debug_assert_eq!(p, param_count(family, n, reps)?);
    Ok(Circuit::new_unchecked(n, p, b.instructions))
}
