//! Hardware-aware compilation: layout, SABRE routing, basis translation,
//! level-dependent optimization and idle-qubit compaction.
//!
//! Pipelines by optimization level:
//!
//! | level | layout            | trials | optimization |
//! |-------|-------------------|--------|--------------|
//! | 0     | trivial           | 1      | none         |
//! | 1     | perfect, or SABRE | 1      | peephole     |
//! | 2     | perfect, or SABRE | 5      | + commutation-aware CX cancellation |
//! | 3     | perfect, or SABRE | 10     | level 2 iterated to a fixpoint |
//!
//! At levels 1–3 a layout that needs no swaps is used when the interaction
//! graph embeds in the coupling graph (see [`perfect_layout`]); SABRE runs
//! only otherwise. With several SABRE trials, trial `t` uses layout seed
//! `seed ^ t` and the trial with the fewest two-qubit gates after optimization
//! wins (lowest `t` on ties).

mod basis;
mod layout;
mod optimize;
mod perfect;
mod sabre;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use basis::{expand_instruction, translate_to_basis};
pub use layout::Layout;
pub use optimize::optimize;
pub use perfect::{perfect_layout, DEFAULT_SEARCH_LIMIT};
pub use sabre::{sabre_layout, sabre_layout_and_route, sabre_route, RoutingResult, SabreConfig};

use crate::circuit::{Circuit, Instruction};
use crate::target::Target;

#[derive(Debug, Error, PartialEq)]
pub enum TranspileError {
    #[error("circuit needs {logical} qubits but the target has {physical}")]
    Capacity { logical: usize, physical: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("optimization level {0} out of range 0..=3")]
    InvalidLevel(u8),
    #[error("routing trials must be at least 1")]
    NoTrials,
    #[error("logical wire {wire} out of range for {width} logical qubits")]
    WireOutOfRange { wire: usize, width: usize },
    #[error("logical wire {0} is idle and was removed by compaction")]
    IdleWire(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranspileOptions {
    pub opt_level: u8,
    pub seed: u64,
    /// Overrides the level's default trial count.
    pub routing_trials: Option<usize>,
    /// Placement budget for the swap-free layout search at levels 1–3; zero
    /// disables it.
    pub perfect_search_limit: usize,
    pub sabre: SabreConfig,
}

impl TranspileOptions {
    pub fn new(opt_level: u8, seed: u64) -> Result<Self, TranspileError> {
        let opts = Self {
            opt_level,
            seed,
            routing_trials: None,
            perfect_search_limit: DEFAULT_SEARCH_LIMIT,
            sabre: SabreConfig::default(),
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn validate(&self) -> Result<(), TranspileError> {
        if self.opt_level > 3 {
            return Err(TranspileError::InvalidLevel(self.opt_level));
        }
        if self.routing_trials == Some(0) {
            return Err(TranspileError::NoTrials);
        }
        Ok(())
    }

    pub fn trials(&self) -> usize {
        self.routing_trials.unwrap_or(match self.opt_level {
            0 | 1 => 1,
            2 => 5,
            _ => 10,
        })
    }
}

/// Old-wire → new-wire renumbering produced by [`compact_qubits`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactionMap {
    old_to_new: Vec<Option<usize>>,
    new_to_old: Vec<usize>,
}

impl CompactionMap {
    pub fn identity(width: usize) -> Self {
        Self {
            old_to_new: (0..width).map(Some).collect(),
            new_to_old: (0..width).collect(),
        }
    }

    pub fn get(&self, old: usize) -> Option<usize> {
        self.old_to_new.get(old).copied().flatten()
    }

    pub fn original(&self, new: usize) -> usize {
        self.new_to_old[new]
    }

    /// Retained original wires in ascending order.
    pub fn retained(&self) -> &[usize] {
        &self.new_to_old
    }

    pub fn old_width(&self) -> usize {
        self.old_to_new.len()
    }

    pub fn new_width(&self) -> usize {
        self.new_to_old.len()
    }

    /// `(old, new)` pairs in ascending order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.new_to_old.iter().enumerate().map(|(n, &o)| (o, n)).collect()
    }
}

/// Drops wires without instructions and renumbers the rest in ascending order.
pub fn compact_qubits(circuit: &Circuit) -> (Circuit, CompactionMap) {
    let active = circuit.active_qubits();
    let mut old_to_new = vec![None; circuit.num_qubits()];
    let new_to_old: Vec<usize> = active.into_iter().collect();
    for (n, &o) in new_to_old.iter().enumerate() {
        old_to_new[o] = Some(n);
    }
    let instructions = circuit
        .instructions()
        .iter()
        .map(|i| i.with_qubits(i.qubits.iter().map(|&q| old_to_new[q].unwrap()).collect()))
        .collect();
    let compacted = Circuit::new_unchecked(new_to_old.len(), circuit.param_count(), instructions);
    (
        compacted,
        CompactionMap {
            old_to_new,
            new_to_old,
        },
    )
}

/// Result of [`transpile`]: a compacted native-basis circuit plus the
/// bookkeeping needed to relate its wires to the logical circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct TranspiledCircuit {
    pub circuit: Circuit,
    pub initial_layout: Layout,
    /// Physical → physical relabeling accumulated by routing swaps.
    pub output_permutation: Vec<usize>,
    pub compaction: CompactionMap,
    pub opt_level: u8,
    /// Index of the winning routing trial.
    pub trial: usize,
}

impl TranspiledCircuit {
    pub fn active_qubit_count(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn param_count(&self) -> usize {
        self.circuit.param_count()
    }

    /// Compacted wire that carries logical `wire` at the end of the circuit.
    pub fn output_wire_of(&self, wire: usize) -> Result<usize, TranspileError> {
        if wire >= self.initial_layout.num_logical() {
            return Err(TranspileError::WireOutOfRange {
                wire,
                width: self.initial_layout.num_logical(),
            });
        }
        let physical = self.output_permutation[self.initial_layout.physical(wire)];
        self.compaction
            .get(physical)
            .ok_or(TranspileError::IdleWire(wire))
    }

    /// The circuit on uncompacted physical indices, for connectivity checks.
    pub fn physical_circuit(&self) -> Circuit {
        let instructions: Vec<Instruction> = self
            .circuit
            .instructions()
            .iter()
            .map(|i| {
                i.with_qubits(i.qubits.iter().map(|&q| self.compaction.original(q)).collect())
            })
            .collect();
        Circuit::new_unchecked(self.compaction.old_width(), self.circuit.param_count(), instructions)
    }
}

/// Free-function form of [`TranspiledCircuit::output_wire_of`].
pub fn output_wire_of(t: &TranspiledCircuit, logical_wire: usize) -> Result<usize, TranspileError> {
    t.output_wire_of(logical_wire)
}

struct Candidate {
    trial: usize,
    layout: Layout,
    routed: RoutingResult,
    optimized: Circuit,
}

fn run_trial(
    logical: &Circuit,
    target: &Target,
    opts: &TranspileOptions,
    fixed: Option<&Layout>,
    trial: usize,
) -> Result<Candidate, TranspileError> {
    let (layout, routed) = match fixed {
        Some(layout) => {
            let routed = sabre_route(logical, target, layout, &opts.sabre)?;
            (layout.clone(), routed)
        }
        None => sabre_layout_and_route(logical, target, opts.seed ^ trial as u64, &opts.sabre)?,
    };
    let native = translate_to_basis(&routed.circuit);
    let optimized = optimize(&native, opts.opt_level);
    Ok(Candidate {
        trial,
        layout,
        routed,
        optimized,
    })
}

/// Compiles `logical` for `target`. Deterministic in `(logical, target, opts)`.
pub fn transpile(
    logical: &Circuit,
    target: &Target,
    opts: &TranspileOptions,
) -> Result<TranspiledCircuit, TranspileError> {
    opts.validate()?;
    layout::check_capacity(logical.num_qubits(), target.num_qubits())?;
    let fixed = if opts.opt_level == 0 {
        Some(Layout::trivial(logical.num_qubits(), target.num_qubits())?)
    } else if opts.perfect_search_limit > 0 {
        perfect_layout(logical, target, opts.perfect_search_limit)
    } else {
        None
    };
    let trials = if fixed.is_some() { 1 } else { opts.trials() };
    let candidates: Vec<Candidate> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(logical, target, opts, fixed.as_ref(), t))
        .collect::<Result<_, _>>()?;
    let best = candidates
        .into_iter()
        .min_by_key(|c| (c.optimized.two_qubit_count(), c.trial))
        .expect("at least one trial");
    let (circuit, compaction) = compact_qubits(&best.optimized);
    Ok(TranspiledCircuit {
        circuit,
        initial_layout: best.layout,
        output_permutation: best.routed.output_permutation,
        compaction,
        opt_level: opts.opt_level,
        trial: best.trial,
    })
}
