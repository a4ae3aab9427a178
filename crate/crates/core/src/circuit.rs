//! Symbolic parameterized circuit representation.
//!
//! Gate angles are affine expressions `c0 + Σ c_k·θ_k` over the trainable
//! parameter vector. Basis translation shifts angles by constants and the
//! optimizer merges rotation chains by adding expressions, so the parameter
//! set of a compiled circuit is exactly the parameter set of its source.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version tag written into serialized circuit documents.
pub const CIRCUIT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("binding arity mismatch: circuit has {expected} parameters, got {got}")]
    BindingArity { expected: usize, got: usize },
    #[error("instruction {index}: {kind} expects {expected} qubit(s), got {got}")]
    QubitArity {
        index: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("instruction {index}: qubit {qubit} out of range for width {width}")]
    QubitOutOfRange {
        index: usize,
        qubit: usize,
        width: usize,
    },
    #[error("instruction {index}: repeated qubit {qubit}")]
    DuplicateQubit { index: usize, qubit: usize },
    #[error("instruction {index}: {kind} expects {expected} parameter(s), got {got}")]
    ParamArity {
        index: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("instruction {index}: parameter index {param} out of range for {count} parameters")]
    ParamOutOfRange {
        index: usize,
        param: usize,
        count: usize,
    },
    #[error("parameter {0} is declared but never used")]
    DeadParameter(usize),
    #[error("invalid parameter expression: {0}")]
    InvalidExpr(String),
    #[error("unsupported circuit format version {0}")]
    Version(u32),
    #[error("unknown gate kind {0:?}")]
    UnknownGate(String),
    #[error("malformed circuit document: {0}")]
    Json(String),
}

/// Affine angle expression `constant + Σ coeff·θ[index]`.
///
/// Terms are kept sorted by parameter index, with unique indices and nonzero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamExpr {
    constant: f64,
    terms: Vec<(usize, f64)>,
}

impl ParamExpr {
    pub fn constant(value: f64) -> Self {
        Self {
            constant: value,
            terms: Vec::new(),
        }
    }

    /// The bare parameter `θ[index]`.
    pub fn param(index: usize) -> Self {
        Self {
            constant: 0.0,
            terms: vec![(index, 1.0)],
        }
    }

    /// Builds an expression from arbitrary terms, summing repeated indices and
    /// dropping zero coefficients.
    pub fn new(constant: f64, terms: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (index, coeff) in terms {
            *acc.entry(index).or_insert(0.0) += coeff;
        }
        Self {
            constant,
            terms: acc.into_iter().filter(|&(_, c)| c != 0.0).collect(),
        }
    }

    /// Strict constructor used when reading documents: rejects repeated
    /// indices and zero coefficients instead of normalising them.
    pub fn try_new(constant: f64, terms: Vec<(usize, f64)>) -> Result<Self, CircuitError> {
        if !constant.is_finite() {
            return Err(CircuitError::InvalidExpr("non-finite constant".into()));
        }
        let mut seen = BTreeSet::new();
        for &(index, coeff) in &terms {
            if coeff == 0.0 || !coeff.is_finite() {
                return Err(CircuitError::InvalidExpr(format!(
                    "coefficient of θ{index} must be finite and nonzero"
                )));
            }
            if !seen.insert(index) {
                return Err(CircuitError::InvalidExpr(format!("θ{index} repeated")));
            }
        }
        Ok(Self::new(constant, terms))
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, theta: &[f64]) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(k, c)| acc + c * theta[k])
    }

    /// Same expression with `delta` added to the constant.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            constant: self.constant + delta,
            terms: self.terms.clone(),
        }
    }

    pub fn add(&self, other: &ParamExpr) -> Self {
        Self::new(
            self.constant + other.constant,
            self.terms.iter().chain(other.terms.iter()).copied(),
        )
    }

    pub fn param_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|&(k, _)| k)
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if self.constant != 0.0 || self.terms.is_empty() {
            write!(f, "{}", self.constant)?;
            wrote = true;
        }
        for &(k, c) in &self.terms {
            if wrote {
                f.write_str(" + ")?;
            }
            if c == 1.0 {
                write!(f, "θ{k}")?;
            } else {
                write!(f, "{c}·θ{k}")?;
            }
            wrote = true;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    SX,
    X,
    H,
    CX,
    CZ,
    SWAP,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::SX,
        GateKind::X,
        GateKind::H,
        GateKind::CX,
        GateKind::CZ,
        GateKind::SWAP,
    ];

    /// Gate kinds executable on the hardware target.
    pub const NATIVE: [GateKind; 4] = [GateKind::CX, GateKind::RZ, GateKind::SX, GateKind::X];

    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            _ => 0,
        }
    }

    pub fn is_native(self) -> bool {
        Self::NATIVE.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::SX => "SX",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub param: Option<ParamExpr>,
}

impl Instruction {
    pub fn new(kind: GateKind, qubits: Vec<usize>, param: Option<ParamExpr>) -> Self {
        Self {
            kind,
            qubits,
            param,
        }
    }

    pub fn one(kind: GateKind, q: usize) -> Self {
        Self::new(kind, vec![q], None)
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Self::new(kind, vec![a, b], None)
    }

    pub fn rotation(kind: GateKind, q: usize, angle: ParamExpr) -> Self {
        Self::new(kind, vec![q], Some(angle))
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    pub fn with_qubits(&self, qubits: Vec<usize>) -> Self {
        Self {
            kind: self.kind,
            qubits,
            param: self.param.clone(),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(p) = &self.param {
            write!(f, "({p})")?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}

/// An ordered gate list over `num_qubits` wires with `param_count` trainable
/// parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    param_count: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    /// Validating constructor. Checks qubit and parameter arities, ranges,
    /// distinct operands and that every declared parameter is used.
    pub fn new(
        num_qubits: usize,
        param_count: usize,
        instructions: Vec<Instruction>,
    ) -> Result<Self, CircuitError> {
        let mut used = vec![false; param_count];
        for (index, inst) in instructions.iter().enumerate() {
            let kind = inst.kind;
            if inst.qubits.len() != kind.num_qubits() {
                return Err(CircuitError::QubitArity {
                    index,
                    kind,
                    expected: kind.num_qubits(),
                    got: inst.qubits.len(),
                });
            }
            for (pos, &q) in inst.qubits.iter().enumerate() {
                if q >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        qubit: q,
                        width: num_qubits,
                    });
                }
                if inst.qubits[..pos].contains(&q) {
                    return Err(CircuitError::DuplicateQubit { index, qubit: q });
                }
            }
            let got = usize::from(inst.param.is_some());
            if got != kind.num_params() {
                return Err(CircuitError::ParamArity {
                    index,
                    kind,
                    expected: kind.num_params(),
                    got,
                });
            }
            if let Some(expr) = &inst.param {
                for k in expr.param_indices() {
                    if k >= param_count {
                        return Err(CircuitError::ParamOutOfRange {
                            index,
                            param: k,
                            count: param_count,
                        });
                    }
                    used[k] = true;
                }
            }
        }
        if let Some(dead) = used.iter().position(|u| !u) {
            return Err(CircuitError::DeadParameter(dead));
        }
        Ok(Self {
            num_qubits,
            param_count,
            instructions,
        })
    }

    /// Constructor for internal passes whose output is valid by construction.
    pub(crate) fn new_unchecked(
        num_qubits: usize,
        param_count: usize,
        instructions: Vec<Instruction>,
    ) -> Self {
        debug_assert!(Self::new(num_qubits, param_count, instructions.clone()).is_ok());
        Self {
            num_qubits,
            param_count,
            instructions,
        }
    }

    pub fn empty(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            param_count: 0,
            instructions: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Longest chain of instructions that share qubits, every gate weighted 1.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for inst in &self.instructions {
            let next = inst.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in &inst.qubits {
                level[q] = next;
            }
            depth = depth.max(next);
        }
        depth
    }

    /// Replaces every angle expression by its value at `theta`.
    ///
    /// The bound circuit declares zero parameters.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit, CircuitError> {
        if theta.len() != self.param_count {
            return Err(CircuitError::BindingArity {
                expected: self.param_count,
                got: theta.len(),
            });
        }
        let instructions = self
            .instructions
            .iter()
            .map(|inst| Instruction {
                kind: inst.kind,
                qubits: inst.qubits.clone(),
                param: inst
                    .param
                    .as_ref()
                    .map(|e| ParamExpr::constant(e.evaluate(theta))),
            })
            .collect();
        Ok(Circuit {
            num_qubits: self.num_qubits,
            param_count: 0,
            instructions,
        })
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for inst in &self.instructions {
            *counts.by_kind.entry(inst.kind).or_insert(0) += 1;
            if inst.is_two_qubit() {
                counts.two_qubit += 1;
            }
        }
        counts
    }

    pub fn two_qubit_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.is_two_qubit()).count()
    }

    /// Wires touched by at least one instruction.
    pub fn active_qubits(&self) -> BTreeSet<usize> {
        self.instructions
            .iter()
            .flat_map(|i| i.qubits.iter().copied())
            .collect()
    }

    /// Distinct parameter indices referenced by the instructions.
    pub fn used_params(&self) -> BTreeSet<usize> {
        self.instructions
            .iter()
            .filter_map(|i| i.param.as_ref())
            .flat_map(|e| e.param_indices())
            .collect()
    }

    /// Instructions in reverse order; used by bidirectional layout search.
    pub fn reversed(&self) -> Circuit {
        let mut instructions = self.instructions.clone();
        instructions.reverse();
        Circuit {
            num_qubits: self.num_qubits,
            param_count: self.param_count,
            instructions,
        }
    }

    /// Appends `other` (same width) after `self`, taking the larger parameter
    /// count.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        let mut instructions = self.instructions.clone();
        instructions.extend(other.instructions.iter().cloned());
        Circuit::new(
            self.num_qubits.max(other.num_qubits),
            self.param_count.max(other.param_count),
            instructions,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitDoc::from(self)).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Circuit, CircuitError> {
        let doc: CircuitDoc =
            serde_json::from_str(text).map_err(|e| CircuitError::Json(e.to_string()))?;
        doc.try_into()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "circuit: {} qubits, {} parameters, {} instructions",
            self.num_qubits,
            self.param_count,
            self.instructions.len()
        )?;
        for inst in &self.instructions {
            writeln!(f, "  {inst}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub by_kind: BTreeMap<GateKind, usize>,
    pub two_qubit: usize,
}

impl GateCounts {
    pub fn get(&self, kind: GateKind) -> usize {
        self.by_kind.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.by_kind.values().sum()
    }
}

// Wire format.

#[derive(Debug, Serialize, Deserialize)]
struct CircuitDoc {
    version: u32,
    num_qubits: usize,
    param_count: usize,
    instructions: Vec<InstructionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstructionDoc {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default)]
    params: Vec<ExprDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExprDoc {
    constant: f64,
    #[serde(default)]
    terms: Vec<(usize, f64)>,
}

impl From<&Circuit> for CircuitDoc {
    fn from(c: &Circuit) -> Self {
        CircuitDoc {
            version: CIRCUIT_FORMAT_VERSION,
            num_qubits: c.num_qubits,
            param_count: c.param_count,
            instructions: c
                .instructions
                .iter()
                .map(|i| InstructionDoc {
                    kind: i.kind.name().to_string(),
                    qubits: i.qubits.clone(),
                    params: i
                        .param
                        .iter()
                        .map(|e| ExprDoc {
                            constant: e.constant,
                            terms: e.terms.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = CircuitError;

    fn try_from(doc: CircuitDoc) -> Result<Self, Self::Error> {
        if doc.version != CIRCUIT_FORMAT_VERSION {
            return Err(CircuitError::Version(doc.version));
        }
        let mut instructions = Vec::with_capacity(doc.instructions.len());
        for (index, i) in doc.instructions.into_iter().enumerate() {
            let kind = GateKind::from_name(&i.kind).ok_or(CircuitError::UnknownGate(i.kind))?;
            if i.params.len() > 1 {
                return Err(CircuitError::ParamArity {
                    index,
                    kind,
                    expected: kind.num_params(),
                    got: i.params.len(),
                });
            }
            let param = i
                .params
                .into_iter()
                .next()
                .map(|e| ParamExpr::try_new(e.constant, e.terms))
                .transpose()?;
            instructions.push(Instruction::new(kind, i.qubits, param));
        }
        Circuit::new(doc.num_qubits, doc.param_count, instructions)
    }
}
