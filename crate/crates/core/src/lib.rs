//! Compilation and analysis toolkit for parameterized quantum circuits.
//!
//! Builds layered ansatz circuits, compiles them for a heavy-hex target with
//! a SABRE-routed pipeline, and measures how compilation shifts
//! expressibility (fidelity-histogram KL divergence against Haar) and
//! trainability (parameter-shift gradient variance).

pub mod ansatz;
pub mod circuit;
pub mod harness;
pub mod metrics;
pub mod sim;
pub mod target;
pub mod transpiler;

pub use ansatz::{build_ansatz, param_count, AnsatzError, AnsatzFamily};
pub use circuit::{Circuit, CircuitError, GateCounts, GateKind, Instruction, ParamExpr};
pub use harness::{
    export_heatmap, run_sweep, run_sweep_on, CellKey, CellMean, Heatmap, HeatmapMetric, SweepConfig,
    SweepError, SweepResult,
};
pub use metrics::{
    expressibility_kl, gradient_variance, haar_bin_mass, kl_divergence, overheads,
    parameter_shift_gradient, CircuitMetrics, ExpressibilityConfig, MetricRecord, MetricsError,
    TrainabilityConfig, WireMode,
};
pub use sim::{expectation_z, fidelity, simulate, SimError, Statevector};
pub use target::{heavy_hex_map, load_target, CouplingMap, DistanceMatrix, Target, TargetError};
pub use transpiler::{
    compact_qubits, optimize, output_wire_of, perfect_layout, sabre_layout, sabre_route, transpile,
    translate_to_basis, CompactionMap, Layout, SabreConfig, TranspileError, TranspileOptions,
    TranspiledCircuit,
};
