//! SABRE swap routing and bidirectional layout search.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::layout::{check_capacity, Layout};
use super::TranspileError;
use crate::circuit::{Circuit, GateKind, Instruction};
use crate::target::Target;

/// Heuristic constants for swap scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SabreConfig {
    /// Maximum number of two-qubit gates in the lookahead set.
    pub extended_set_size: usize,
    pub lookahead_weight: f64,
    pub decay_increment: f64,
    /// Decay factors reset after this many consecutive swaps.
    pub decay_reset_interval: usize,
    /// Forward-then-backward rounds of the layout search before the final
    /// forward pass.
    pub layout_rounds: usize,
}

impl Default for SabreConfig {
    fn default() -> Self {
        Self {
            extended_set_size: 20,
            lookahead_weight: 0.5,
            decay_increment: 0.001,
            decay_reset_interval: 5,
            layout_rounds: 2,
        }
    }
}

/// A routed circuit on the full physical register.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingResult {
    /// Physical-index circuit; inserted swaps appear as `SWAP` instructions.
    pub circuit: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    /// `output_permutation[p]` is where the content that started on physical
    /// wire `p` ends up.
    pub output_permutation: Vec<usize>,
    pub swap_count: usize,
}

struct Dag {
    successors: Vec<Vec<usize>>,
    predecessor_count: Vec<usize>,
}

impl Dag {
    fn new(circuit: &Circuit) -> Self {
        let n = circuit.len();
        let mut successors = vec![Vec::new(); n];
        let mut predecessor_count = vec![0; n];
        let mut last: Vec<Option<usize>> = vec![None; circuit.num_qubits()];
        for (i, inst) in circuit.instructions().iter().enumerate() {
            let mut preds: Vec<usize> = inst.qubits.iter().filter_map(|&q| last[q]).collect();
            preds.sort_unstable();
            preds.dedup();
            for p in preds {
                successors[p].push(i);
                predecessor_count[i] += 1;
            }
            for &q in &inst.qubits {
                last[q] = Some(i);
            }
        }
        Self {
            successors,
            predecessor_count,
        }
    }
}

struct Router<'a> {
    circuit: &'a Circuit,
    target: &'a Target,
    cfg: &'a SabreConfig,
    dag: Dag,
    initial: &'a Layout,
    remaining: Vec<usize>,
    ready: BTreeSet<usize>,
    front: Vec<usize>,
    /// Physical wire → token (the physical wire the content started on).
    token_at: Vec<usize>,
    /// Token → current physical wire.
    position: Vec<usize>,
    decay: Vec<f64>,
    out: Vec<Instruction>,
    swap_count: usize,
}

impl<'a> Router<'a> {
    fn new(circuit: &'a Circuit, target: &'a Target, layout: &'a Layout, cfg: &'a SabreConfig) -> Self {
        let dag = Dag::new(circuit);
        let m = target.num_qubits();
        let remaining = dag.predecessor_count.clone();
        let ready = remaining
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i)
            .collect();
        Self {
            circuit,
            target,
            cfg,
            dag,
            initial: layout,
            remaining,
            ready,
            front: Vec::new(),
            token_at: (0..m).collect(),
            position: (0..m).collect(),
            decay: vec![1.0; m],
            out: Vec::with_capacity(circuit.len()),
            swap_count: 0,
        }
    }

    #[inline]
    fn phys(&self, logical: usize) -> usize {
        self.position[self.initial.physical(logical)]
    }

    fn gate_endpoints(&self, gate: usize) -> (usize, usize) {
        let q = &self.circuit.instructions()[gate].qubits;
        (self.phys(q[0]), self.phys(q[1]))
    }

    fn executable(&self, gate: usize) -> bool {
        let (a, b) = self.gate_endpoints(gate);
        self.target.coupling().contains_edge(a, b)
    }

    fn emit(&mut self, gate: usize) {
        let inst = &self.circuit.instructions()[gate];
        let qubits = inst.qubits.iter().map(|&q| self.phys(q)).collect();
        self.out.push(inst.with_qubits(qubits));
        for k in 0..self.dag.successors[gate].len() {
            let s = self.dag.successors[gate][k];
            self.remaining[s] -= 1;
            if self.remaining[s] == 0 {
                self.ready.insert(s);
            }
        }
    }

    /// Emits everything currently routable. Returns whether any gate was emitted.
    fn advance(&mut self) -> bool {
        let mut progressed = false;
        loop {
            while let Some(i) = self.ready.pop_first() {
                if !self.circuit.instructions()[i].is_two_qubit() || self.executable(i) {
                    self.emit(i);
                    progressed = true;
                } else {
                    self.front.push(i);
                }
            }
            let (runnable, blocked): (Vec<usize>, Vec<usize>) =
                self.front.iter().partition(|&&g| self.executable(g));
            if runnable.is_empty() {
                break;
            }
            self.front = blocked;
            for g in runnable {
                self.emit(g);
            }
            progressed = true;
        }
        self.front.sort_unstable();
        progressed
    }

    fn apply_swap(&mut self, u: usize, v: usize) {
        self.out.push(Instruction::two(GateKind::SWAP, u, v));
        let (tu, tv) = (self.token_at[u], self.token_at[v]);
        self.token_at.swap(u, v);
        self.position[tu] = v;
        self.position[tv] = u;
        self.swap_count += 1;
    }

    fn undo_swap(&mut self) {
        let last = self.out.pop().expect("swap to undo");
        debug_assert_eq!(last.kind, GateKind::SWAP);
        let (u, v) = (last.qubits[0], last.qubits[1]);
        let (tu, tv) = (self.token_at[u], self.token_at[v]);
        self.token_at.swap(u, v);
        self.position[tu] = v;
        self.position[tv] = u;
        self.swap_count -= 1;
    }

    fn extended_set(&self) -> Vec<usize> {
        let mut seen = vec![false; self.circuit.len()];
        let mut queue: VecDeque<usize> = self.front.iter().copied().collect();
        let mut ext = Vec::new();
        while let Some(g) = queue.pop_front() {
            for &s in &self.dag.successors[g] {
                if seen[s] {
                    continue;
                }
                seen[s] = true;
                if self.circuit.instructions()[s].is_two_qubit() {
                    ext.push(s);
                    if ext.len() >= self.cfg.extended_set_size {
                        return ext;
                    }
                }
                queue.push_back(s);
            }
        }
        ext
    }

    fn choose_swap(&self) -> (usize, usize) {
        let dist = self.target.distances();
        let front: Vec<(usize, usize)> = self.front.iter().map(|&g| self.gate_endpoints(g)).collect();
        let ext: Vec<(usize, usize)> = self
            .extended_set()
            .into_iter()
            .map(|g| self.gate_endpoints(g))
            .collect();
        let mut candidates = BTreeSet::new();
        for &(a, b) in &front {
            for p in [a, b] {
                for &q in self.target.coupling().neighbors(p) {
                    candidates.insert((p.min(q), p.max(q)));
                }
            }
        }
        let cost = |pairs: &[(usize, usize)], u: usize, v: usize| -> f64 {
            let map = |p: usize| {
                if p == u {
                    v
                } else if p == v {
                    u
                } else {
                    p
                }
            };
            pairs
                .iter()
                .map(|&(a, b)| f64::from(dist.get(map(a), map(b))))
                .sum::<f64>()
        };
        let mut best: Option<((usize, usize), f64)> = None;
        for (u, v) in candidates {
            let mut h = cost(&front, u, v) / front.len() as f64;
            if !ext.is_empty() {
                h += self.cfg.lookahead_weight * cost(&ext, u, v) / ext.len() as f64;
            }
            h *= self.decay[u].max(self.decay[v]);
            // Candidates arrive in lexicographic order, so near-ties keep the smallest pair.
            match best {
                Some((_, s)) if h >= s - 1e-12 * s.abs().max(1.0) => {}
                _ => best = Some(((u, v), h)),
            }
        }
        best.expect("front layer has at least one candidate swap").0
    }

    /// Walks the closest blocked gate together along a shortest path.
    fn force_route(&mut self) {
        let dist = self.target.distances();
        let gate = *self
            .front
            .iter()
            .min_by_key(|&&g| {
                let (a, b) = self.gate_endpoints(g);
                (dist.get(a, b), g)
            })
            .expect("nonempty front");
        let (mut a, b) = self.gate_endpoints(gate);
        while dist.get(a, b) > 1 {
            let step = *self
                .target
                .coupling()
                .neighbors(a)
                .iter()
                .find(|&&n| dist.get(n, b) + 1 == dist.get(a, b))
                .expect("shortest path exists");
            self.apply_swap(a.min(step), a.max(step));
            a = step;
        }
    }

    fn run(mut self) -> RoutingResult {
        let limit = 10 * self.target.num_qubits().max(1);
        let mut since_progress = 0usize;
        self.advance();
        while !self.front.is_empty() {
            if since_progress >= limit {
                for _ in 0..since_progress {
                    self.undo_swap();
                }
                self.force_route();
                since_progress = 0;
                self.decay.fill(1.0);
                let progressed = self.advance();
                debug_assert!(progressed);
                continue;
            }
            let (u, v) = self.choose_swap();
            self.apply_swap(u, v);
            since_progress += 1;
            self.decay[u] += self.cfg.decay_increment;
            self.decay[v] += self.cfg.decay_increment;
            if self.advance() {
                since_progress = 0;
                self.decay.fill(1.0);
            } else if self.cfg.decay_reset_interval > 0
                && since_progress % self.cfg.decay_reset_interval == 0
            {
                self.decay.fill(1.0);
            }
        }
        debug_assert!(self.ready.is_empty());
        debug_assert_eq!(self.out.len() - self.swap_count, self.circuit.len());
        let m = self.target.num_qubits();
        let final_l2p = (0..self.initial.num_logical()).map(|l| self.phys(l)).collect();
        RoutingResult {
            circuit: Circuit::new_unchecked(m, self.circuit.param_count(), self.out),
            initial_layout: self.initial.clone(),
            final_layout: Layout::new(final_l2p, m).expect("routing preserves injectivity"),
            output_permutation: self.position,
            swap_count: self.swap_count,
        }
    }
}

/// Routes `circuit` (logical indices) onto `target` starting from `layout`.
///
/// Every emitted two-qubit gate lies on a coupling edge. Swaps are chosen by
/// the front-layer plus lookahead distance score, scaled by per-qubit decay;
/// ties go to the lexicographically smallest physical pair.
pub fn sabre_route(
    circuit: &Circuit,
    target: &Target,
    layout: &Layout,
    cfg: &SabreConfig,
) -> Result<RoutingResult, TranspileError> {
    check_capacity(circuit.num_qubits(), target.num_qubits())?;
    if layout.num_logical() != circuit.num_qubits() || layout.num_physical() != target.num_qubits() {
        return Err(TranspileError::InvalidLayout(format!(
            "layout is {}→{}, circuit/target are {}→{}",
            layout.num_logical(),
            layout.num_physical(),
            circuit.num_qubits(),
            target.num_qubits()
        )));
    }
    Ok(Router::new(circuit, target, layout, cfg).run())
}

/// Bidirectional layout search from a seeded random layout on a connected
/// region of the target. Each round routes forward, then routes the reversed
/// circuit from where that ended; a last forward pass routes the circuit.
/// Returns the initial layout of that pass along with its routing.
pub fn sabre_layout_and_route(
    circuit: &Circuit,
    target: &Target,
    seed: u64,
    cfg: &SabreConfig,
) -> Result<(Layout, RoutingResult), TranspileError> {
    let reversed = circuit.reversed();
    let mut layout = Layout::random_connected(circuit.num_qubits(), target.coupling(), seed)?;
    for _ in 0..cfg.layout_rounds {
        let forward = sabre_route(circuit, target, &layout, cfg)?;
        layout = sabre_route(&reversed, target, &forward.final_layout, cfg)?.final_layout;
    }
    let routed = sabre_route(circuit, target, &layout, cfg)?;
    Ok((layout, routed))
}

pub fn sabre_layout(
    circuit: &Circuit,
    target: &Target,
    seed: u64,
    cfg: &SabreConfig,
) -> Result<Layout, TranspileError> {
    sabre_layout_and_route(circuit, target, seed, cfg).map(|(layout, _)| layout)
}
