//! Search for a layout under which every two-qubit gate already lies on a
//! coupling edge, i.e. an embedding of the interaction graph into the
//! coupling graph.

use std::collections::{BTreeSet, VecDeque};

use super::Layout;
use crate::circuit::Circuit;
use crate::target::Target;

/// Search budget in candidate placements.
pub const DEFAULT_SEARCH_LIMIT: usize = 200_000;

/// Undirected logical interaction graph as sorted adjacency lists.
fn interaction_graph(circuit: &Circuit) -> Vec<Vec<usize>> {
    let mut adj = vec![BTreeSet::new(); circuit.num_qubits()];
    for inst in circuit.instructions().iter().filter(|i| i.is_two_qubit()) {
        let (a, b) = (inst.qubits[0], inst.qubits[1]);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Placement order: per component, start from its highest-degree node and
/// continue breadth-first, so every later node has an already placed neighbour.
fn search_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut roots: Vec<usize> = (0..n).filter(|&u| !adj[u].is_empty()).collect();
    roots.sort_by_key(|&u| (std::cmp::Reverse(adj[u].len()), u));
    for root in roots {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adj[u].iter().copied().filter(|&v| !seen[v]).collect();
            next.sort_by_key(|&v| (std::cmp::Reverse(adj[v].len()), v));
            for v in next {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    order
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    target: &'a Target,
    order: Vec<usize>,
    placed: Vec<Option<usize>>,
    used: Vec<bool>,
    budget: usize,
}

impl Search<'_> {
    fn fits(&self, u: usize, p: usize) -> bool {
        !self.used[p]
            && self.target.coupling().degree(p) >= self.adj[u].len()
            && self.adj[u]
                .iter()
                .filter_map(|&v| self.placed[v])
                .all(|q| self.target.coupling().contains_edge(p, q))
    }

    fn extend(&mut self, depth: usize) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let u = self.order[depth];
        let candidates: Vec<usize> = match self.adj[u].iter().find_map(|&v| self.placed[v]) {
            Some(anchor) => self.target.coupling().neighbors(anchor).to_vec(),
            None => (0..self.target.num_qubits()).collect(),
        };
        for p in candidates {
            if !self.fits(u, p) {
                continue;
            }
            self.budget = self.budget.checked_sub(1)?;
            self.placed[u] = Some(p);
            self.used[p] = true;
            if self.extend(depth + 1)? {
                return Some(true);
            }
            self.placed[u] = None;
            self.used[p] = false;
        }
        Some(false)
    }
}

/// A layout needing no swaps, if one is found within `limit` placements.
/// The trivial layout is returned whenever it already qualifies; otherwise the
/// first embedding in a deterministic search order is used. Qubits without
/// two-qubit gates take the lowest free physical indices.
pub fn perfect_layout(circuit: &Circuit, target: &Target, limit: usize) -> Option<Layout> {
    let n = circuit.num_qubits();
    let m = target.num_qubits();
    if n > m {
        return None;
    }
    let on_edges = |l: &dyn Fn(usize) -> usize| {
        circuit
            .instructions()
            .iter()
            .filter(|i| i.is_two_qubit())
            .all(|i| target.coupling().contains_edge(l(i.qubits[0]), l(i.qubits[1])))
    };
    if on_edges(&|q| q) {
        return Layout::trivial(n, m).ok();
    }
    let adj = interaction_graph(circuit);
    let mut search = Search {
        adj: &adj,
        target,
        order: search_order(&adj),
        placed: vec![None; n],
        used: vec![false; m],
        budget: limit,
    };
    if !search.extend(0)? {
        return None;
    }
    let mut free = (0..m).filter(|&p| !search.used[p]);
    let map: Vec<usize> = search
        .placed
        .iter()
        .map(|p| p.unwrap_or_else(|| free.next().expect("n ≤ m")))
        .collect();
    Layout::new(map, m).ok()
}
