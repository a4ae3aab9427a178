//! Physical device model: undirected coupling graph, native basis and
//! all-pairs hop distances.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::GateKind;

/// Coupling map shipped for replication sweeps: `heavy_hex_map(5)`, 65 qubits.
pub const DEFAULT_TARGET_JSON: &str = include_str!("../../../assets/heavy_hex_65.json");

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("heavy-hex distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),
    #[error("coupling map is disconnected: qubit {0} unreachable from qubit 0")]
    Disconnected(usize),
    #[error("edge #{position} ({u}, {v}) out of range for {num_qubits} qubits")]
    EdgeOutOfRange {
        position: usize,
        u: usize,
        v: usize,
        num_qubits: usize,
    },
    #[error("edge #{position} is a self-loop on qubit {qubit}")]
    SelfLoop { position: usize, qubit: usize },
    #[error("coupling map has no qubits")]
    Empty,
    #[error("{path}: {source}")]
    Load {
        path: String,
        #[source]
        source: Box<TargetError>,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Undirected connectivity graph over `num_qubits` physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    num_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl CouplingMap {
    /// Validates bounds, loops and connectivity. Edges may be given in either
    /// orientation; duplicates collapse.
    pub fn new(
        num_qubits: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TargetError> {
        if num_qubits == 0 {
            return Err(TargetError::Empty);
        }
        let mut set = BTreeSet::new();
        for (position, (u, v)) in edges.into_iter().enumerate() {
            if u >= num_qubits || v >= num_qubits {
                return Err(TargetError::EdgeOutOfRange {
                    position,
                    u,
                    v,
                    num_qubits,
                });
            }
            if u == v {
                return Err(TargetError::SelfLoop { position, qubit: u });
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut neighbors = vec![Vec::new(); num_qubits];
        for &(u, v) in &set {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        let map = Self {
            num_qubits,
            edges: set,
            neighbors,
        };
        let dist = map.bfs(0);
        if let Some(q) = dist.iter().position(|d| d.is_none()) {
            return Err(TargetError::Disconnected(q));
        }
        Ok(map)
    }

    pub fn path(m: usize) -> Result<Self, TargetError> {
        Self::new(m, (1..m).map(|i| (i - 1, i)))
    }

    pub fn ring(m: usize) -> Result<Self, TargetError> {
        Self::new(m, (0..m).map(|i| (i, (i + 1) % m)).filter(|(u, v)| u != v))
    }

    pub fn complete(m: usize) -> Result<Self, TargetError> {
        Self::new(m, (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Edges with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.neighbors[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.neighbors[q].len()
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    fn bfs(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.num_qubits];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &self.neighbors[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs hop counts by one breadth-first search per source.
    pub fn distance_matrix(&self) -> Result<DistanceMatrix, TargetError> {
        let m = self.num_qubits;
        let mut data = Vec::with_capacity(m * m);
        for s in 0..m {
            for (q, d) in self.bfs(s).into_iter().enumerate() {
                data.push(d.ok_or(TargetError::Disconnected(q))?);
            }
        }
        Ok(DistanceMatrix { size: m, data })
    }
}

/// Row-major `m × m` hop-count matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.data[u * self.size + v]
    }
}

/// Heavy-hexagon lattice in the row/bridge layout of the 27/65/127-qubit
/// device family.
///
/// `distance` odd rows of `2·distance + 1` row qubits run as linear chains;
/// the first row drops its last column and the last row drops its first.
/// Between consecutive rows, `(distance + 1) / 2` bridge qubits join the two
/// rows at columns `0, 4, 8, …` (even gaps) or `2, 6, 10, …` (odd gaps).
/// Numbering walks row 0, its bridges, row 1, and so on, giving
/// 23, 65 and 127 qubits for distances 3, 5 and 7.
pub fn heavy_hex_map(distance: usize) -> Result<CouplingMap, TargetError> {
    if distance < 3 || distance % 2 == 0 {
        return Err(TargetError::InvalidDistance(distance));
    }
    let rows = distance;
    let width = 2 * distance + 1;
    let bridge_cols = |gap: usize| (if gap % 2 == 0 { 0 } else { 2 }..width).step_by(4);

    // Assign indices: row qubits keyed by column, then the bridges below the row.
    let mut next = 0usize;
    let mut row_qubits: Vec<Vec<Option<usize>>> = Vec::with_capacity(rows);
    let mut bridges: Vec<Vec<(usize, usize)>> = Vec::with_capacity(rows - 1);
    for r in 0..rows {
        let first = usize::from(r == rows - 1);
        let last = if r == 0 { width - 2 } else { width - 1 };
        let mut cols = vec![None; width];
        for slot in &mut cols[first..=last] {
            *slot = Some(next);
            next += 1;
        }
        row_qubits.push(cols);
        if r + 1 < rows {
            let gap: Vec<(usize, usize)> = bridge_cols(r)
                .map(|c| {
                    next += 1;
                    (c, next - 1)
                })
                .collect();
            bridges.push(gap);
        }
    }

    let mut edges = Vec::new();
    for cols in &row_qubits {
        let present: Vec<usize> = cols.iter().flatten().copied().collect();
        edges.extend(present.windows(2).map(|w| (w[0], w[1])));
    }
    for (gap, links) in bridges.iter().enumerate() {
        for &(c, b) in links {
            edges.push((row_qubits[gap][c].unwrap(), b));
            edges.push((b, row_qubits[gap + 1][c].unwrap()));
        }
    }
    CouplingMap::new(next, edges)
}

/// A coupling map plus the fixed native basis `{CX, RZ, SX, X}`.
#[derive(Debug, Clone)]
pub struct Target {
    name: String,
    coupling: CouplingMap,
    distances: DistanceMatrix,
}

impl Target {
    pub fn new(name: impl Into<String>, coupling: CouplingMap) -> Self {
        let distances = coupling
            .distance_matrix()
            .expect("validated coupling maps are connected");
        Self {
            name: name.into(),
            coupling,
            distances,
        }
    }

    /// The shipped 65-qubit heavy-hex target.
    pub fn default_heavy_hex() -> Self {
        Self::from_json(DEFAULT_TARGET_JSON).expect("bundled target asset is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coupling(&self) -> &CouplingMap {
        &self.coupling
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    pub fn num_qubits(&self) -> usize {
        self.coupling.num_qubits()
    }

    pub fn basis(&self) -> &'static [GateKind] {
        &GateKind::NATIVE
    }

    pub fn to_json(&self) -> String {
        let doc = TargetDoc {
            name: self.name.clone(),
            num_qubits: self.coupling.num_qubits(),
            edges: self.coupling.edges().map(|(u, v)| [u, v]).collect(),
        };
        let mut text = serde_json::to_string(&doc).expect("target serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, TargetError> {
        let doc: TargetDoc = serde_json::from_str(text).map_err(|e| TargetError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let coupling = CouplingMap::new(doc.num_qubits, doc.edges.iter().map(|e| (e[0], e[1])))?;
        Ok(Self::new(doc.name, coupling))
    }
}

/// Reads and validates a coupling-map file. Errors carry the file path.
pub fn load_target(path: impl AsRef<Path>) -> Result<Target, TargetError> {
    let path = path.as_ref();
    let wrap = |source: TargetError| TargetError::Load {
        path: path.display().to_string(),
        source: Box::new(source),
    };
    let text = std::fs::read_to_string(path).map_err(|e| wrap(e.into()))?;
    Target::from_json(&text).map_err(wrap)
}

#[derive(Debug, Serialize, Deserialize)]
struct TargetDoc {
    name: String,
    num_qubits: usize,
    edges: Vec<[usize; 2]>,
}
