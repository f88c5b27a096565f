//! Node-split flow networks.
//!
//! Base node `v` (1-based) becomes an in-copy `v` and an out-copy `v + n`
//! joined by the split edge `(v, v + n)`. Every base edge `(u, w)` becomes
//! `(u + n, w)` with capacity `INF`; the source `2n + 1` feeds the in-copies
//! of the disturbances and the out-copies of the targets drain into the sink
//! `2n + 2`. Cutting a split edge selects its node. Forbidden nodes get an
//! `INF` split edge and can never be selected.

use serde::{Deserialize, Serialize};

use crate::netmodel::ProblemInstance;
use crate::set::NodeSet;

use super::flow::FlowNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtEdgeKind {
    /// Copy of base edge `(from, to)`.
    Base {
        from: usize,
        to: usize,
    },
    /// Split edge of base node `v`.
    Split {
        node: usize,
    },
    Source {
        node: usize,
    },
    Sink {
        node: usize,
    },
}

/// Edge of the extended network, endpoints in extended (1-based) ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtEdge {
    pub tail: usize,
    pub head: usize,
    pub capacity: u64,
    pub kind: ExtEdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedNetwork {
    n: usize,
    inf: u64,
    edges: Vec<ExtEdge>,
}

impl ExtendedNetwork {
    pub fn base_node_count(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        2 * self.n + 2
    }

    pub fn source(&self) -> usize {
        2 * self.n + 1
    }

    pub fn sink(&self) -> usize {
        2 * self.n + 2
    }

    /// The capacity standing in for infinity: one more than the total of
    /// all unit capacities, so it never appears in a minimum cut.
    pub fn inf(&self) -> u64 {
        self.inf
    }

    pub fn edges(&self) -> &[ExtEdge] {
        &self.edges
    }

    pub fn split_edge(&self, v: usize) -> (usize, usize) {
        (v, v + self.n)
    }

    pub fn split_capacity(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .find(|e| e.kind == ExtEdgeKind::Split { node: v })
            .map(|e| e.capacity)
            .expect("every base node has a split edge")
    }

    /// Same network with every edge reversed. Node numbering is unchanged;
    /// callers swap the roles of source and sink.
    pub(crate) fn reversed(&self) -> ExtendedNetwork {
        ExtendedNetwork {
            n: self.n,
            inf: self.inf,
            edges: self
                .edges
                .iter()
                .map(|e| ExtEdge {
                    tail: e.head,
                    head: e.tail,
                    ..*e
                })
                .collect(),
        }
    }

    pub(crate) fn to_flow(&self) -> FlowNetwork {
        let mut g = FlowNetwork::new(self.node_count());
        for e in &self.edges {
            g.add_edge(e.tail - 1, e.head - 1, e.capacity);
        }
        g
    }
}

/// Builds the extended network for `inst` with the given forbidden nodes.
///
/// Self-loops are dropped, so the edge count is `q + n + |D| + |T|` with `q`
/// the number of proper edges.
pub fn build_extended(inst: &ProblemInstance, forbidden: &NodeSet) -> ExtendedNetwork {
    let n = inst.n();
    let inf = n as u64 + 1;
    let mut edges = Vec::with_capacity(inst.network.edges().len() + n + 4);
    for v in 1..=n {
        edges.push(ExtEdge {
            tail: v,
            head: v + n,
            capacity: if forbidden.contains(v) { inf } else { 1 },
            kind: ExtEdgeKind::Split { node: v },
        });
    }
    for e in inst.network.edges().iter().filter(|e| !e.is_self_loop()) {
        edges.push(ExtEdge {
            tail: e.from + n,
            head: e.to,
            capacity: inf,
            kind: ExtEdgeKind::Base { from: e.from, to: e.to },
        });
    }
    for d in inst.disturbances.iter() {
        edges.push(ExtEdge {
            tail: 2 * n + 1,
            head: d,
            capacity: inf,
            kind: ExtEdgeKind::Source { node: d },
        });
    }
    for t in inst.targets.iter() {
        edges.push(ExtEdge {
            tail: t + n,
            head: 2 * n + 2,
            capacity: inf,
            kind: ExtEdgeKind::Sink { node: t },
        });
    }
    ExtendedNetwork { n, inf, edges }
}

/// Two-phase split network for dynamic-feedback placement.
///
/// Phase one carries walks from a disturbance that have not yet passed an
/// output node; its split edges select outputs. At any node a walk may jump
/// to phase two, which carries the remainder of the walk up to a target and
/// whose split edges (entered only through base edges) select inputs. A
/// source-to-sink path is exactly a walk on which no output precedes the last
/// input, so a minimum cut is a minimum `|B| + |C|` placement with
/// `S*(C) ⊆ Z*(B)`.
#[derive(Clone, Debug)]
pub struct TwoPhaseNetwork {
    n: usize,
    pub(crate) flow: FlowNetwork,
    output_splits: Vec<usize>,
    input_splits: Vec<usize>,
}

impl TwoPhaseNetwork {
    pub fn build(inst: &ProblemInstance) -> Self {
        let n = inst.n();
        let inf = 2 * n as u64 + 1;
        // layout: phase-one in/out at [0, n) / [n, 2n), phase-two in/out at
        // [2n, 3n) / [3n, 4n), then source and sink
        let (p1_in, p1_out) = (|v: usize| v - 1, |v: usize| n + v - 1);
        let (p2_in, p2_out) = (|v: usize| 2 * n + v - 1, |v: usize| 3 * n + v - 1);
        let (source, sink) = (4 * n, 4 * n + 1);
        let mut flow = FlowNetwork::new(4 * n + 2);
        let mut output_splits = Vec::with_capacity(n);
        let mut input_splits = Vec::with_capacity(n);
        for v in 1..=n {
            let cap = if inst.targets.contains(v) { inf } else { 1 };
            output_splits.push(flow.add_edge(p1_in(v), p1_out(v), cap));
        }
        for v in 1..=n {
            let cap = if inst.disturbances.contains(v) { inf } else { 1 };
            input_splits.push(flow.add_edge(p2_in(v), p2_out(v), cap));
        }
        for v in 1..=n {
            flow.add_edge(p1_in(v), p2_out(v), inf);
        }
        for e in inst.network.edges().iter().filter(|e| !e.is_self_loop()) {
            flow.add_edge(p1_out(e.from), p1_in(e.to), inf);
            flow.add_edge(p2_out(e.from), p2_in(e.to), inf);
        }
        for d in inst.disturbances.iter() {
            flow.add_edge(source, p1_in(d), inf);
        }
        for t in inst.targets.iter() {
            flow.add_edge(p2_out(t), sink, inf);
        }
        TwoPhaseNetwork {
            n,
            flow,
            output_splits,
            input_splits,
        }
    }

    pub fn source(&self) -> usize {
        4 * self.n
    }

    pub fn sink(&self) -> usize {
        4 * self.n + 1
    }

    pub fn inf(&self) -> u64 {
        2 * self.n as u64 + 1
    }

    /// Split edges crossing the residual-reachable set as `(inputs, outputs)`.
    pub(crate) fn selection(&self, reachable: &[bool]) -> (NodeSet, NodeSet) {
        let n = self.n;
        let outputs = (1..=n).filter(|&v| reachable[v - 1] && !reachable[n + v - 1]);
        let inputs = (1..=n).filter(|&v| reachable[2 * n + v - 1] && !reachable[3 * n + v - 1]);
        (NodeSet::from_ids(inputs), NodeSet::from_ids(outputs))
    }

    pub(crate) fn split_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.output_splits.iter().chain(&self.input_splits).copied()
    }
}
