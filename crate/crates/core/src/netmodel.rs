//! Directed network model, role sets, boundaries and reachability.
//!
//! Node ids are 1-based everywhere in the public API. Self-loops are stored
//! (they show up in [`Network::neighbors`] and in the adjacency matrix) but
//! never contribute to boundaries or to paths.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::set::NodeSet;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// Side of a node set whose boundary is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Nodes inside the set with an edge leaving it.
    In,
    /// Nodes outside the set with an edge entering from it.
    Out,
}

/// Weighted digraph on nodes `1..=n` with at most one edge per ordered pair
/// and nonzero weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    n: usize,
    edges: Vec<Edge>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyNetwork);
        }
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            for v in [e.from, e.to] {
                if v == 0 || v > n {
                    return Err(Error::UnknownNode(v));
                }
            }
            if e.weight == 0.0 || !e.weight.is_finite() {
                return Err(Error::ZeroWeight(e.from, e.to));
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));
        if let Some(w) = edges.windows(2).find(|w| (w[0].from, w[0].to) == (w[1].from, w[1].to)) {
            return Err(Error::DuplicateEdge(w[0].from, w[0].to));
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for e in &edges {
            succ[e.from - 1].push(e.to);
            pred[e.to - 1].push(e.from);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        Ok(Network { n, edges, succ, pred })
    }

    /// Unit-weight network from `(from, to)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(from, to)| Edge { from, to, weight: 1.0 }))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of edges that are not self-loops.
    pub fn proper_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_self_loop()).count()
    }

    pub fn nodes(&self) -> NodeSet {
        NodeSet::full(self.n)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.weight(from, to).is_some()
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<f64> {
        self.edges
            .binary_search_by_key(&(from, to), |e| (e.from, e.to))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    /// Successors of `v` (self-loop included), ascending.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v - 1]
    }

    /// Predecessors of `v` (self-loop included), ascending.
    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v - 1]
    }

    pub fn neighbors(&self, v: usize, direction: Direction) -> Result<NodeSet> {
        self.check_node(v)?;
        Ok(match direction {
            Direction::Out => NodeSet::from_ids(self.successors(v).iter().copied()),
            Direction::In => NodeSet::from_ids(self.predecessors(v).iter().copied()),
        })
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(Error::UnknownNode(v))
        } else {
            Ok(())
        }
    }

    pub fn check_set(&self, s: &NodeSet) -> Result<()> {
        match s.max_id() {
            Some(v) if v > self.n => Err(Error::UnknownNode(v)),
            _ => Ok(()),
        }
    }

    /// In-boundary (`Side::In`) or out-boundary (`Side::Out`) of `w`.
    pub fn boundary(&self, w: &NodeSet, side: Side) -> NodeSet {
        let inside = w.mask(self.n);
        let mut hit = vec![false; self.n];
        for e in self.edges.iter().filter(|e| !e.is_self_loop()) {
            if inside[e.from - 1] && !inside[e.to - 1] {
                match side {
                    Side::In => hit[e.from - 1] = true,
                    Side::Out => hit[e.to - 1] = true,
                }
            }
        }
        NodeSet::from_mask(&hit)
    }

    pub fn transpose(&self) -> Network {
        Network::new(
            self.n,
            self.edges.iter().map(|e| Edge {
                from: e.to,
                to: e.from,
                weight: e.weight,
            }),
        )
        .expect("transpose of a valid network is valid")
    }

    /// Same support with replacement weights supplied per edge.
    pub fn reweighted(&self, mut weight: impl FnMut(&Edge) -> f64) -> Result<Network> {
        Network::new(
            self.n,
            self.edges.iter().map(|e| Edge {
                weight: weight(e),
                ..*e
            }),
        )
    }

    /// Forward reachable set from `from`, skipping removed nodes and edges.
    ///
    /// Sources that are themselves removed are dropped; surviving sources are
    /// part of the result.
    pub fn reachable_avoiding(
        &self,
        from: &NodeSet,
        removed_nodes: &NodeSet,
        removed_edges: &[(usize, usize)],
    ) -> NodeSet {
        let blocked = removed_nodes.mask(self.n);
        let cut: HashSet<(usize, usize)> = removed_edges.iter().copied().collect();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for v in from.iter().filter(|&v| v <= self.n && !blocked[v - 1]) {
            seen[v - 1] = true;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            for &v in self.successors(u) {
                if v == u || seen[v - 1] || blocked[v - 1] || cut.contains(&(u, v)) {
                    continue;
                }
                seen[v - 1] = true;
                queue.push_back(v);
            }
        }
        NodeSet::from_mask(&seen)
    }

    /// Shortest path (fewest edges) from a surviving source to a node of
    /// `targets`, skipping removed nodes and edges. Ties break towards
    /// smaller node ids.
    pub fn shortest_path_avoiding(
        &self,
        from: &NodeSet,
        targets: &NodeSet,
        removed_nodes: &NodeSet,
        removed_edges: &[(usize, usize)],
    ) -> Option<Vec<usize>> {
        let blocked = removed_nodes.mask(self.n);
        let cut: HashSet<(usize, usize)> = removed_edges.iter().copied().collect();
        let mut parent: Vec<Option<usize>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for v in from.iter().filter(|&v| v <= self.n && !blocked[v - 1]) {
            seen[v - 1] = true;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            if targets.contains(u) {
                let mut path = vec![u];
                let mut cur = u;
                while let Some(p) = parent[cur - 1] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &v in self.successors(u) {
                if v == u || seen[v - 1] || blocked[v - 1] || cut.contains(&(u, v)) {
                    continue;
                }
                seen[v - 1] = true;
                parent[v - 1] = Some(u);
                queue.push_back(v);
            }
        }
        None
    }

    /// Nodes from which some node of `to` is reachable (including `to`).
    pub fn coreachable(&self, to: &NodeSet) -> NodeSet {
        self.transpose().reachable_avoiding(to, &NodeSet::new(), &[])
    }

    /// Unweighted adjacency: entry `(j, i)` is 1 iff edge `v_i -> v_j` exists.
    pub fn indicator_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            m[(e.to - 1, e.from - 1)] = 1.0;
        }
        m
    }

    /// Weighted adjacency with the same `(head, tail)` layout as
    /// [`Network::indicator_matrix`].
    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            m[(e.to - 1, e.from - 1)] = e.weight;
        }
        m
    }
}

/// One violated disjointness constraint between role sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    DisturbanceTarget(NodeSet),
    DisturbanceInput(NodeSet),
    TargetOutput(NodeSet),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DisturbanceTarget(s) => write!(f, "D∩T≠∅ ({s})"),
            Violation::DisturbanceInput(s) => write!(f, "D∩B≠∅ ({s})"),
            Violation::TargetOutput(s) => write!(f, "T∩C≠∅ ({s})"),
        }
    }
}

/// A network together with its disturbance, target, and optional input and
/// output node sets.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub network: Network,
    pub disturbances: NodeSet,
    pub targets: NodeSet,
    pub inputs: Option<NodeSet>,
    pub outputs: Option<NodeSet>,
}

impl ProblemInstance {
    pub fn new(network: Network, disturbances: NodeSet, targets: NodeSet) -> Result<Self> {
        network.check_set(&disturbances)?;
        network.check_set(&targets)?;
        Ok(ProblemInstance {
            network,
            disturbances,
            targets,
            inputs: None,
            outputs: None,
        })
    }

    pub fn with_inputs(mut self, inputs: NodeSet) -> Result<Self> {
        self.network.check_set(&inputs)?;
        self.inputs = Some(inputs);
        Ok(self)
    }

    pub fn with_outputs(mut self, outputs: NodeSet) -> Result<Self> {
        self.network.check_set(&outputs)?;
        self.outputs = Some(outputs);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.network.node_count()
    }

    /// Inputs, or the empty set when none were assigned.
    pub fn inputs_or_empty(&self) -> NodeSet {
        self.inputs.clone().unwrap_or_default()
    }

    pub fn outputs_or_empty(&self) -> NodeSet {
        self.outputs.clone().unwrap_or_default()
    }

    /// Every violated disjointness constraint; empty when the instance is valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let dt = self.disturbances.intersection(&self.targets);
        if !dt.is_empty() {
            out.push(Violation::DisturbanceTarget(dt));
        }
        if let Some(b) = &self.inputs {
            let db = self.disturbances.intersection(b);
            if !db.is_empty() {
                out.push(Violation::DisturbanceInput(db));
            }
        }
        if let Some(c) = &self.outputs {
            let tc = self.targets.intersection(c);
            if !tc.is_empty() {
                out.push(Violation::TargetOutput(tc));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InstanceViolation(v))
        }
    }

    /// Validation plus the solver-entry requirement of nonempty `D` and `T`.
    pub fn validate_for_solver(&self) -> Result<()> {
        self.validate()?;
        if self.disturbances.is_empty() || self.targets.is_empty() {
            return Err(Error::MissingRoles("disturbance and target sets must be nonempty"));
        }
        Ok(())
    }

    /// Whether some disturbance reaches some target.
    pub fn has_dt_path(&self) -> bool {
        !self
            .network
            .reachable_avoiding(&self.disturbances, &NodeSet::new(), &[])
            .is_disjoint(&self.targets)
    }

    /// Nodes lying on at least one disturbance-to-target path.
    pub fn path_nodes(&self) -> NodeSet {
        let fwd = self
            .network
            .reachable_avoiding(&self.disturbances, &NodeSet::new(), &[]);
        let bwd = self.network.coreachable(&self.targets);
        fwd.intersection(&bwd)
    }
}

/// Free-function form of [`ProblemInstance::violations`].
pub fn validate_instance(inst: &ProblemInstance) -> Vec<Violation> {
    inst.violations()
}
