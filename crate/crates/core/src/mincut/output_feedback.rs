//! Static-output-feedback placement: choose `W` with `D ⊆ W ⊆ V∖T`
//! minimizing `|∂−(W)| + |∂+(W)|`; then `C = ∂−(W)` and `B = ∂+(W)`.
//!
//! Only nodes on some disturbance-to-target path matter. Every other node
//! reachable from `D` joins `W` without creating an exit, so the search
//! decides membership of path nodes only.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{ProblemInstance, Side};
use crate::set::NodeSet;
use crate::solvability::construct_w;

use super::extended::build_extended;
use super::flow::FlowNetwork;
use super::{max_flow_min_cut, CutSide};

/// Largest `|V∖(D∪T)|` accepted by the exact search.
pub const OF_EXACT_MAX_FREE: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OfMode {
    /// Branch-and-bound; optimal.
    Exact,
    /// One unit-capacity edge cut of the path subgraph; upper bound only.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfPlacement {
    pub inputs: NodeSet,
    pub outputs: NodeSet,
    pub w: NodeSet,
}

impl OfPlacement {
    pub fn total(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    fn from_w(inst: &ProblemInstance, w: NodeSet) -> Self {
        OfPlacement {
            inputs: inst.network.boundary(&w, Side::Out),
            outputs: inst.network.boundary(&w, Side::In),
            w,
        }
    }
}

/// Minimum `|B| + |C|` placement for static-output-feedback decoupling.
pub fn solve_min_ddpof(inst: &ProblemInstance, mode: OfMode) -> Result<OfPlacement> {
    inst.validate_for_solver()?;
    if mode == OfMode::Exact {
        let free = inst.n() - inst.disturbances.len() - inst.targets.len();
        if free > OF_EXACT_MAX_FREE {
            return Err(Error::SizeLimit {
                what: "exact output-feedback search over V∖(D∪T)",
                limit: OF_EXACT_MAX_FREE,
                actual: free,
            });
        }
    }
    let heuristic = edge_cut_placement(inst)?;
    let placement = match mode {
        OfMode::Heuristic => heuristic,
        OfMode::Exact => branch_and_bound(inst, heuristic)?,
    };
    debug_assert!(inst.disturbances.is_subset(&placement.w));
    debug_assert!(placement.w.is_disjoint(&inst.targets));
    Ok(placement)
}

fn edge_cut_placement(inst: &ProblemInstance) -> Result<OfPlacement> {
    let n = inst.n();
    let path = inst.path_nodes();
    let on_path = path.mask(n);
    let edges: Vec<(usize, usize)> = inst
        .network
        .edges()
        .iter()
        .filter(|e| !e.is_self_loop() && on_path[e.from - 1] && on_path[e.to - 1])
        .map(|e| (e.from, e.to))
        .collect();
    let inf = edges.len() as u64 + 1;
    let (source, sink) = (n, n + 1);
    let mut flow = FlowNetwork::new(n + 2);
    for &(u, v) in &edges {
        flow.add_edge(u - 1, v - 1, 1);
    }
    for d in inst.disturbances.intersection(&path).iter() {
        flow.add_edge(source, d - 1, inf);
    }
    for t in inst.targets.intersection(&path).iter() {
        flow.add_edge(t - 1, sink, inf);
    }
    flow.max_flow(source, sink);
    let reached = flow.residual_reachable(source);
    let cut = edges.iter().filter(|&&(u, v)| reached[u - 1] && !reached[v - 1]);
    let outputs = NodeSet::from_ids(cut.clone().map(|&(u, _)| u));
    let inputs = NodeSet::from_ids(cut.map(|&(_, v)| v));
    let placed = inst.clone().with_inputs(inputs)?.with_outputs(outputs)?;
    Ok(OfPlacement::from_w(inst, construct_w(&placed)?.w))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Member {
    Undecided,
    In,
    Out,
}

/// Depth-first branch-and-bound over path-node membership.
///
/// The partial cost counts exits already fixed by decided nodes and never
/// decreases along a branch. The global lower bound `λ_B + λ_C` holds because
/// `∂+(W)` is a node cut avoiding `D` and `∂−(W)` a node cut avoiding `T`.
struct Search {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    order: Vec<usize>,
    member: Vec<Member>,
    /// Decided-out successors per node.
    out_succ: Vec<usize>,
    /// Decided-in predecessors per node.
    in_pred: Vec<usize>,
    cost: usize,
    floor: usize,
    best: usize,
    best_members: Option<Vec<Member>>,
}

impl Search {
    fn assign(&mut self, v: usize, m: Member) {
        self.member[v] = m;
        match m {
            Member::In => {
                if self.out_succ[v] > 0 {
                    self.cost += 1;
                }
                for i in 0..self.succ[v].len() {
                    let w = self.succ[v][i];
                    self.in_pred[w] += 1;
                    if self.in_pred[w] == 1 && self.member[w] == Member::Out {
                        self.cost += 1;
                    }
                }
            }
            Member::Out => {
                if self.in_pred[v] > 0 {
                    self.cost += 1;
                }
                for i in 0..self.pred[v].len() {
                    let u = self.pred[v][i];
                    self.out_succ[u] += 1;
                    if self.out_succ[u] == 1 && self.member[u] == Member::In {
                        self.cost += 1;
                    }
                }
            }
            Member::Undecided => unreachable!(),
        }
    }

    fn unassign(&mut self, v: usize) {
        match self.member[v] {
            Member::In => {
                for i in 0..self.succ[v].len() {
                    let w = self.succ[v][i];
                    if self.in_pred[w] == 1 && self.member[w] == Member::Out {
                        self.cost -= 1;
                    }
                    self.in_pred[w] -= 1;
                }
                if self.out_succ[v] > 0 {
                    self.cost -= 1;
                }
            }
            Member::Out => {
                for i in 0..self.pred[v].len() {
                    let u = self.pred[v][i];
                    if self.out_succ[u] == 1 && self.member[u] == Member::In {
                        self.cost -= 1;
                    }
                    self.out_succ[u] -= 1;
                }
                if self.in_pred[v] > 0 {
                    self.cost -= 1;
                }
            }
            Member::Undecided => unreachable!(),
        }
        self.member[v] = Member::Undecided;
    }

    fn run(&mut self, depth: usize) {
        if self.best == self.floor || self.cost.max(self.floor) >= self.best {
            return;
        }
        let Some(&v) = self.order.get(depth) else {
            self.best = self.cost;
            self.best_members = Some(self.member.clone());
            return;
        };
        for m in [Member::In, Member::Out] {
            self.assign(v, m);
            self.run(depth + 1);
            self.unassign(v);
        }
    }
}

fn branch_and_bound(inst: &ProblemInstance, incumbent: OfPlacement) -> Result<OfPlacement> {
    let n = inst.n();
    let path = inst.path_nodes();
    if path.is_empty() {
        return Ok(incumbent);
    }
    let lambda_b = max_flow_min_cut(&build_extended(inst, &inst.disturbances), CutSide::Source)?.flow_value;
    let lambda_c = max_flow_min_cut(&build_extended(inst, &inst.targets), CutSide::Source)?.flow_value;
    let floor = (lambda_b + lambda_c) as usize;

    let on_path = path.mask(n);
    let local = |v: usize| v - 1;
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for e in inst.network.edges() {
        if !e.is_self_loop() && on_path[e.from - 1] && on_path[e.to - 1] {
            succ[local(e.from)].push(local(e.to));
            pred[local(e.to)].push(local(e.from));
        }
    }
    // decide nodes in breadth-first order from the disturbances so exits
    // near D are fixed early and the partial cost rises quickly
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = inst.disturbances.intersection(&path).iter().map(local).collect();
    for &v in &queue {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        let id = v + 1;
        if !inst.disturbances.contains(id) && !inst.targets.contains(id) {
            order.push(v);
        }
        for &w in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }

    let mut search = Search {
        succ,
        pred,
        order,
        member: vec![Member::Undecided; n],
        out_succ: vec![0; n],
        in_pred: vec![0; n],
        cost: 0,
        floor,
        best: incumbent.total(),
        best_members: None,
    };
    for d in inst.disturbances.intersection(&path).iter() {
        search.assign(local(d), Member::In);
    }
    for t in inst.targets.intersection(&path).iter() {
        search.assign(local(t), Member::Out);
    }
    search.run(0);

    let Some(members) = search.best_members else {
        return Ok(incumbent);
    };
    let reach = inst
        .network
        .reachable_avoiding(&inst.disturbances, &NodeSet::new(), &[]);
    let chosen = NodeSet::from_ids((1..=n).filter(|&v| members[v - 1] == Member::In));
    let w = chosen.union(&reach.difference(&path));
    let placement = OfPlacement::from_w(inst, w);
    debug_assert_eq!(placement.total(), search.best);
    Ok(placement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{disconnected_instance, fork_instance, merge_instance};
    use crate::oracle::{brute_min_io, IoMode};

    #[test]
    fn fork_exact() {
        let p = solve_min_ddpof(&fork_instance(), OfMode::Exact).unwrap();
        assert_eq!(p.inputs, NodeSet::from([2]));
        assert_eq!(p.outputs, NodeSet::from([1]));
        assert_eq!(p.w, NodeSet::from([1]));
    }

    #[test]
    fn merge_exact_matches_oracle() {
        let inst = merge_instance();
        let p = solve_min_ddpof(&inst, OfMode::Exact).unwrap();
        assert_eq!(p.total(), brute_min_io(&inst, IoMode::Of).unwrap().min_total);
        let h = solve_min_ddpof(&inst, OfMode::Heuristic).unwrap();
        assert!(h.total() >= p.total());
    }

    #[test]
    fn no_path_keeps_reachable_closure() {
        let inst = disconnected_instance();
        for mode in [OfMode::Exact, OfMode::Heuristic] {
            let p = solve_min_ddpof(&inst, mode).unwrap();
            assert_eq!(p.total(), 0);
            assert_eq!(p.w, NodeSet::from([4]));
        }
    }

    #[test]
    fn exact_size_limit() {
        let pairs: Vec<(usize, usize)> = (1..30).map(|v| (v, v + 1)).collect();
        let net = crate::netmodel::Network::from_pairs(30, &pairs).unwrap();
        let inst = ProblemInstance::new(net, NodeSet::from([1]), NodeSet::from([30])).unwrap();
        assert!(matches!(
            solve_min_ddpof(&inst, OfMode::Exact),
            Err(Error::SizeLimit {
                limit: 24,
                actual: 28,
                ..
            })
        ));
        assert_eq!(solve_min_ddpof(&inst, OfMode::Heuristic).unwrap().total(), 2);
    }
}
