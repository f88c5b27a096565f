//! Feasibility of disturbance decoupling by state feedback (SF), static
//! output feedback (OF) and dynamic feedback (DF).
//!
//! Every predicate is computed along two routes, a set-theoretic one built on
//! the invariance recursions and a graphical one built on reachability, and
//! the report records whether they agree. Disagreement is a bug.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{min_conditioned_invariant_with, s_star_set, z_star_set};
use crate::netmodel::{Network, ProblemInstance};
use crate::oracle::enumerate_dt_paths;
use crate::set::NodeSet;

/// Above this node count the DF cross-check uses layered reachability instead
/// of explicit path enumeration.
pub const DF_ENUMERATION_MAX_NODES: usize = 12;
const DF_ENUMERATION_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `Z*(B)` for a solvable SF instance.
    ControlledInvariant { z_star: NodeSet },
    /// A set that is both controlled and conditioned invariant with
    /// `D ⊆ W ⊆ V∖T`.
    Invariant { w: NodeSet },
    /// The `(S*(C), Z*(B))` pair; decoupling holds iff `S* ⊆ Z*`.
    Pair { s_star: NodeSet, z_star: NodeSet },
    /// A disturbance-to-target path that defeats the candidate placement.
    /// The indexes are the 1-based first-output and last-input positions.
    Path {
        path: Vec<usize>,
        output_index: Option<usize>,
        input_index: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolvabilityReport {
    pub solvable: bool,
    pub method_agreement: bool,
    pub witness: Witness,
}

/// Edges of `net` with tail in `tails` and head in `heads` (self-loops
/// excluded).
pub fn edges_from_to(net: &Network, tails: &NodeSet, heads: &NodeSet) -> Vec<(usize, usize)> {
    net.edges()
        .iter()
        .filter(|e| !e.is_self_loop() && tails.contains(e.from) && heads.contains(e.to))
        .map(|e| (e.from, e.to))
        .collect()
}

fn path_witness(path: Vec<usize>, inputs: &NodeSet, outputs: &NodeSet) -> Witness {
    let (o, i) = path_indexes(&path, inputs, outputs).unwrap_or((None, None));
    Witness::Path {
        path,
        output_index: o,
        input_index: i,
    }
}

/// SF feasibility: `D ⊆ Z*(B)` cross-checked against "every D-to-T path
/// meets B".
pub fn ddpsf_solvable(inst: &ProblemInstance) -> Result<SolvabilityReport> {
    inst.validate()?;
    let inputs = inst
        .inputs
        .as_ref()
        .ok_or(Error::MissingRoles("state-feedback feasibility needs an input set"))?;
    let z_star = z_star_set(inst, inputs);
    let by_sets = inst.disturbances.is_subset(&z_star);
    let sources = inst.disturbances.difference(inputs);
    let escaped = inst
        .network
        .shortest_path_avoiding(&sources, &inst.targets, inputs, &[]);
    let by_graph = escaped.is_none();
    let witness = match escaped {
        Some(path) if !by_sets => path_witness(path, inputs, &inst.outputs_or_empty()),
        _ => Witness::ControlledInvariant { z_star },
    };
    Ok(SolvabilityReport {
        solvable: by_sets,
        method_agreement: by_sets == by_graph,
        witness,
    })
}

fn io_roles(inst: &ProblemInstance) -> Result<(NodeSet, NodeSet)> {
    if inst.inputs.is_none() && inst.outputs.is_none() {
        return Err(Error::MissingRoles(
            "output/dynamic feedback feasibility needs an input or output set",
        ));
    }
    Ok((inst.inputs_or_empty(), inst.outputs_or_empty()))
}

/// Outcome of the `W` construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WConstruction {
    pub w: NodeSet,
    pub iterations: usize,
}

/// Grows the smallest set that contains `D` and is both controlled and
/// conditioned invariant, starting from `S*(C)` and absorbing the non-input
/// children of output nodes until nothing exits except output-to-input
/// edges. Fails as soon as the set touches a target.
pub fn construct_w(inst: &ProblemInstance) -> Result<WConstruction> {
    let (inputs, outputs) = (inst.inputs_or_empty(), inst.outputs_or_empty());
    let net = &inst.network;
    let n = inst.n();
    let mut w = s_star_set(inst, &outputs);
    let mut iterations = 1;
    loop {
        if !w.is_disjoint(&inst.targets) {
            return Err(Error::Infeasible(format!(
                "invariant closure {w} reaches targets {}",
                w.intersection(&inst.targets)
            )));
        }
        let inside = w.mask(n);
        let frontier = NodeSet::from_ids(w.iter().flat_map(|u| {
            net.successors(u)
                .iter()
                .copied()
                .filter(|&v| !inside[v - 1] && !inputs.contains(v))
                .collect::<Vec<_>>()
        }));
        if frontier.is_empty() {
            return Ok(WConstruction { w, iterations });
        }
        w = min_conditioned_invariant_with(net, &outputs, &w.union(&frontier), false).fixpoint;
        iterations += 1;
    }
}

/// OF feasibility: no D-to-T path survives deleting every output-to-input
/// edge, cross-checked against [`construct_w`].
pub fn ddpof_solvable(inst: &ProblemInstance) -> Result<SolvabilityReport> {
    inst.validate()?;
    let (inputs, outputs) = io_roles(inst)?;
    let net = &inst.network;
    let crossing = edges_from_to(net, &outputs, &inputs);
    let escaped = net.shortest_path_avoiding(&inst.disturbances, &inst.targets, &NodeSet::new(), &crossing);
    let by_graph = escaped.is_none();
    let construction = construct_w(inst);
    let by_sets = construction.is_ok();
    let witness = match (construction, escaped) {
        (Ok(c), _) => Witness::Invariant { w: c.w },
        (Err(_), Some(path)) => {
            // a path with no output node at all is the most direct counterexample
            let path = net
                .shortest_path_avoiding(&inst.disturbances, &inst.targets, &outputs, &[])
                .unwrap_or(path);
            path_witness(path, &inputs, &outputs)
        }
        (Err(_), None) => Witness::Pair {
            s_star: s_star_set(inst, &outputs),
            z_star: z_star_set(inst, &inputs),
        },
    };
    Ok(SolvabilityReport {
        solvable: by_graph,
        method_agreement: by_graph == by_sets,
        witness,
    })
}

/// DF feasibility: `S*(C) ⊆ Z*(B)`, cross-checked against the path-index
/// condition (first output strictly before last input on every D-to-T path).
pub fn ddpdf_solvable(inst: &ProblemInstance) -> Result<SolvabilityReport> {
    inst.validate()?;
    let (inputs, outputs) = io_roles(inst)?;
    let s_star = s_star_set(inst, &outputs);
    let z_star = z_star_set(inst, &inputs);
    let by_sets = s_star.is_subset(&z_star);

    let enumerated = if inst.n() <= DF_ENUMERATION_MAX_NODES {
        enumerate_dt_paths(inst, DF_ENUMERATION_CAP).ok()
    } else {
        None
    };
    let violating = match enumerated {
        Some(paths) => paths.into_iter().find(|p| !indexes_ordered(p, &inputs, &outputs)),
        None => df_violating_path(inst, &inputs, &outputs),
    };
    let by_graph = violating.is_none();
    let witness = match violating {
        Some(path) if !by_sets => path_witness(path, &inputs, &outputs),
        _ => Witness::Pair { s_star, z_star },
    };
    Ok(SolvabilityReport {
        solvable: by_sets,
        method_agreement: by_sets == by_graph,
        witness,
    })
}

fn indexes_ordered(path: &[usize], inputs: &NodeSet, outputs: &NodeSet) -> bool {
    matches!(path_indexes(path, inputs, outputs), Ok((Some(o), Some(i))) if o < i)
}

/// 1-based position of the first output node among positions `1..κ-1` and
/// of the last input node among positions `2..κ` of a path with `κ` nodes.
pub fn path_indexes(path: &[usize], inputs: &NodeSet, outputs: &NodeSet) -> Result<(Option<usize>, Option<usize>)> {
    let k = path.len();
    if k < 2 {
        return Err(Error::Premise(format!("path of {k} node(s) has no edge")));
    }
    let o = (1..k).find(|&s| outputs.contains(path[s - 1]));
    let i = (2..=k).rev().find(|&s| inputs.contains(path[s - 1]));
    Ok((o, i))
}

/// Shortest D-to-T path on which no output precedes the last input, found
/// by breadth-first search over (node, phase) states: in phase 0 no output
/// has been passed yet; the walk may switch to phase 1 at any node and from
/// then on may only step onto non-input nodes. A shortest violating walk is
/// always a simple path.
pub fn df_violating_path(inst: &ProblemInstance, inputs: &NodeSet, outputs: &NodeSet) -> Option<Vec<usize>> {
    let net = &inst.network;
    let n = inst.n();
    let state = |v: usize, phase: usize| phase * n + (v - 1);
    let mut parent: Vec<Option<usize>> = vec![None; 2 * n];
    let mut seen = vec![false; 2 * n];
    let mut queue = std::collections::VecDeque::new();
    for d in inst.disturbances.iter() {
        seen[state(d, 0)] = true;
        queue.push_back(state(d, 0));
    }
    let mut goal = None;
    while let Some(s) = queue.pop_front() {
        let (phase, v) = (s / n, s % n + 1);
        let at_depth = {
            let mut len = 0;
            let mut cur = s;
            while let Some(p) = parent[cur] {
                if p % n != cur % n {
                    len += 1;
                }
                cur = p;
            }
            len
        };
        if at_depth > 0 && inst.targets.contains(v) {
            goal = Some(s);
            break;
        }
        let mut next = Vec::new();
        if phase == 0 {
            next.push(state(v, 1));
            if !outputs.contains(v) {
                next.extend(net.successors(v).iter().filter(|&&w| w != v).map(|&w| state(w, 0)));
            }
        } else {
            next.extend(
                net.successors(v)
                    .iter()
                    .filter(|&&w| w != v && !inputs.contains(w))
                    .map(|&w| state(w, 1)),
            );
        }
        for t in next {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some(s);
                queue.push_back(t);
            }
        }
    }
    let mut cur = goal?;
    let mut walk = vec![cur % n + 1];
    while let Some(p) = parent[cur] {
        if p % n != cur % n {
            walk.push(p % n + 1);
        }
        cur = p;
    }
    walk.reverse();
    Some(walk)
}
