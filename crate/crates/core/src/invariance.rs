//! Invariance predicates and the maximal controlled / minimal conditioned
//! invariant node-set recursions.

use serde::{Deserialize, Serialize};

use crate::netmodel::{Network, ProblemInstance};
use crate::set::NodeSet;

/// Fixpoint of a node-set recursion together with its iterates.
///
/// `trace[k]` is the `k`-th iterate, starting with the initial set at
/// `trace[0]` and ending with the fixpoint. It is empty when tracing was
/// disabled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceResult {
    pub fixpoint: NodeSet,
    pub iterations: usize,
    pub trace: Vec<NodeSet>,
}

impl InvarianceResult {
    /// The `m`-th iterate; iterates past the fixpoint equal the fixpoint.
    pub fn iterate(&self, m: usize) -> &NodeSet {
        self.trace.get(m).unwrap_or(&self.fixpoint)
    }
}

/// True iff no edge leaves `z`.
pub fn is_invariant_set(net: &Network, z: &NodeSet) -> bool {
    exits(net, z).next().is_none()
}

/// True iff every edge leaving `z` lands on an input node.
pub fn is_controlled_invariant(net: &Network, z: &NodeSet, inputs: &NodeSet) -> bool {
    exits(net, z).all(|(_, head)| inputs.contains(head))
}

/// True iff every edge leaving `s` starts at an output node.
pub fn is_conditioned_invariant(net: &Network, s: &NodeSet, outputs: &NodeSet) -> bool {
    exits(net, s).all(|(tail, _)| outputs.contains(tail))
}

/// `s ⊆ z`, `s` conditioned invariant for `outputs`, `z` controlled
/// invariant for `inputs`.
pub fn is_cab_pair(net: &Network, s: &NodeSet, z: &NodeSet, inputs: &NodeSet, outputs: &NodeSet) -> bool {
    s.is_subset(z) && is_conditioned_invariant(net, s, outputs) && is_controlled_invariant(net, z, inputs)
}

fn exits<'a>(net: &'a Network, set: &NodeSet) -> impl Iterator<Item = (usize, usize)> + 'a {
    let inside = set.mask(net.node_count());
    net.edges()
        .iter()
        .filter(move |e| inside[e.from - 1] && !inside[e.to - 1])
        .map(|e| (e.from, e.to))
}

/// Largest subset of `z0` that is controlled invariant for `inputs`.
pub fn max_controlled_invariant(net: &Network, inputs: &NodeSet, z0: &NodeSet) -> InvarianceResult {
    max_controlled_invariant_with(net, inputs, z0, true)
}

pub fn max_controlled_invariant_with(
    net: &Network,
    inputs: &NodeSet,
    z0: &NodeSet,
    keep_trace: bool,
) -> InvarianceResult {
    let n = net.node_count();
    let is_input = inputs.mask(n);
    let mut current = z0.mask(n);
    let mut trace = Vec::new();
    if keep_trace {
        trace.push(z0.clone());
    }
    if z0.is_empty() {
        return InvarianceResult {
            fixpoint: NodeSet::new(),
            iterations: 0,
            trace,
        };
    }
    let mut iterations = 0;
    loop {
        // batch removal: every qualifying node is judged against the same iterate
        let removed: Vec<usize> = (0..n)
            .filter(|&i| {
                current[i]
                    && net
                        .successors(i + 1)
                        .iter()
                        .any(|&j| !current[j - 1] && !is_input[j - 1])
            })
            .collect();
        if removed.is_empty() {
            break;
        }
        for i in removed {
            current[i] = false;
        }
        iterations += 1;
        if keep_trace {
            trace.push(NodeSet::from_mask(&current));
        }
    }
    InvarianceResult {
        fixpoint: NodeSet::from_mask(&current),
        iterations,
        trace,
    }
}

/// Smallest superset of `s0` that is conditioned invariant for `outputs`.
pub fn min_conditioned_invariant(net: &Network, outputs: &NodeSet, s0: &NodeSet) -> InvarianceResult {
    min_conditioned_invariant_with(net, outputs, s0, true)
}

pub fn min_conditioned_invariant_with(
    net: &Network,
    outputs: &NodeSet,
    s0: &NodeSet,
    keep_trace: bool,
) -> InvarianceResult {
    let n = net.node_count();
    let is_output = outputs.mask(n);
    let mut current = s0.mask(n);
    let mut trace = Vec::new();
    if keep_trace {
        trace.push(s0.clone());
    }
    if s0.is_empty() {
        return InvarianceResult {
            fixpoint: NodeSet::new(),
            iterations: 0,
            trace,
        };
    }
    let mut iterations = 0;
    loop {
        let mut added = vec![false; n];
        let mut any = false;
        for i in (0..n).filter(|&i| current[i] && !is_output[i]) {
            for &j in net.successors(i + 1) {
                if !current[j - 1] && !added[j - 1] {
                    added[j - 1] = true;
                    any = true;
                }
            }
        }
        if !any {
            break;
        }
        for (c, a) in current.iter_mut().zip(added) {
            *c |= a;
        }
        iterations += 1;
        if keep_trace {
            trace.push(NodeSet::from_mask(&current));
        }
    }
    InvarianceResult {
        fixpoint: NodeSet::from_mask(&current),
        iterations,
        trace,
    }
}

/// `Z*(B)` initialised at `V∖T`.
pub fn z_star(inst: &ProblemInstance, inputs: &NodeSet) -> InvarianceResult {
    let z0 = inst.targets.complement(inst.n());
    max_controlled_invariant(&inst.network, inputs, &z0)
}

/// `S*(C)` initialised at `D`.
pub fn s_star(inst: &ProblemInstance, outputs: &NodeSet) -> InvarianceResult {
    min_conditioned_invariant(&inst.network, outputs, &inst.disturbances)
}

pub(crate) fn z_star_set(inst: &ProblemInstance, inputs: &NodeSet) -> NodeSet {
    let z0 = inst.targets.complement(inst.n());
    max_controlled_invariant_with(&inst.network, inputs, &z0, false).fixpoint
}

pub(crate) fn s_star_set(inst: &ProblemInstance, outputs: &NodeSet) -> NodeSet {
    min_conditioned_invariant_with(&inst.network, outputs, &inst.disturbances, false).fixpoint
}
