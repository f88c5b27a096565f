//! Exhaustive ground-truth computations.
//!
//! Everything here is exponential and guarded by hard size caps; exceeding a
//! cap is an error, never a silent fallback.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{is_conditioned_invariant, is_controlled_invariant, s_star_set, z_star_set};
use crate::netmodel::{Network, ProblemInstance};
use crate::set::NodeSet;
use crate::solvability::edges_from_to;

pub const MAX_NODES_INPUTS: usize = 14;
pub const MAX_NODES_IO: usize = 10;
pub const MAX_NODES_EXTREMES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IoMode {
    /// Static output feedback: some controlled and conditioned invariant `W`.
    Of,
    /// Dynamic feedback: `S*(C) ⊆ Z*(B)`.
    Df,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteInputs {
    pub min_size: usize,
    pub all_minima: Vec<NodeSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteIo {
    pub min_total: usize,
    /// `(B, C)` pairs attaining the minimum.
    pub all_minima: Vec<(NodeSet, NodeSet)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantExtremes {
    pub max_controlled_subset: NodeSet,
    pub min_conditioned_superset: NodeSet,
}

/// All simple paths that start at a disturbance and end at a target, in
/// lexicographic order of their node sequences. A path may pass through
/// other targets before ending.
pub fn enumerate_dt_paths(inst: &ProblemInstance, cap: usize) -> Result<Vec<Vec<usize>>> {
    let net = &inst.network;
    let mut out = Vec::new();
    let mut on_path = vec![false; net.node_count()];
    let mut path = Vec::new();
    for d in inst.disturbances.iter() {
        dfs_paths(net, d, &inst.targets, &mut on_path, &mut path, &mut out, cap)?;
    }
    out.sort();
    Ok(out)
}

fn dfs_paths(
    net: &Network,
    v: usize,
    targets: &NodeSet,
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    on_path[v - 1] = true;
    path.push(v);
    if path.len() > 1 && targets.contains(v) {
        if out.len() == cap {
            return Err(Error::CapExceeded(cap));
        }
        out.push(path.clone());
    }
    for &w in net.successors(v) {
        if !on_path[w - 1] {
            dfs_paths(net, w, targets, on_path, path, out, cap)?;
        }
    }
    path.pop();
    on_path[v - 1] = false;
    Ok(())
}

fn check_size(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::SizeLimit { what, limit, actual: n })
    } else {
        Ok(())
    }
}

/// Minimum-cardinality input sets with `D ⊆ Z*(B)`, by enumeration of all
/// subsets of `V∖D` in increasing size.
pub fn brute_min_inputs(inst: &ProblemInstance) -> Result<BruteInputs> {
    check_size("brute_min_inputs node count", inst.n(), MAX_NODES_INPUTS)?;
    let candidates: Vec<usize> = inst.disturbances.complement(inst.n()).iter().collect();
    for k in 0..=candidates.len() {
        let minima: Vec<NodeSet> = candidates
            .iter()
            .copied()
            .combinations(k)
            .map(NodeSet::from_ids)
            .filter(|b| inst.disturbances.is_subset(&z_star_set(inst, b)))
            .collect();
        if !minima.is_empty() {
            return Ok(BruteInputs {
                min_size: k,
                all_minima: minima,
            });
        }
    }
    unreachable!("B = V∖D is always feasible")
}

fn io_feasible(inst: &ProblemInstance, b: &NodeSet, c: &NodeSet, mode: IoMode) -> bool {
    match mode {
        IoMode::Df => s_star_set(inst, c).is_subset(&z_star_set(inst, b)),
        IoMode::Of => {
            let cut = edges_from_to(&inst.network, c, b);
            inst.network
                .reachable_avoiding(&inst.disturbances, &NodeSet::new(), &cut)
                .is_disjoint(&inst.targets)
        }
    }
}

/// Minimum `|B| + |C|` over `B ⊆ V∖D`, `C ⊆ V∖T`, enumerated by increasing
/// total.
pub fn brute_min_io(inst: &ProblemInstance, mode: IoMode) -> Result<BruteIo> {
    check_size("brute_min_io node count", inst.n(), MAX_NODES_IO)?;
    let n = inst.n();
    let b_cand: Vec<usize> = inst.disturbances.complement(n).iter().collect();
    let c_cand: Vec<usize> = inst.targets.complement(n).iter().collect();
    for total in 0..=(b_cand.len() + c_cand.len()) {
        let mut minima = Vec::new();
        for kb in 0..=total.min(b_cand.len()) {
            let kc = total - kb;
            if kc > c_cand.len() {
                continue;
            }
            for b in b_cand.iter().copied().combinations(kb) {
                let b = NodeSet::from_ids(b);
                for c in c_cand.iter().copied().combinations(kc) {
                    let c = NodeSet::from_ids(c);
                    if io_feasible(inst, &b, &c, mode) {
                        minima.push((b.clone(), c));
                    }
                }
            }
        }
        if !minima.is_empty() {
            return Ok(BruteIo {
                min_total: total,
                all_minima: minima,
            });
        }
    }
    unreachable!("B = V∖D with C = V∖T is always feasible")
}

/// Maximum controlled-invariant subset of `z0` and minimum
/// conditioned-invariant superset of `s0`, by exhaustive subset search.
pub fn brute_invariant_extremes(
    net: &Network,
    inputs: &NodeSet,
    outputs: &NodeSet,
    z0: &NodeSet,
    s0: &NodeSet,
) -> Result<InvariantExtremes> {
    let n = net.node_count();
    check_size("brute_invariant_extremes node count", n, MAX_NODES_EXTREMES)?;

    let z_items: Vec<usize> = z0.iter().collect();
    let mut best_z = NodeSet::new();
    for mask in 0u32..(1 << z_items.len()) {
        let cand = subset(&z_items, mask);
        if cand.len() > best_z.len() && is_controlled_invariant(net, &cand, inputs) {
            best_z = cand;
        }
    }

    let free: Vec<usize> = s0.complement(n).iter().collect();
    let mut best_s = NodeSet::full(n);
    for mask in 0u32..(1 << free.len()) {
        let cand = s0.union(&subset(&free, mask));
        if cand.len() < best_s.len() && is_conditioned_invariant(net, &cand, outputs) {
            best_s = cand;
        }
    }

    Ok(InvariantExtremes {
        max_controlled_subset: best_z,
        min_conditioned_superset: best_s,
    })
}

fn subset(items: &[usize], mask: u32) -> NodeSet {
    NodeSet::from_ids(
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v),
    )
}
