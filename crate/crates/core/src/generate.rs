//! Seeded random problem instances.

use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netmodel::{Edge, Network, ProblemInstance};
use crate::set::NodeSet;

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub nodes: RangeInclusive<usize>,
    pub edge_probability: (f64, f64),
    pub disturbances: RangeInclusive<usize>,
    pub targets: RangeInclusive<usize>,
    pub require_path: bool,
    pub self_loop_probability: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            nodes: 5..=12,
            edge_probability: (0.15, 0.4),
            disturbances: 1..=2,
            targets: 1..=2,
            require_path: true,
            self_loop_probability: 0.0,
        }
    }
}

impl RandomSpec {
    pub fn with_nodes(mut self, nodes: RangeInclusive<usize>) -> Self {
        self.nodes = nodes;
        self
    }
}

/// Draws an Erdős–Rényi style digraph with disjoint disturbance and target
/// sets. Deterministic per seed; when a disturbance-to-target path is
/// required, draws are repeated from the same stream until one appears.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(spec.nodes.clone());
        let p = rng.gen_range(spec.edge_probability.0..=spec.edge_probability.1);
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in 1..=n {
                let prob = if u == v { spec.self_loop_probability } else { p };
                if prob > 0.0 && rng.gen_bool(prob) {
                    edges.push(Edge {
                        from: u,
                        to: v,
                        weight: 1.0,
                    });
                }
            }
        }
        let nd = rng.gen_range(spec.disturbances.clone());
        let nt = rng.gen_range(spec.targets.clone());
        if nd + nt > n {
            continue;
        }
        let picked = sample(&mut rng, n, nd + nt).into_vec();
        let d = NodeSet::from_ids(picked[..nd].iter().map(|i| i + 1));
        let t = NodeSet::from_ids(picked[nd..].iter().map(|i| i + 1));
        let net = Network::new(n, edges).expect("generated network is valid");
        let inst = ProblemInstance::new(net, d, t).expect("generated roles are in range");
        if !spec.require_path || inst.has_dt_path() {
            return inst;
        }
    }
}

/// `count` instances from consecutive seeds starting at `base_seed`.
pub fn corpus(spec: &RandomSpec, base_seed: u64, count: usize) -> Vec<(u64, ProblemInstance)> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed + i;
            (seed, random_instance(spec, seed))
        })
        .collect()
}

/// Random input set `B ⊆ V∖D` and output set `C ⊆ V∖T`, each eligible
/// node included with the given probability.
pub fn random_placement(inst: &ProblemInstance, probability: f64, seed: u64) -> (NodeSet, NodeSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = inst.n();
    let inputs = NodeSet::from_ids(
        inst.disturbances
            .complement(n)
            .iter()
            .filter(|_| rng.gen_bool(probability))
            .collect::<Vec<_>>(),
    );
    let outputs = NodeSet::from_ids(
        inst.targets
            .complement(n)
            .iter()
            .filter(|_| rng.gen_bool(probability))
            .collect::<Vec<_>>(),
    );
    (inputs, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let spec = RandomSpec::default();
        assert_eq!(random_instance(&spec, 7), random_instance(&spec, 7));
    }

    #[test]
    fn respects_ranges_and_roles() {
        let spec = RandomSpec::default();
        for (_, inst) in corpus(&spec, 100, 50) {
            assert!((5..=12).contains(&inst.n()));
            assert!((1..=2).contains(&inst.disturbances.len()));
            assert!((1..=2).contains(&inst.targets.len()));
            assert!(inst.validate_for_solver().is_ok());
            assert!(inst.has_dt_path());
        }
    }

    #[test]
    fn placement_respects_roles() {
        let inst = random_instance(&RandomSpec::default(), 3);
        let (b, c) = random_placement(&inst, 0.5, 9);
        assert!(b.is_disjoint(&inst.disturbances));
        assert!(c.is_disjoint(&inst.targets));
        assert_eq!((b.clone(), c.clone()), random_placement(&inst, 0.5, 9));
        let (all_b, all_c) = random_placement(&inst, 1.0, 0);
        assert_eq!(all_b, inst.disturbances.complement(inst.n()));
        assert_eq!(all_c, inst.targets.complement(inst.n()));
    }
}
