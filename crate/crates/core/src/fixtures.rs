//! Reference networks shared by tests, benches and the CLI.

use crate::netmodel::{Network, ProblemInstance};
use crate::set::NodeSet;

/// Five-node fork: `v1→v2, v2→v3, v3→v4, v2→v5, v5→v4`.
pub fn fork_graph() -> Network {
    Network::from_pairs(5, &[(1, 2), (2, 3), (3, 4), (2, 5), (5, 4)]).expect("valid fixture")
}

/// Fork graph with `D = {v1}`, `T = {v4}`.
pub fn fork_instance() -> ProblemInstance {
    ProblemInstance::new(fork_graph(), NodeSet::from([1]), NodeSet::from([4])).expect("valid fixture")
}

/// Seven-node network where two disturbance chains merge at `v3` before
/// fanning out to two targets: `v1→v2→v3`, `v5→v6→v3`, `v3→v4`, `v3→v7`,
/// with `D = {v1, v5}` and `T = {v4, v7}`.
pub fn merge_instance() -> ProblemInstance {
    let net = Network::from_pairs(7, &[(1, 2), (2, 3), (3, 4), (5, 6), (6, 3), (3, 7)]).expect("valid fixture");
    ProblemInstance::new(net, NodeSet::from([1, 5]), NodeSet::from([4, 7])).expect("valid fixture")
}

/// Fork graph with the disturbance placed downstream of the target, so no
/// disturbance-to-target path exists.
pub fn disconnected_instance() -> ProblemInstance {
    ProblemInstance::new(fork_graph(), NodeSet::from([4]), NodeSet::from([1])).expect("valid fixture")
}
