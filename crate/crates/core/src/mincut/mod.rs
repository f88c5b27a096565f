//! Minimum-cardinality input/output placement through integral min cuts.

pub mod extended;
pub mod flow;
mod output_feedback;
mod placement;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::NodeSet;

pub use extended::{build_extended, ExtEdge, ExtEdgeKind, ExtendedNetwork, TwoPhaseNetwork};
pub use flow::FlowNetwork;
pub use output_feedback::{solve_min_ddpof, OfMode, OfPlacement, OF_EXACT_MAX_FREE};
pub use placement::{solve_min_ddpdf, solve_min_ddpdf_extremal, solve_min_ddpsf, IoPlacement};

/// Which minimum cut to report when several exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSide {
    /// The cut closest to the source (smallest source side).
    Source,
    /// The cut closest to the sink (smallest sink side).
    Sink,
}

/// A minimum cut of an [`ExtendedNetwork`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutResult {
    pub flow_value: u64,
    /// Extended ids on the source side of the cut.
    pub source_side: NodeSet,
    /// Extended ids on the sink side of the cut.
    pub sink_side: NodeSet,
    /// Base ids whose split edge crosses the cut.
    pub cut_nodes: NodeSet,
}

/// Integral max flow from source to sink and the requested minimum cut.
///
/// The sink-side cut is extracted by running the same residual search on
/// the reversed network from the sink. A flow above `n` means only forbidden
/// split edges separate source and sink.
pub fn max_flow_min_cut(ext: &ExtendedNetwork, side: CutSide) -> Result<CutResult> {
    let n = ext.base_node_count();
    let (net, from, to) = match side {
        CutSide::Source => (ext.clone(), ext.source(), ext.sink()),
        CutSide::Sink => (ext.reversed(), ext.sink(), ext.source()),
    };
    let mut flow = net.to_flow();
    let value = flow.max_flow(from - 1, to - 1);
    if value > n as u64 {
        return Err(Error::FlowUnbounded {
            flow: value,
            bound: n as u64,
        });
    }
    let reached = flow.residual_reachable(from - 1);
    let near = NodeSet::from_ids((1..=ext.node_count()).filter(|&v| reached[v - 1]));
    let far = near.complement(ext.node_count());
    let (source_side, sink_side) = match side {
        CutSide::Source => (near, far),
        CutSide::Sink => (far, near),
    };
    let cut_nodes = NodeSet::from_ids((1..=n).filter(|&v| source_side.contains(v) && sink_side.contains(v + n)));
    debug_assert_eq!(cut_nodes.len() as u64, value);
    Ok(CutResult {
        flow_value: value,
        source_side,
        sink_side,
        cut_nodes,
    })
}
