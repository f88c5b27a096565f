//! State-feedback and dynamic-feedback placement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{s_star_set, z_star_set};
use crate::netmodel::{ProblemInstance, Side};
use crate::set::NodeSet;
use crate::solvability::{ddpdf_solvable, ddpsf_solvable};

use super::extended::{build_extended, TwoPhaseNetwork};
use super::{max_flow_min_cut, CutSide};

/// An input/output placement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoPlacement {
    pub inputs: NodeSet,
    pub outputs: NodeSet,
}

impl IoPlacement {
    pub fn total(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }
}

/// Minimum input set for state-feedback decoupling: the split edges of the
/// source-side minimum cut of the extended network with `D` forbidden.
///
/// The result is checked against the boundary characterization
/// `B = ∂+(Z*(B))`, `B ∩ Z*(B) = ∅`; a failed check is a bug and panics.
pub fn solve_min_ddpsf(inst: &ProblemInstance) -> Result<NodeSet> {
    inst.validate_for_solver()?;
    let ext = build_extended(inst, &inst.disturbances);
    let inputs = max_flow_min_cut(&ext, CutSide::Source)?.cut_nodes;

    let z_star = z_star_set(inst, &inputs);
    let placed = inst.clone().with_inputs(inputs.clone())?;
    assert!(ddpsf_solvable(&placed)?.solvable, "cut {inputs} does not decouple");
    assert_eq!(
        inst.network.boundary(&z_star, Side::Out),
        inputs,
        "B is not the out-boundary of Z*(B)"
    );
    assert!(inputs.is_disjoint(&z_star), "B meets Z*(B)");
    Ok(inputs)
}

/// Minimum `|B| + |C|` placement for dynamic-feedback decoupling.
///
/// Solved exactly by one minimum cut of the [`TwoPhaseNetwork`]. Among
/// optimal placements, outputs are taken closest to the disturbances and
/// inputs closest to the targets whenever those two extremal choices combine
/// into an optimal placement; otherwise the source-side cut is returned.
pub fn solve_min_ddpdf(inst: &ProblemInstance) -> Result<IoPlacement> {
    inst.validate_for_solver()?;
    let mut net = TwoPhaseNetwork::build(inst);
    let (source, sink) = (net.source(), net.sink());
    let value = net.flow.max_flow(source, sink);
    let bound = 2 * inst.n() as u64;
    if value > bound {
        return Err(Error::FlowUnbounded { flow: value, bound });
    }
    let (b_src, c_src) = net.selection(&net.flow.residual_reachable(source));
    let far: Vec<bool> = net.flow.residual_coreachable(sink).into_iter().map(|x| !x).collect();
    let (b_snk, _) = net.selection(&far);
    debug_assert_eq!((b_src.len() + c_src.len()) as u64, value);
    debug_assert!(net.split_edges().all(|e| net.flow.flow(e) <= 1));

    let extremal = IoPlacement {
        inputs: b_snk,
        outputs: c_src.clone(),
    };
    let placement = if extremal.total() as u64 == value && df_decouples(inst, &extremal) {
        extremal
    } else {
        IoPlacement {
            inputs: b_src,
            outputs: c_src,
        }
    };
    assert!(
        df_decouples(inst, &placement),
        "minimum cut {placement:?} does not decouple"
    );
    Ok(placement)
}

/// Dynamic-feedback placement from two independent extremal cuts: outputs
/// from the source-side cut with `T` forbidden, inputs from the sink-side cut
/// with `D` forbidden.
///
/// Each cut is individually minimal, but the pair need not satisfy
/// `S*(C) ⊆ Z*(B)`; in that case [`Error::ExtremalCutInsufficient`] is
/// returned with the offending pair. [`solve_min_ddpdf`] has no such gap.
pub fn solve_min_ddpdf_extremal(inst: &ProblemInstance) -> Result<IoPlacement> {
    inst.validate_for_solver()?;
    let outputs = max_flow_min_cut(&build_extended(inst, &inst.targets), CutSide::Source)?.cut_nodes;
    let inputs = max_flow_min_cut(&build_extended(inst, &inst.disturbances), CutSide::Sink)?.cut_nodes;
    let placed = inst
        .clone()
        .with_inputs(inputs.clone())?
        .with_outputs(outputs.clone())?;
    if ddpdf_solvable(&placed)?.solvable {
        Ok(IoPlacement { inputs, outputs })
    } else {
        Err(Error::ExtremalCutInsufficient { inputs, outputs })
    }
}

fn df_decouples(inst: &ProblemInstance, p: &IoPlacement) -> bool {
    s_star_set(inst, &p.outputs).is_subset(&z_star_set(inst, &p.inputs))
}
