use thiserror::Error;

use crate::netmodel::Violation;
use crate::set::NodeSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node count must be positive")]
    EmptyNetwork,
    #[error("unknown node v{0}")]
    UnknownNode(usize),
    #[error("duplicate edge v{0} -> v{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge v{0} -> v{1} has zero weight")]
    ZeroWeight(usize, usize),
    #[error("instance violates role disjointness: {}", format_violations(.0))]
    InstanceViolation(Vec<Violation>),
    #[error("{0}")]
    MissingRoles(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("flow value {flow} exceeds the selectable bound {bound}; no finite node cut exists")]
    FlowUnbounded { flow: u64, bound: u64 },
    #[error("extremal cuts B = {inputs}, C = {outputs} do not satisfy S*(C) ⊆ Z*(B)")]
    ExtremalCutInsufficient { inputs: NodeSet, outputs: NodeSet },
    #[error("{what}: size {actual} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("path enumeration exceeded cap of {0} paths")]
    CapExceeded(usize),
    #[error("premise violated: {0}")]
    Premise(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("step size guard violated: dt * |A|_inf = {0:.3} (must be < 0.5)")]
    StepSizeGuard(f64),
    #[error("general friend unsupported: input set is not the out-boundary of the invariant set")]
    GeneralFriendUnsupported,
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
