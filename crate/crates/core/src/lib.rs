//! Minimal input/output node placement and feedback synthesis for
//! disturbance decoupling on directed networks.
//!
//! A [`ProblemInstance`] is a weighted digraph with disturbance nodes `D`,
//! target nodes `T`, and optionally input nodes `B` and output nodes `C`.
//! The crate decides whether feedback through `B`/`C` can keep every target
//! independent of every disturbance ([`solvability`]), finds placements of
//! minimum size ([`mincut`]), builds the feedback laws ([`synthesis`]) and
//! certifies them ([`verify`]). Exhaustive reference computations live in
//! [`oracle`].

pub mod error;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod invariance;
pub mod matrix;
pub mod mincut;
pub mod netmodel;
pub mod oracle;
pub mod set;
pub mod solvability;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use mincut::{
    build_extended, max_flow_min_cut, solve_min_ddpdf, solve_min_ddpdf_extremal, solve_min_ddpof, solve_min_ddpsf,
    CutResult, CutSide, ExtendedNetwork, IoPlacement, OfMode, OfPlacement,
};
pub use netmodel::{Direction, Edge, Network, ProblemInstance, Side, Violation};
pub use set::NodeSet;
pub use solvability::{ddpdf_solvable, ddpof_solvable, ddpsf_solvable, SolvabilityReport, Witness};
pub use synthesis::{ClosedLoop, Compensator, FeedbackKind, Synthesis, WeightedSystem};
pub use verify::{VerificationReport, VerifyOptions};
