//! Numerical decoupling laws on a weighted realization of an instance:
//! state-feedback and output-injection friends, the static output gain, and
//! full- and reduced-order observer-based compensators.
//!
//! Input, output, disturbance and target matrices are elementary
//! selections, so every formula reduces to row and column cancellations of
//! `A` and no linear solve is needed anywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{is_conditioned_invariant, is_controlled_invariant, s_star_set, z_star_set};
use crate::matrix::DenseMatrix;
use crate::netmodel::{Network, ProblemInstance, Side};
use crate::set::NodeSet;

/// Smallest and largest edge-weight magnitude drawn by [`random_weights`].
pub const WEIGHT_RANGE: (f64, f64) = (0.1, 2.0);

/// Feedback architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    /// State feedback `u = -F x`.
    Sf,
    /// Static output feedback `u = -G y`.
    Of,
    /// Dynamic (observer-based) output feedback.
    Df,
}

impl std::fmt::Display for FeedbackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeedbackKind::Sf => "sf",
            FeedbackKind::Of => "of",
            FeedbackKind::Df => "df",
        })
    }
}

/// `ẋ = A x + B u + D w`, `y = C x`, `z = T x` realized on an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSystem {
    pub network: Network,
    pub inputs: NodeSet,
    pub outputs: NodeSet,
    pub disturbances: NodeSet,
    pub targets: NodeSet,
    pub a: DenseMatrix,
    pub b_mat: DenseMatrix,
    pub c_mat: DenseMatrix,
    pub d_mat: DenseMatrix,
    pub t_mat: DenseMatrix,
}

impl WeightedSystem {
    /// Realization using the instance's own edge weights; absent input or
    /// output sets become empty.
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let n = inst.n();
        let (inputs, outputs) = (inst.inputs_or_empty(), inst.outputs_or_empty());
        WeightedSystem {
            a: inst.network.adjacency_matrix(),
            b_mat: DenseMatrix::selection_columns(&inputs, n),
            c_mat: DenseMatrix::selection_rows(&outputs, n),
            d_mat: DenseMatrix::selection_columns(&inst.disturbances, n),
            t_mat: DenseMatrix::selection_rows(&inst.targets, n),
            network: inst.network.clone(),
            inputs,
            outputs,
            disturbances: inst.disturbances.clone(),
            targets: inst.targets.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b_mat.cols()
    }

    pub fn p(&self) -> usize {
        self.c_mat.rows()
    }
}

/// Same support as `net`, each weight drawn uniformly from
/// `[-2, -0.1] ∪ [0.1, 2]`; deterministic per seed.
pub fn random_weights(net: &Network, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    net.reweighted(|_| {
        let magnitude = rng.gen_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1);
        if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        }
    })
    .expect("nonzero weights on a valid support")
}

/// [`WeightedSystem`] of `inst` after replacing its weights by
/// [`random_weights`].
pub fn assign_random_weights(inst: &ProblemInstance, seed: u64) -> WeightedSystem {
    let mut weighted = inst.clone();
    weighted.network = random_weights(&inst.network, seed);
    WeightedSystem::from_instance(&weighted)
}

/// State-feedback friend `F = BᵀA + F_p` of `z` (default `F_p = 0`).
///
/// Requires the inputs to be exactly the out-boundary of `z`; then `A - BF`
/// has the input rows of `A` cancelled and keeps `z` invariant. A caller
/// supplied `F_p` must vanish on the columns indexed by `z`.
pub fn friend_state_feedback(sys: &WeightedSystem, z: &NodeSet, fp: Option<&DenseMatrix>) -> Result<DenseMatrix> {
    if !is_controlled_invariant(&sys.network, z, &sys.inputs) {
        return Err(Error::Premise(format!(
            "{z} is not controlled invariant for B = {}",
            sys.inputs
        )));
    }
    if sys.network.boundary(z, Side::Out) != sys.inputs {
        return Err(Error::GeneralFriendUnsupported);
    }
    let mut f = sys.b_mat.transpose().mul(&sys.a)?;
    if let Some(fp) = fp {
        if fp.shape() != f.shape() {
            return Err(Error::DimensionMismatch(format!(
                "F_p is {:?}, expected {:?}",
                fp.shape(),
                f.shape()
            )));
        }
        if z.iter().any(|j| (0..fp.rows()).any(|i| fp[(i, j - 1)] != 0.0)) {
            return Err(Error::Premise(format!("F_p must vanish on the columns of {z}")));
        }
        f = f.add(fp)?;
    }
    Ok(f)
}

/// Output-injection friend `H = ACᵀ + H_p` of `s` (default `H_p = 0`).
///
/// Requires the outputs to be exactly the in-boundary of `s`; then `A - HC`
/// has the output columns of `A` cancelled and keeps `s` invariant. A caller
/// supplied `H_p` must vanish on the rows outside `s`.
pub fn friend_output_injection(sys: &WeightedSystem, s: &NodeSet, hp: Option<&DenseMatrix>) -> Result<DenseMatrix> {
    if !is_conditioned_invariant(&sys.network, s, &sys.outputs) {
        return Err(Error::Premise(format!(
            "{s} is not conditioned invariant for C = {}",
            sys.outputs
        )));
    }
    if sys.network.boundary(s, Side::In) != sys.outputs {
        return Err(Error::Premise(format!(
            "C = {} is not the in-boundary of {s}",
            sys.outputs
        )));
    }
    let mut h = sys.a.mul(&sys.c_mat.transpose())?;
    if let Some(hp) = hp {
        if hp.shape() != h.shape() {
            return Err(Error::DimensionMismatch(format!(
                "H_p is {:?}, expected {:?}",
                hp.shape(),
                h.shape()
            )));
        }
        let inside = s.mask(sys.n());
        if (0..hp.rows()).any(|i| !inside[i] && hp.row(i).iter().any(|&x| x != 0.0)) {
            return Err(Error::Premise(format!("H_p must vanish on the rows outside {s}")));
        }
        h = h.add(hp)?;
    }
    Ok(h)
}

/// Static output gain `G = BᵀACᵀ`, which deletes exactly the edges from
/// output to input nodes. Requires `B = ∂+(w)` and `C = ∂−(w)`.
pub fn output_feedback_gain(sys: &WeightedSystem, w: &NodeSet) -> Result<DenseMatrix> {
    let out = sys.network.boundary(w, Side::Out);
    let inn = sys.network.boundary(w, Side::In);
    if out != sys.inputs || inn != sys.outputs {
        return Err(Error::Premise(format!(
            "B = {}, C = {} are not the boundaries ∂+ = {out}, ∂− = {inn} of {w}",
            sys.inputs, sys.outputs
        )));
    }
    Ok(static_gain(sys))
}

fn static_gain(sys: &WeightedSystem) -> DenseMatrix {
    sys.b_mat
        .transpose()
        .mul(&sys.a)
        .and_then(|ba| ba.mul(&sys.c_mat.transpose()))
        .expect("selection dimensions agree")
}

/// `A - B F`.
pub fn state_feedback_matrix(sys: &WeightedSystem, f: &DenseMatrix) -> Result<DenseMatrix> {
    sys.a.sub(&sys.b_mat.mul(f)?)
}

/// `A - B G C`.
pub fn output_feedback_matrix(sys: &WeightedSystem, g: &DenseMatrix) -> Result<DenseMatrix> {
    sys.a.sub(&sys.b_mat.mul(g)?.mul(&sys.c_mat)?)
}

/// Dynamic output feedback `x̂' = K x̂ + L y`, `u = -M x̂ - G y`, realized on
/// the coordinates selected by `projection`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compensator {
    pub k: DenseMatrix,
    pub l: DenseMatrix,
    pub m: DenseMatrix,
    pub g: DenseMatrix,
    pub projection: DenseMatrix,
}

impl Compensator {
    pub fn order(&self) -> usize {
        self.k.rows()
    }
}

/// Full-order compensator: `K = A - BF - HC + BGC`, `L = H - BG`,
/// `M = F - GC`, with identity projection.
pub fn full_order_compensator(
    sys: &WeightedSystem,
    f: &DenseMatrix,
    h: &DenseMatrix,
    g: &DenseMatrix,
) -> Result<Compensator> {
    let (b, c) = (&sys.b_mat, &sys.c_mat);
    let bgc = b.mul(g)?.mul(c)?;
    let k = sys.a.sub(&b.mul(f)?)?.sub(&h.mul(c)?)?.add(&bgc)?;
    let l = h.sub(&b.mul(g)?)?;
    let m = f.sub(&g.mul(c)?)?;
    Ok(Compensator {
        k,
        l,
        m,
        g: g.clone(),
        projection: DenseMatrix::identity(sys.n()),
    })
}

/// Elementary rows of `z ∖ s` in ascending node order.
pub fn projection_map(z: &NodeSet, s: &NodeSet, n: usize) -> Result<DenseMatrix> {
    if !s.is_subset(z) {
        return Err(Error::Premise(format!("{s} is not contained in {z}")));
    }
    Ok(DenseMatrix::selection_rows(&z.difference(s), n))
}

/// Reduced-order compensator `(PKPᵀ, PL, MPᵀ, G)` of order `|z| - |s|`,
/// built from the default friends of `z` and `s` and `G = BᵀACᵀ`.
pub fn reduced_order_compensator(sys: &WeightedSystem, z: &NodeSet, s: &NodeSet) -> Result<Compensator> {
    let f = friend_state_feedback(sys, z, None)?;
    let h = friend_output_injection(sys, s, None)?;
    let g = static_gain(sys);
    let full = full_order_compensator(sys, &f, &h, &g)?;
    let p = projection_map(z, s, sys.n())?;
    let pt = p.transpose();
    Ok(Compensator {
        k: p.mul(&full.k)?.mul(&pt)?,
        l: p.mul(&full.l)?,
        m: full.m.mul(&pt)?,
        g,
        projection: p,
    })
}

/// Plant-plus-compensator dynamics `x_c' = A_c x_c + D_c w`, `z = T_c x_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoop {
    pub a_c: DenseMatrix,
    pub d_c: DenseMatrix,
    pub t_c: DenseMatrix,
    /// Number of leading plant coordinates.
    pub plant_dim: usize,
}

impl ClosedLoop {
    /// Closed loop without compensator state.
    pub fn static_loop(sys: &WeightedSystem, a_cl: DenseMatrix) -> Self {
        ClosedLoop {
            a_c: a_cl,
            d_c: sys.d_mat.clone(),
            t_c: sys.t_mat.clone(),
            plant_dim: sys.n(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a_c.rows()
    }
}

/// `A_c = [[A - BGC, -BM], [LC, K]]`, `D_c = [D; 0]`, `T_c = [T 0]`.
pub fn assemble_closed_loop(sys: &WeightedSystem, comp: &Compensator) -> Result<ClosedLoop> {
    let k = comp.order();
    let (b, c) = (&sys.b_mat, &sys.c_mat);
    let a_c = DenseMatrix::block2x2(
        &output_feedback_matrix(sys, &comp.g)?,
        &b.mul(&comp.m)?.scale(-1.0),
        &comp.l.mul(c)?,
        &comp.k,
    )?;
    Ok(ClosedLoop {
        a_c,
        d_c: DenseMatrix::vstack(&sys.d_mat, &DenseMatrix::zeros(k, sys.d_mat.cols()))?,
        t_c: DenseMatrix::hstack(&sys.t_mat, &DenseMatrix::zeros(sys.t_mat.rows(), k))?,
        plant_dim: sys.n(),
    })
}

/// Everything produced by synthesizing one feedback law on an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub kind: FeedbackKind,
    pub system: WeightedSystem,
    /// `F` for state feedback.
    pub f: Option<DenseMatrix>,
    /// `G` for static output feedback.
    pub g: Option<DenseMatrix>,
    pub compensator: Option<Compensator>,
    pub closed_loop: ClosedLoop,
    /// The set certified invariant under the closed loop's plant block:
    /// `Z*` for sf and df, `W` for of.
    pub invariant: NodeSet,
    pub z_star: NodeSet,
    pub s_star: NodeSet,
}

/// Builds the feedback law of `kind` for the placement already recorded in
/// `sys` (inputs, and outputs unless `kind` is sf).
///
/// For of, `w` must be the set accompanying the placement; for sf and df it
/// is ignored and the invariant sets are recomputed.
pub fn synthesize(sys: &WeightedSystem, kind: FeedbackKind, w: Option<&NodeSet>) -> Result<Synthesis> {
    let inst = ProblemInstance {
        network: sys.network.clone(),
        disturbances: sys.disturbances.clone(),
        targets: sys.targets.clone(),
        inputs: Some(sys.inputs.clone()),
        outputs: Some(sys.outputs.clone()),
    };
    let z_star = z_star_set(&inst, &sys.inputs);
    let s_star = s_star_set(&inst, &sys.outputs);
    let mut out = Synthesis {
        kind,
        system: sys.clone(),
        f: None,
        g: None,
        compensator: None,
        closed_loop: ClosedLoop::static_loop(sys, sys.a.clone()),
        invariant: z_star.clone(),
        z_star,
        s_star,
    };
    match kind {
        FeedbackKind::Sf => {
            let f = friend_state_feedback(sys, &out.z_star, None)?;
            out.closed_loop = ClosedLoop::static_loop(sys, state_feedback_matrix(sys, &f)?);
            out.f = Some(f);
        }
        FeedbackKind::Of => {
            let w = w.ok_or(Error::MissingRoles("static output feedback synthesis needs the set W"))?;
            let g = output_feedback_gain(sys, w)?;
            out.closed_loop = ClosedLoop::static_loop(sys, output_feedback_matrix(sys, &g)?);
            out.invariant = w.clone();
            out.g = Some(g);
        }
        FeedbackKind::Df => {
            let comp = reduced_order_compensator(sys, &out.z_star, &out.s_star)?;
            out.closed_loop = assemble_closed_loop(sys, &comp)?;
            out.compensator = Some(comp);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fork_instance, merge_instance};
    use crate::verify::invariance_residual as leak;

    fn fork_with(b: &[usize], c: &[usize], seed: u64) -> WeightedSystem {
        let inst = fork_instance()
            .with_inputs(NodeSet::from_ids(b.iter().copied()))
            .unwrap()
            .with_outputs(NodeSet::from_ids(c.iter().copied()))
            .unwrap();
        assign_random_weights(&inst, seed)
    }

    #[test]
    fn random_weights_are_deterministic_and_in_range() {
        let net = merge_instance().network;
        let a = random_weights(&net, 7).adjacency_matrix();
        assert_eq!(a, random_weights(&net, 7).adjacency_matrix());
        assert_ne!(a, random_weights(&net, 8).adjacency_matrix());
        assert_eq!(a.count_nonzeros(), net.edges().len());
        for e in net.edges() {
            let x = a[(e.to - 1, e.from - 1)].abs();
            assert!((0.1..=2.0).contains(&x));
        }
    }

    #[test]
    fn fork_state_feedback_friend_cancels_one_row() {
        let sys = fork_with(&[2], &[], 1);
        let f = friend_state_feedback(&sys, &NodeSet::from([1]), None).unwrap();
        assert_eq!(f.shape(), (1, 5));
        assert_eq!(f.row(0), &[sys.a[(1, 0)], 0.0, 0.0, 0.0, 0.0]);
        let closed = state_feedback_matrix(&sys, &f).unwrap();
        assert!(closed.row(1).iter().all(|&x| x == 0.0));
        assert_eq!(leak(&closed, &NodeSet::from([1])), 0.0);
        assert!(leak(&sys.a, &NodeSet::from([1])) > 0.0);
    }

    #[test]
    fn friend_premises() {
        let sys = fork_with(&[2, 4], &[], 1);
        // {v1} is controlled invariant, but v4 is an input off its boundary
        assert_eq!(
            friend_state_feedback(&sys, &NodeSet::from([1]), None),
            Err(Error::GeneralFriendUnsupported)
        );
        let sys = fork_with(&[3], &[], 1);
        assert!(matches!(
            friend_state_feedback(&sys, &NodeSet::from([1, 2]), None),
            Err(Error::Premise(_))
        ));
    }

    #[test]
    fn structured_fp_is_validated() {
        let sys = fork_with(&[2], &[], 3);
        let z = NodeSet::from([1]);
        let mut fp = DenseMatrix::zeros(1, 5);
        fp[(0, 3)] = 0.5;
        let f = friend_state_feedback(&sys, &z, Some(&fp)).unwrap();
        assert_eq!(f[(0, 3)], 0.5);
        assert_eq!(leak(&state_feedback_matrix(&sys, &f).unwrap(), &z), 0.0);
        fp[(0, 0)] = 1.0;
        assert!(matches!(
            friend_state_feedback(&sys, &z, Some(&fp)),
            Err(Error::Premise(_))
        ));
    }

    #[test]
    fn empty_inputs_give_empty_friend() {
        let inst = crate::fixtures::disconnected_instance()
            .with_inputs(NodeSet::new())
            .unwrap();
        let sys = assign_random_weights(&inst, 0);
        let z = z_star_set(&inst, &NodeSet::new());
        let f = friend_state_feedback(&sys, &z, None).unwrap();
        assert_eq!(f.shape(), (0, 5));
        assert_eq!(state_feedback_matrix(&sys, &f).unwrap(), sys.a);
    }

    #[test]
    fn merge_friend_cancels_both_parents_of_v3() {
        let inst = merge_instance().with_inputs(NodeSet::from([3])).unwrap();
        let sys = assign_random_weights(&inst, 11);
        let f = friend_state_feedback(&sys, &NodeSet::from([1, 2, 5, 6]), None).unwrap();
        let closed = state_feedback_matrix(&sys, &f).unwrap();
        let removed: Vec<(usize, usize)> = sys
            .network
            .edges()
            .iter()
            .filter(|e| closed[(e.to - 1, e.from - 1)] == 0.0)
            .map(|e| (e.from, e.to))
            .collect();
        assert_eq!(removed, vec![(2, 3), (6, 3)]);
    }

    #[test]
    fn output_injection_and_duality() {
        let sys = fork_with(&[], &[1], 5);
        let s = NodeSet::from([1]);
        let h = friend_output_injection(&sys, &s, None).unwrap();
        assert_eq!(h.shape(), (5, 1));
        let closed = sys.a.sub(&h.mul(&sys.c_mat).unwrap()).unwrap();
        assert!((0..5).all(|i| closed[(i, 0)] == 0.0));

        // transpose route: inputs = C on Aᵀ with Z = V∖S
        let dual_inst = ProblemInstance {
            network: sys.network.transpose(),
            disturbances: sys.targets.clone(),
            targets: sys.disturbances.clone(),
            inputs: Some(sys.outputs.clone()),
            outputs: None,
        };
        let dual = WeightedSystem::from_instance(&dual_inst);
        let f = friend_state_feedback(&dual, &s.complement(5), None).unwrap();
        assert_eq!(f.transpose(), h);
    }

    #[test]
    fn fork_static_gain_removes_single_edge() {
        let sys = fork_with(&[2], &[1], 2);
        let g = output_feedback_gain(&sys, &NodeSet::from([1])).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert_eq!(g[(0, 0)], sys.a[(1, 0)]);
        let closed = output_feedback_matrix(&sys, &g).unwrap();
        assert_eq!(closed[(1, 0)], 0.0);
        assert_eq!(closed.count_nonzeros(), 4);
        assert!(output_feedback_gain(&sys, &NodeSet::from([1, 2])).is_err());
    }

    #[test]
    fn full_order_compensator_four_term_formula() {
        let sys = fork_with(&[4], &[1], 9);
        let f = friend_state_feedback(&sys, &NodeSet::from([1, 2, 3, 5]), None).unwrap();
        let h = friend_output_injection(&sys, &NodeSet::from([1]), None).unwrap();
        let g = static_gain(&sys);
        let comp = full_order_compensator(&sys, &f, &h, &g).unwrap();
        let (b, c, a) = (&sys.b_mat, &sys.c_mat, &sys.a);
        let bt = b.transpose();
        let ct = c.transpose();
        let expected = a
            .sub(&b.mul(&bt).unwrap().mul(a).unwrap())
            .unwrap()
            .sub(&a.mul(&ct).unwrap().mul(c).unwrap())
            .unwrap()
            .add(&b.mul(&bt).unwrap().mul(a).unwrap().mul(&ct).unwrap().mul(c).unwrap())
            .unwrap();
        assert_eq!(comp.k, expected);
        assert_eq!(comp.order(), 5);
        assert_eq!(comp.projection, DenseMatrix::identity(5));
    }

    #[test]
    fn projection_rows() {
        let p = projection_map(&NodeSet::from([1, 2, 3, 5]), &NodeSet::from([1]), 5).unwrap();
        assert_eq!(p.shape(), (3, 5));
        assert_eq!(p.mul(&p.transpose()).unwrap(), DenseMatrix::identity(3));
        assert_eq!(p[(0, 1)], 1.0);
        assert_eq!(p[(1, 2)], 1.0);
        assert_eq!(p[(2, 4)], 1.0);
        let same = NodeSet::from([1, 2]);
        assert_eq!(projection_map(&same, &same, 5).unwrap().shape(), (0, 5));
        assert!(projection_map(&NodeSet::from([1]), &NodeSet::from([2]), 5).is_err());
    }

    #[test]
    fn fork_reduced_order_loop_shapes() {
        let sys = fork_with(&[4], &[1], 4);
        let syn = synthesize(&sys, FeedbackKind::Df, None).unwrap();
        let comp = syn.compensator.as_ref().unwrap();
        assert_eq!(comp.order(), 3);
        assert_eq!(syn.closed_loop.a_c.shape(), (8, 8));
        assert_eq!(syn.closed_loop.t_c.shape(), (1, 8));
        assert!((5..8).all(|j| syn.closed_loop.t_c[(0, j)] == 0.0));
        assert_eq!(syn.closed_loop.d_c.shape(), (8, 1));
    }

    #[test]
    fn order_zero_compensator_is_static_output_feedback() {
        // Z* = S* = {v1} with B = {v2}, C = {v1}
        let sys = fork_with(&[2], &[1], 6);
        let syn = synthesize(&sys, FeedbackKind::Df, None).unwrap();
        assert_eq!(syn.compensator.as_ref().unwrap().order(), 0);
        let g = static_gain(&sys);
        assert_eq!(syn.closed_loop.a_c, output_feedback_matrix(&sys, &g).unwrap());
    }
}
