use decouple_core::fixtures::{fork_instance, merge_instance};
use decouple_core::format::{parse_any, write_edge_list, write_json};
use decouple_core::oracle::{brute_min_inputs, brute_min_io, IoMode, MAX_NODES_INPUTS};
use decouple_core::synthesis::{assign_random_weights, synthesize};
use decouple_core::verify::{verify_synthesis, VerifyOptions};
use decouple_core::{
    ddpof_solvable, solve_min_ddpdf, solve_min_ddpdf_extremal, solve_min_ddpof, solve_min_ddpsf, Error, FeedbackKind,
    Network, NodeSet, OfMode, ProblemInstance,
};

fn place(inst: &ProblemInstance, b: &NodeSet, c: &NodeSet) -> ProblemInstance {
    inst.clone()
        .with_inputs(b.clone())
        .unwrap()
        .with_outputs(c.clone())
        .unwrap()
}

fn simulated() -> VerifyOptions {
    VerifyOptions {
        simulation: Some((3, 10.0)),
        ..VerifyOptions::default()
    }
}

#[test]
fn fork_solve_synthesize_verify_all_modes() {
    let inst = fork_instance();

    let b = solve_min_ddpsf(&inst).unwrap();
    let sys = assign_random_weights(&place(&inst, &b, &NodeSet::new()), 1);
    let report = verify_synthesis(&synthesize(&sys, FeedbackKind::Sf, None).unwrap(), &simulated()).unwrap();
    assert!(report.pass);
    assert_eq!(report.residual, 0.0);
    assert!(report.simulation_peak_z.unwrap() <= 1e-6);

    let of = solve_min_ddpof(&inst, OfMode::Exact).unwrap();
    let sys = assign_random_weights(&place(&inst, &of.inputs, &of.outputs), 1);
    let report = verify_synthesis(&synthesize(&sys, FeedbackKind::Of, Some(&of.w)).unwrap(), &simulated()).unwrap();
    assert!(report.pass);

    let df = solve_min_ddpdf(&inst).unwrap();
    let sys = assign_random_weights(&place(&inst, &df.inputs, &df.outputs), 1);
    let syn = synthesize(&sys, FeedbackKind::Df, None).unwrap();
    assert_eq!(syn.compensator.as_ref().unwrap().order(), 3);
    let report = verify_synthesis(&syn, &simulated()).unwrap();
    assert!(report.pass);
    assert_eq!(report.horizon, 8);
}

#[test]
fn merge_solvers_agree_with_oracle() {
    let inst = merge_instance();
    assert_eq!(
        brute_min_inputs(&inst).unwrap().min_size,
        solve_min_ddpsf(&inst).unwrap().len()
    );
    let of = solve_min_ddpof(&inst, OfMode::Exact).unwrap();
    assert_eq!(brute_min_io(&inst, IoMode::Of).unwrap().min_total, of.total());
    assert!(ddpof_solvable(&place(&inst, &of.inputs, &of.outputs)).unwrap().solvable);
    let df = solve_min_ddpdf(&inst).unwrap();
    assert_eq!(brute_min_io(&inst, IoMode::Df).unwrap().min_total, df.total());
}

#[test]
fn files_in_both_formats_solve_identically() {
    let inst = merge_instance();
    for text in [write_json(&inst), write_edge_list(&inst)] {
        let loaded = parse_any(&text).unwrap();
        assert_eq!(loaded, inst);
        assert_eq!(solve_min_ddpsf(&loaded).unwrap(), NodeSet::from([3]));
    }
}

#[test]
fn overlapping_roles_are_rejected() {
    let net = Network::from_pairs(3, &[(1, 2), (2, 3)]).unwrap();
    let inst = ProblemInstance::new(net, NodeSet::from([1, 3]), NodeSet::from([3])).unwrap();
    assert!(matches!(solve_min_ddpsf(&inst), Err(Error::InstanceViolation(_))));
    assert!(matches!(
        solve_min_ddpof(&inst, OfMode::Heuristic),
        Err(Error::InstanceViolation(_))
    ));
}

#[test]
fn shared_hub_needs_the_joint_cut() {
    let net = Network::from_pairs(5, &[(1, 3), (2, 3), (3, 4), (3, 5)]).unwrap();
    let inst = ProblemInstance::new(net, NodeSet::from([1, 2]), NodeSet::from([4, 5])).unwrap();
    assert!(matches!(
        solve_min_ddpdf_extremal(&inst),
        Err(Error::ExtremalCutInsufficient { .. })
    ));
    let df = solve_min_ddpdf(&inst).unwrap();
    assert_eq!(df.total(), 3);
    let sys = assign_random_weights(&place(&inst, &df.inputs, &df.outputs), 8);
    assert!(
        verify_synthesis(
            &synthesize(&sys, FeedbackKind::Df, None).unwrap(),
            &VerifyOptions::default()
        )
        .unwrap()
        .pass
    );
}

#[test]
fn oracle_size_caps_are_errors() {
    let n = MAX_NODES_INPUTS + 1;
    let pairs: Vec<(usize, usize)> = (1..n).map(|v| (v, v + 1)).collect();
    let inst = ProblemInstance::new(
        Network::from_pairs(n, &pairs).unwrap(),
        NodeSet::from([1]),
        NodeSet::from([n]),
    )
    .unwrap();
    assert!(matches!(brute_min_inputs(&inst), Err(Error::SizeLimit { .. })));
    assert!(matches!(brute_min_io(&inst, IoMode::Df), Err(Error::SizeLimit { .. })));
    assert_eq!(solve_min_ddpsf(&inst).unwrap().len(), 1);
}
