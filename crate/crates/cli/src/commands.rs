use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use decouple_core::format::{from_json_value, parse_any, to_json_value, write_edge_list, write_json};
use decouple_core::invariance::{s_star, z_star};
use decouple_core::oracle::{brute_min_inputs, brute_min_io, enumerate_dt_paths, IoMode};
use decouple_core::solvability::construct_w;
use decouple_core::synthesis::{assign_random_weights, synthesize as build_law};
use decouple_core::verify::{verify_synthesis, VerificationReport};
use decouple_core::{
    ddpdf_solvable, ddpof_solvable, ddpsf_solvable, solve_min_ddpdf, solve_min_ddpof, solve_min_ddpsf, DenseMatrix,
    Error, FeedbackKind, NodeSet, ProblemInstance, Side, SolvabilityReport, Synthesis, VerifyOptions, WeightedSystem,
    Witness,
};

use crate::dot::{render, Colouring};
use crate::error::CliError;
use crate::Common;

/// Simulated time for `verify`.
const SIMULATION_DURATION: f64 = 10.0;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ProblemInstance, CliError> {
    let inst = parse_any(&read(path)?)?;
    inst.validate_for_solver()?;
    Ok(inst)
}

/// Writes JSON for `.json` paths and the edge-list format otherwise.
fn save_instance(path: &Path, inst: &ProblemInstance) -> Result<(), CliError> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => write_json(inst) + "\n",
        _ => write_edge_list(inst),
    };
    write(path, &text)
}

fn save_json(path: &Path, value: &Value) -> Result<(), CliError> {
    write(
        path,
        &(serde_json::to_string_pretty(value).expect("reports serialize") + "\n"),
    )
}

fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::ControlledInvariant { z_star } => format!("Z* = {z_star}"),
        Witness::Invariant { w } => format!("W = {w}"),
        Witness::Pair { s_star, z_star } => format!("S* = {s_star}, Z* = {z_star}"),
        Witness::Path {
            path,
            output_index,
            input_index,
        } => {
            let nodes: Vec<String> = path.iter().map(|v| format!("v{v}")).collect();
            let idx = |i: &Option<usize>| i.map_or("none".to_string(), |i| i.to_string());
            format!(
                "path {} (first output at {}, last input at {})",
                nodes.join(" -> "),
                idx(output_index),
                idx(input_index)
            )
        }
    }
}

fn verdict(report: &SolvabilityReport) -> String {
    let state = if report.solvable { "solvable" } else { "not solvable" };
    let agree = if report.method_agreement {
        ""
    } else {
        " [set and graph tests disagree]"
    };
    format!("{state}; {}{agree}", describe_witness(&report.witness))
}

fn sized(label: &str, set: &NodeSet) -> String {
    format!("{label} = {set} (|{label}| = {})", set.len())
}

fn ids(set: &NodeSet) -> Value {
    json!(set.as_slice())
}

pub fn analyze(file: &Path, common: &Common) -> Result<(), CliError> {
    let inst = load(file)?;
    let n = inst.n();
    let (b, c) = (inst.inputs_or_empty(), inst.outputs_or_empty());
    let z = z_star(&inst, &b);
    let s = s_star(&inst, &c);
    let z_out = inst.network.boundary(&z.fixpoint, Side::Out);
    let s_in = inst.network.boundary(&s.fixpoint, Side::In);
    println!("nodes {n}, edges {}", inst.network.proper_edge_count());
    println!("D = {}, T = {}, B = {b}, C = {c}", inst.disturbances, inst.targets);
    println!(
        "Z*(B) = {} after {} iterations, out-boundary {z_out}",
        z.fixpoint, z.iterations
    );
    println!(
        "S*(C) = {} after {} iterations, in-boundary {s_in}",
        s.fixpoint, s.iterations
    );
    let paths = match enumerate_dt_paths(&inst, common.cap) {
        Ok(p) => {
            println!("disturbance-to-target paths: {}", p.len());
            Some(p.len())
        }
        Err(Error::CapExceeded(cap)) => {
            println!("disturbance-to-target paths: more than {cap}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    println!("path nodes: {}", inst.path_nodes());

    let mut verdicts = serde_json::Map::new();
    if inst.inputs.is_some() {
        let sf = ddpsf_solvable(&inst)?;
        println!("sf: {}", verdict(&sf));
        verdicts.insert("sf".into(), json!(sf));
    }
    if inst.inputs.is_some() || inst.outputs.is_some() {
        let of = ddpof_solvable(&inst)?;
        let df = ddpdf_solvable(&inst)?;
        println!("of: {}", verdict(&of));
        println!("df: {}", verdict(&df));
        verdicts.insert("of".into(), json!(of));
        verdicts.insert("df".into(), json!(df));
    }
    if verdicts.is_empty() {
        println!("no input or output sets given; feasibility verdicts skipped");
    }
    if let Some(out) = &common.out {
        let report = json!({
            "command": "analyze",
            "instance": to_json_value(&inst),
            "z_star": ids(&z.fixpoint),
            "z_star_trace": z.trace,
            "z_star_out_boundary": ids(&z_out),
            "s_star": ids(&s.fixpoint),
            "s_star_trace": s.trace,
            "s_star_in_boundary": ids(&s_in),
            "path_count": paths,
            "path_nodes": ids(&inst.path_nodes()),
            "verdicts": verdicts,
        });
        save_json(out, &report)?;
    }
    Ok(())
}

/// A placement together with the invariant set certifying it (`W` for of).
struct Placement {
    inst: ProblemInstance,
    w: Option<NodeSet>,
}

fn solve_placement(inst: &ProblemInstance, kind: FeedbackKind, common: &Common) -> Result<Placement, CliError> {
    let bare = ProblemInstance {
        inputs: None,
        outputs: None,
        ..inst.clone()
    };
    Ok(match kind {
        FeedbackKind::Sf => Placement {
            inst: bare.with_inputs(solve_min_ddpsf(inst)?)?,
            w: None,
        },
        FeedbackKind::Of => {
            let p = solve_min_ddpof(inst, common.mode.into())?;
            Placement {
                inst: bare.with_inputs(p.inputs)?.with_outputs(p.outputs)?,
                w: Some(p.w),
            }
        }
        FeedbackKind::Df => {
            let p = solve_min_ddpdf(inst)?;
            Placement {
                inst: bare.with_inputs(p.inputs)?.with_outputs(p.outputs)?,
                w: None,
            }
        }
    })
}

fn has_roles(inst: &ProblemInstance, kind: FeedbackKind) -> bool {
    match kind {
        FeedbackKind::Sf => inst.inputs.is_some(),
        FeedbackKind::Of | FeedbackKind::Df => inst.inputs.is_some() || inst.outputs.is_some(),
    }
}

/// Checks the file's own placement and trims it to the boundary of its
/// certifying set, which the feedback constructions require. Trimming only
/// drops roles that carry no signal.
fn given_placement(inst: &ProblemInstance, kind: FeedbackKind) -> Result<Placement, CliError> {
    let report = match kind {
        FeedbackKind::Sf => ddpsf_solvable(inst)?,
        FeedbackKind::Of => ddpof_solvable(inst)?,
        FeedbackKind::Df => ddpdf_solvable(inst)?,
    };
    if !report.solvable {
        return Err(CliError::Infeasible(format!(
            "the given placement does not decouple under {kind} feedback: {}",
            describe_witness(&report.witness)
        )));
    }
    let net = &inst.network;
    let (b, c) = (inst.inputs_or_empty(), inst.outputs_or_empty());
    let (inputs, outputs, w) = match kind {
        FeedbackKind::Sf => (net.boundary(&z_star(inst, &b).fixpoint, Side::Out), None, None),
        FeedbackKind::Of => {
            let w = construct_w(inst)?.w;
            (net.boundary(&w, Side::Out), Some(net.boundary(&w, Side::In)), Some(w))
        }
        FeedbackKind::Df => (
            net.boundary(&z_star(inst, &b).fixpoint, Side::Out),
            Some(net.boundary(&s_star(inst, &c).fixpoint, Side::In)),
            None,
        ),
    };
    if inputs != b {
        eprintln!("note: inputs {} carry no signal and are dropped", b.difference(&inputs));
    }
    if let Some(o) = &outputs {
        if *o != c {
            eprintln!("note: outputs {} carry no signal and are dropped", c.difference(o));
        }
    }
    let mut placed = ProblemInstance {
        inputs: None,
        outputs: None,
        ..inst.clone()
    }
    .with_inputs(inputs)?;
    if let Some(o) = outputs {
        placed = placed.with_outputs(o)?;
    }
    Ok(Placement { inst: placed, w })
}

pub fn solve(kind: FeedbackKind, file: &Path, common: &Common) -> Result<(), CliError> {
    let inst = load(file)?;
    let placed = solve_placement(&inst, kind, common)?;
    println!("{}", sized("B", &placed.inst.inputs_or_empty()));
    if kind != FeedbackKind::Sf {
        println!("{}", sized("C", &placed.inst.outputs_or_empty()));
        println!(
            "|B| + |C| = {}",
            placed.inst.inputs_or_empty().len() + placed.inst.outputs_or_empty().len()
        );
    }
    if let Some(w) = &placed.w {
        println!("W = {w}");
    }
    if let Some(out) = &common.out {
        save_instance(out, &placed.inst)?;
    }
    Ok(())
}

fn matrix_json(m: &DenseMatrix) -> Value {
    json!(m.to_rows())
}

fn print_matrix(name: &str, m: &DenseMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    println!("{name} ({rows}x{cols}):");
    print!("{}", m.to_grid());
}

fn options(common: &Common, simulate: bool) -> VerifyOptions {
    VerifyOptions {
        tolerance: common.tolerance,
        horizon: common.horizon,
        simulation: simulate.then_some((common.seed, SIMULATION_DURATION)),
    }
}

fn print_verification(r: &VerificationReport) {
    let status = if r.pass { "PASS" } else { "FAIL" };
    println!("residual {:.1e} {status}", r.residual);
    println!(
        "invariance residual {:.1e}, horizon {}, tolerance {:.1e}",
        r.invariance_residual, r.horizon, r.tolerance
    );
    if let Some(peak) = r.simulation_peak_z {
        println!("simulated peak |z| {peak:.1e}");
    }
}

fn synthesis_report(syn: &Synthesis, w: Option<&NodeSet>, seed: u64, verification: &VerificationReport) -> Value {
    let sys = &syn.system;
    let weighted = ProblemInstance {
        network: sys.network.clone(),
        disturbances: sys.disturbances.clone(),
        targets: sys.targets.clone(),
        inputs: Some(sys.inputs.clone()),
        outputs: (syn.kind != FeedbackKind::Sf).then(|| sys.outputs.clone()),
    };
    json!({
        "command": "synthesize",
        "kind": syn.kind,
        "seed": seed,
        "instance": to_json_value(&weighted),
        "w": w.map(ids),
        "z_star": ids(&syn.z_star),
        "s_star": ids(&syn.s_star),
        "invariant": ids(&syn.invariant),
        "matrices": {
            "a": matrix_json(&sys.a),
            "b": matrix_json(&sys.b_mat),
            "c": matrix_json(&sys.c_mat),
            "d": matrix_json(&sys.d_mat),
            "t": matrix_json(&sys.t_mat),
        },
        "f": syn.f.as_ref().map(matrix_json),
        "g": syn.g.as_ref().map(matrix_json),
        "compensator": syn.compensator.as_ref().map(|k| json!({
            "order": k.order(),
            "k": matrix_json(&k.k),
            "l": matrix_json(&k.l),
            "m": matrix_json(&k.m),
            "g": matrix_json(&k.g),
            "projection": matrix_json(&k.projection),
        })),
        "closed_loop": {
            "dimension": syn.closed_loop.dim(),
            "a_c": matrix_json(&syn.closed_loop.a_c),
        },
        "verification": verification,
    })
}

pub fn synthesize(kind: FeedbackKind, file: &Path, common: &Common) -> Result<(), CliError> {
    let inst = load(file)?;
    let placed = if has_roles(&inst, kind) {
        given_placement(&inst, kind)?
    } else {
        solve_placement(&inst, kind, common)?
    };
    let sys = assign_random_weights(&placed.inst, common.seed);
    let syn = build_law(&sys, kind, placed.w.as_ref())?;
    let report = verify_synthesis(&syn, &options(common, false))?;

    println!("{kind} synthesis, weight seed {}", common.seed);
    println!("{}", sized("B", &sys.inputs));
    if kind != FeedbackKind::Sf {
        println!("{}", sized("C", &sys.outputs));
    }
    println!("Z* = {}, S* = {}", syn.z_star, syn.s_star);
    if let Some(w) = &placed.w {
        println!("W = {w}");
    }
    if let Some(f) = &syn.f {
        print_matrix("F", f);
    }
    if let Some(g) = &syn.g {
        print_matrix("G", g);
    }
    if let Some(k) = &syn.compensator {
        println!(
            "compensator order {} (observer nodes {})",
            k.order(),
            syn.z_star.difference(&syn.s_star)
        );
        print_matrix("K", &k.k);
        print_matrix("L", &k.l);
        print_matrix("M", &k.m);
        print_matrix("G", &k.g);
    }
    print_verification(&report);
    if let Some(out) = &common.out {
        save_json(out, &synthesis_report(&syn, placed.w.as_ref(), common.seed, &report))?;
    }
    Ok(())
}

/// Reads either a synthesis report or a weighted instance with roles.
fn verification_input(
    file: &Path,
    feedback: Option<FeedbackKind>,
) -> Result<(ProblemInstance, FeedbackKind, Option<NodeSet>), CliError> {
    let text = read(file)?;
    let doc: Option<Value> = serde_json::from_str(&text).ok();
    if let Some(mut doc) = doc.filter(|d| d.get("command") == Some(&json!("synthesize"))) {
        let kind: FeedbackKind =
            serde_json::from_value(doc["kind"].take()).map_err(|e| Error::Parse(format!("report kind: {e}")))?;
        let inst = from_json_value(doc["instance"].take())?;
        inst.validate_for_solver()?;
        let w = match doc["w"].take() {
            Value::Null => None,
            v => Some(serde_json::from_value::<NodeSet>(v).map_err(|e| Error::Parse(format!("report w: {e}")))?),
        };
        return Ok((inst, feedback.unwrap_or(kind), w));
    }
    let kind = feedback.ok_or(Error::MissingRoles(
        "a plain instance needs --feedback sf|of|df to choose the law to verify",
    ))?;
    let inst = parse_any(&text)?;
    inst.validate_for_solver()?;
    if !has_roles(&inst, kind) {
        return Err(Error::MissingRoles("the instance carries no input/output sets to verify").into());
    }
    Ok((inst, kind, None))
}

pub fn verify(file: &Path, feedback: Option<FeedbackKind>, common: &Common) -> Result<(), CliError> {
    let (inst, kind, w) = verification_input(file, feedback)?;
    let placed = match w {
        Some(w) if kind == FeedbackKind::Of => Placement { inst, w: Some(w) },
        _ => given_placement(&inst, kind)?,
    };
    let sys = WeightedSystem::from_instance(&placed.inst);
    let syn = build_law(&sys, kind, placed.w.as_ref())?;
    let report = verify_synthesis(&syn, &options(common, true))?;
    println!("{kind} closed loop of dimension {}", syn.closed_loop.dim());
    print_verification(&report);
    if let Some(out) = &common.out {
        save_json(
            out,
            &json!({ "command": "verify", "kind": kind, "seed": common.seed, "verification": report }),
        )?;
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "residual {:.1e} exceeds tolerance {:.1e}",
            report.residual.max(report.invariance_residual),
            report.tolerance
        )))
    }
}

pub fn export_dot(file: &Path, feedback: Option<FeedbackKind>, common: &Common) -> Result<(), CliError> {
    let inst = load(file)?;
    let (inst, colouring) = match feedback {
        Some(kind) => {
            let placed = if has_roles(&inst, kind) {
                inst
            } else {
                solve_placement(&inst, kind, common)?.inst
            };
            let observer = (kind == FeedbackKind::Df).then(|| {
                let z = z_star(&placed, &placed.inputs_or_empty()).fixpoint;
                z.difference(&s_star(&placed, &placed.outputs_or_empty()).fixpoint)
            });
            (placed, Colouring { kind, observer })
        }
        None => (
            inst,
            Colouring {
                kind: FeedbackKind::Df,
                observer: None,
            },
        ),
    };
    let dot = render(&inst, &colouring);
    match &common.out {
        Some(out) => write(out, &dot),
        None => {
            print!("{dot}");
            Ok(())
        }
    }
}

pub fn oracle(file: &Path, common: &Common) -> Result<(), CliError> {
    let inst = load(file)?;
    let paths = enumerate_dt_paths(&inst, common.cap)?;
    println!("disturbance-to-target paths: {}", paths.len());

    let mut mismatches = Vec::new();
    let sf = solve_min_ddpsf(&inst)?;
    let brute = brute_min_inputs(&inst)?;
    let show = |v: &[NodeSet]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
    println!(
        "sf: solver {} ({}), exhaustive {} [{}]",
        sf.len(),
        sf,
        brute.min_size,
        show(&brute.all_minima)
    );
    if sf.len() != brute.min_size || !brute.all_minima.contains(&sf) {
        mismatches.push("sf");
    }

    let of = solve_min_ddpof(&inst, common.mode.into())?;
    let df = solve_min_ddpdf(&inst)?;
    for (name, mode, b, c) in [
        ("of", IoMode::Of, &of.inputs, &of.outputs),
        ("df", IoMode::Df, &df.inputs, &df.outputs),
    ] {
        let brute = brute_min_io(&inst, mode)?;
        let pairs: Vec<String> = brute.all_minima.iter().map(|(b, c)| format!("({b}, {c})")).collect();
        println!(
            "{name}: solver {} (B = {b}, C = {c}), exhaustive {} [{}]",
            b.len() + c.len(),
            brute.min_total,
            pairs.join(" ")
        );
        if b.len() + c.len() != brute.min_total {
            mismatches.push(name);
        }
    }
    if mismatches.is_empty() {
        println!("all solvers match exhaustive search");
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "solver optimum differs for {}",
            mismatches.join(", ")
        )))
    }
}
