use std::fmt::Write;

use decouple_core::{FeedbackKind, NodeSet, ProblemInstance};

/// How to colour output nodes and which nodes form the observer.
pub struct Colouring {
    pub kind: FeedbackKind,
    pub observer: Option<NodeSet>,
}

/// Renders the network in Graphviz DOT. Disturbances are red, targets
/// yellow, inputs blue, outputs purple (of) or green (otherwise) and
/// observer nodes fuchsia; a node with several roles is drawn as a wedge of
/// its colours. Edges carry their weights unless every weight is 1.
pub fn render(inst: &ProblemInstance, colouring: &Colouring) -> String {
    let output_colour = match colouring.kind {
        FeedbackKind::Of => "purple",
        _ => "green",
    };
    let (b, c) = (inst.inputs_or_empty(), inst.outputs_or_empty());
    let observer = colouring.observer.clone().unwrap_or_default();
    let mut out = String::from("digraph network {\n    node [shape=circle, style=filled, fillcolor=white];\n");
    for v in 1..=inst.n() {
        let colours: Vec<&str> = [
            (inst.disturbances.contains(v), "red"),
            (inst.targets.contains(v), "yellow"),
            (b.contains(v), "blue"),
            (c.contains(v), output_colour),
            (observer.contains(v), "fuchsia"),
        ]
        .into_iter()
        .filter_map(|(on, colour)| on.then_some(colour))
        .collect();
        let _ = match colours.as_slice() {
            [] => writeln!(out, "    v{v};"),
            [one] => writeln!(out, "    v{v} [fillcolor={one}];"),
            many => writeln!(out, "    v{v} [style=wedged, fillcolor=\"{}\"];", many.join(":")),
        };
    }
    let weighted = inst.network.edges().iter().any(|e| e.weight != 1.0);
    for e in inst.network.edges() {
        let _ = if weighted {
            writeln!(out, "    v{} -> v{} [label=\"{:.3}\"];", e.from, e.to, e.weight)
        } else {
            writeln!(out, "    v{} -> v{};", e.from, e.to)
        };
    }
    out.push_str("}\n");
    out
}
