//! Instance file formats.
//!
//! The canonical format is a JSON document:
//!
//! ```json
//! {"n": 3, "edges": [{"from": 1, "to": 2, "weight": 0.5}, {"from": "v2", "to": "v3"}],
//!  "disturbances": [1], "targets": ["v3"], "inputs": [2]}
//! ```
//!
//! Node ids are integers or `"v<k>"` labels; a missing weight means 1.
//!
//! The edge-list format is line based: a header `n <n>`, one `u v [w]`
//! triple per edge, and role lines `D: ...`, `T: ...`, `B: ...`, `C: ...`.
//! `#` starts a comment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{Edge, Network, ProblemInstance};
use crate::set::NodeSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRef {
    Id(usize),
    Label(String),
}

impl NodeRef {
    fn resolve(&self) -> Result<usize> {
        match self {
            NodeRef::Id(v) => Ok(*v),
            NodeRef::Label(s) => parse_label(s),
        }
    }
}

fn parse_label(s: &str) -> Result<usize> {
    let digits = s.strip_prefix('v').unwrap_or(s);
    digits
        .parse::<usize>()
        .ok()
        .filter(|&v| v > 0)
        .ok_or_else(|| Error::Parse(format!("bad node id {s:?}")))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: NodeRef,
    to: NodeRef,
    #[serde(default = "unit_weight")]
    weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    edges: Vec<EdgeDoc>,
    disturbances: Vec<NodeRef>,
    targets: Vec<NodeRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inputs: Option<Vec<NodeRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<NodeRef>>,
}

fn resolve_set(refs: &[NodeRef]) -> Result<NodeSet> {
    refs.iter().map(NodeRef::resolve).collect()
}

fn ids(set: &NodeSet) -> Vec<NodeRef> {
    set.iter().map(NodeRef::Id).collect()
}

impl InstanceDoc {
    fn into_instance(self) -> Result<ProblemInstance> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    from: e.from.resolve()?,
                    to: e.to.resolve()?,
                    weight: e.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let net = Network::new(self.n, edges)?;
        let mut inst = ProblemInstance::new(net, resolve_set(&self.disturbances)?, resolve_set(&self.targets)?)?;
        if let Some(b) = &self.inputs {
            inst = inst.with_inputs(resolve_set(b)?)?;
        }
        if let Some(c) = &self.outputs {
            inst = inst.with_outputs(resolve_set(c)?)?;
        }
        Ok(inst)
    }

    fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceDoc {
            n: inst.n(),
            edges: inst
                .network
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    from: NodeRef::Id(e.from),
                    to: NodeRef::Id(e.to),
                    weight: e.weight,
                })
                .collect(),
            disturbances: ids(&inst.disturbances),
            targets: ids(&inst.targets),
            inputs: inst.inputs.as_ref().map(ids),
            outputs: inst.outputs.as_ref().map(ids),
        }
    }
}

/// Parses the canonical JSON format. Structural problems (unknown nodes,
/// duplicate edges, zero weights) are reported; role disjointness is left
/// to [`ProblemInstance::validate`].
pub fn parse_json(text: &str) -> Result<ProblemInstance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_instance()
}

/// Converts an instance to the canonical JSON value.
pub fn to_json_value(inst: &ProblemInstance) -> serde_json::Value {
    serde_json::to_value(InstanceDoc::from_instance(inst)).expect("instance documents serialize")
}

/// Parses an instance embedded as a JSON value.
pub fn from_json_value(value: serde_json::Value) -> Result<ProblemInstance> {
    let doc: InstanceDoc = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_instance()
}

pub fn write_json(inst: &ProblemInstance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("instance documents serialize")
}

/// Parses the edge-list format.
pub fn parse_edge_list(text: &str) -> Result<ProblemInstance> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut roles: [Option<NodeSet>; 4] = Default::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}: {raw:?}", lineno + 1));
        if let Some((key, rest)) = line.split_once(':') {
            let slot = match key.trim() {
                "D" => 0,
                "T" => 1,
                "B" => 2,
                "C" => 3,
                _ => return Err(err("unknown role")),
            };
            if roles[slot].is_some() {
                return Err(err("repeated role line"));
            }
            let set = rest
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(parse_label)
                .collect::<Result<NodeSet>>()?;
            roles[slot] = Some(set);
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["n", count] if n.is_none() => {
                n = Some(count.parse::<usize>().map_err(|_| err("bad node count"))?);
            }
            [u, v] | [u, v, _] if n.is_some() => {
                let weight = match tokens.get(2) {
                    Some(w) => w.parse::<f64>().map_err(|_| err("bad weight"))?,
                    None => 1.0,
                };
                edges.push(Edge {
                    from: parse_label(u)?,
                    to: parse_label(v)?,
                    weight,
                });
            }
            _ => return Err(err("expected `n <count>` header or `u v [w]` edge")),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing `n <count>` header".into()))?;
    let [d, t, b, c] = roles;
    let net = Network::new(n, edges)?;
    let mut inst = ProblemInstance::new(
        net,
        d.ok_or_else(|| Error::Parse("missing `D:` line".into()))?,
        t.ok_or_else(|| Error::Parse("missing `T:` line".into()))?,
    )?;
    if let Some(b) = b {
        inst = inst.with_inputs(b)?;
    }
    if let Some(c) = c {
        inst = inst.with_outputs(c)?;
    }
    Ok(inst)
}

pub fn write_edge_list(inst: &ProblemInstance) -> String {
    let mut out = format!("n {}\n", inst.n());
    for e in inst.network.edges() {
        out.push_str(&format!("{} {} {:?}\n", e.from, e.to, e.weight));
    }
    let line = |key: &str, set: &NodeSet| {
        let ids: Vec<String> = set.iter().map(|v| v.to_string()).collect();
        format!("{key}: {}\n", ids.join(" "))
    };
    out.push_str(&line("D", &inst.disturbances));
    out.push_str(&line("T", &inst.targets));
    if let Some(b) = &inst.inputs {
        out.push_str(&line("B", b));
    }
    if let Some(c) = &inst.outputs {
        out.push_str(&line("C", c));
    }
    out
}

/// Parses either format: text whose first non-blank character is `{` is
/// JSON, anything else is an edge list.
pub fn parse_any(text: &str) -> Result<ProblemInstance> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}
