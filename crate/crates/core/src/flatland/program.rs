// SPDX-License-Identifier: Apache-2.0

//! Flatland programs and their two document forms.
//!
//! List form nests loop bodies directly:
//!
//! ```json
//! [{"type": "loop", "count": 4, "body": [{"type": "move", "length": 20},
//!                                        {"type": "turn", "angle": 90}]}]
//! ```
//!
//! Flow form is a flat array of nodes wired in sequence. Port 0 of a node
//! points at the next primitive in the same list; port 1 of a loop points at
//! the first primitive of its body. The first primitive is the only node
//! without an incoming wire.
//!
//! ```json
//! [{"id": "n1", "type": "loop", "count": 4, "wires": [[], ["n2"]]},
//!  {"id": "n2", "type": "move", "length": 20, "wires": [["n3"]]},
//!  {"id": "n3", "type": "turn", "angle": 90, "wires": []}]
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::FlatlandError;

pub const MAX_NESTING_DEPTH: usize = 4;
pub const MAX_FLATTENED_LEN: usize = 4096;
/// Largest accepted absolute move length, in pixels.
pub const MAX_MOVE_LENGTH: f64 = 1024.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Primitive {
    /// Draw forward `length` pixels.
    Move { length: f64 },
    /// Rotate counterclockwise by `angle` degrees.
    Turn { angle: f64 },
    Loop { count: u32, body: Vec<Primitive> },
}

/// A loop-free drawing command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    Move(f64),
    Turn(f64),
}

/// A validated flatland program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Primitive>", into = "Vec<Primitive>")]
pub struct FlatlandProgram {
    items: Vec<Primitive>,
}

impl TryFrom<Vec<Primitive>> for FlatlandProgram {
    type Error = FlatlandError;

    fn try_from(items: Vec<Primitive>) -> Result<Self, Self::Error> {
        FlatlandProgram::new(items)
    }
}

impl From<FlatlandProgram> for Vec<Primitive> {
    fn from(p: FlatlandProgram) -> Self {
        p.items
    }
}

fn check(items: &[Primitive], depth: usize) -> Result<usize, FlatlandError> {
    let mut len = 0usize;
    for item in items {
        let added = match item {
            Primitive::Move { length } => {
                if !(length.is_finite() && length.abs() <= MAX_MOVE_LENGTH) {
                    return Err(FlatlandError::InvalidParameter(format!(
                        "move length must be finite and at most {MAX_MOVE_LENGTH} in magnitude, got {length}"
                    )));
                }
                1
            }
            Primitive::Turn { angle } => {
                if !angle.is_finite() {
                    return Err(FlatlandError::InvalidParameter(format!("turn angle must be finite, got {angle}")));
                }
                1
            }
            Primitive::Loop { count, body } => {
                if *count == 0 {
                    return Err(FlatlandError::InvalidParameter("loop count must be at least 1".into()));
                }
                if depth + 1 > MAX_NESTING_DEPTH {
                    return Err(FlatlandError::DepthExceeded { depth: depth + 1 });
                }
                check(body, depth + 1)?.saturating_mul(*count as usize)
            }
        };
        len = len.saturating_add(added);
        if len > MAX_FLATTENED_LEN {
            return Err(FlatlandError::TooLong { len });
        }
    }
    Ok(len)
}

fn unroll(items: &[Primitive], out: &mut Vec<Command>) {
    for item in items {
        match item {
            Primitive::Move { length } => out.push(Command::Move(*length)),
            Primitive::Turn { angle } => out.push(Command::Turn(*angle)),
            Primitive::Loop { count, body } => {
                for _ in 0..*count {
                    unroll(body, out);
                }
            }
        }
    }
}

impl FlatlandProgram {
    pub fn new(items: Vec<Primitive>) -> Result<Self, FlatlandError> {
        check(&items, 0)?;
        Ok(FlatlandProgram { items })
    }

    pub fn empty() -> Self {
        FlatlandProgram { items: Vec::new() }
    }

    pub fn items(&self) -> &[Primitive] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Primitive> {
        self.items
    }

    /// Loops unrolled in order.
    pub fn flatten(&self) -> Vec<Command> {
        let mut out = Vec::new();
        unroll(&self.items, &mut out);
        out
    }
}

/// Parses either document form. A document whose elements carry an `id` is
/// read as flow form.
pub fn parse_flatland(text: &str) -> Result<FlatlandProgram, FlatlandError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FlatlandError::Document(e.to_string()))?;
    let nodes = value
        .as_array()
        .ok_or_else(|| FlatlandError::Document("top level must be an array".into()))?;
    if nodes.iter().any(|n| n.get("id").is_some()) {
        parse_flow_form(nodes)
    } else {
        let items: Vec<Primitive> =
            serde_json::from_value(value).map_err(|e| FlatlandError::Document(e.to_string()))?;
        FlatlandProgram::new(items)
    }
}

const FLOW_EXTRA_KEYS: [&str; 4] = ["x", "y", "z", "name"];

struct FlowNode<'a> {
    record: &'a Map<String, Value>,
    wires: Vec<Vec<String>>,
}

fn parse_flow_form(nodes: &[Value]) -> Result<FlatlandProgram, FlatlandError> {
    let doc = |m: String| FlatlandError::Document(m);
    let mut by_id: HashMap<String, FlowNode> = HashMap::new();
    let mut order = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        let record = node.as_object().ok_or_else(|| doc(format!("node {i} is not an object")))?;
        let id = record
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| doc(format!("node {i} has no string id")))?
            .to_string();
        let wires: Vec<Vec<String>> = match record.get("wires") {
            None => Vec::new(),
            Some(w) => serde_json::from_value(w.clone()).map_err(|e| doc(format!("node `{id}` wires: {e}")))?,
        };
        if wires.iter().any(|port| port.len() > 1) {
            return Err(doc(format!("node `{id}`: each port may wire to at most one node")));
        }
        order.push(id.clone());
        if by_id.insert(id.clone(), FlowNode { record, wires }).is_some() {
            return Err(doc(format!("duplicate id `{id}`")));
        }
    }

    let mut incoming: HashSet<&str> = HashSet::new();
    for (id, node) in &by_id {
        for target in node.wires.iter().flatten() {
            if !by_id.contains_key(target) {
                return Err(doc(format!("node `{id}` wires to unknown node `{target}`")));
            }
            if !incoming.insert(target.as_str()) {
                return Err(doc(format!("node `{target}` has more than one incoming wire")));
            }
        }
    }
    let roots: Vec<&String> = order.iter().filter(|id| !incoming.contains(id.as_str())).collect();
    let root = match roots.as_slice() {
        [] if by_id.is_empty() => return FlatlandProgram::new(Vec::new()),
        [root] => (*root).clone(),
        _ => return Err(doc(format!("expected exactly one first node, found {}", roots.len()))),
    };

    let mut visited = HashSet::new();
    let items = read_sequence(&by_id, Some(root), &mut visited, 0)?;
    if visited.len() != by_id.len() {
        return Err(doc("some nodes are not reachable from the first node".into()));
    }
    FlatlandProgram::new(items)
}

fn read_sequence(
    nodes: &HashMap<String, FlowNode>,
    mut next: Option<String>,
    visited: &mut HashSet<String>,
    depth: usize,
) -> Result<Vec<Primitive>, FlatlandError> {
    let mut items = Vec::new();
    while let Some(id) = next {
        if !visited.insert(id.clone()) {
            return Err(FlatlandError::Document(format!("wiring revisits node `{id}`")));
        }
        let node = &nodes[&id];
        let number = |key: &str| -> Result<f64, FlatlandError> {
            node.record
                .get(key)
                .and_then(Value::as_f64)
                .ok_or_else(|| FlatlandError::Document(format!("node `{id}` needs a numeric `{key}`")))
        };
        let kind = node.record.get("type").and_then(Value::as_str).unwrap_or("");
        let allowed: &[&str] = match kind {
            "move" => &["length"],
            "turn" => &["angle"],
            "loop" => &["count"],
            other => return Err(FlatlandError::Document(format!("node `{id}` has unknown type `{other}`"))),
        };
        if let Some(key) = node.record.keys().find(|k| {
            !matches!(k.as_str(), "id" | "type" | "wires") && !FLOW_EXTRA_KEYS.contains(&k.as_str()) && !allowed.contains(&k.as_str())
        }) {
            return Err(FlatlandError::Document(format!("node `{id}` has unexpected field `{key}`")));
        }
        let port = |p: usize| node.wires.get(p).and_then(|w| w.first()).cloned();
        items.push(match kind {
            "move" => Primitive::Move { length: number("length")? },
            "turn" => Primitive::Turn { angle: number("angle")? },
            _ => {
                if depth + 1 > MAX_NESTING_DEPTH {
                    return Err(FlatlandError::DepthExceeded { depth: depth + 1 });
                }
                let count = node
                    .record
                    .get("count")
                    .and_then(Value::as_u64)
                    .and_then(|c| u32::try_from(c).ok())
                    .ok_or_else(|| FlatlandError::Document(format!("node `{id}` needs an integer `count`")))?;
                Primitive::Loop {
                    count,
                    body: read_sequence(nodes, port(1), visited, depth + 1)?,
                }
            }
        });
        if kind != "loop" && node.wires.len() > 1 && node.wires[1..].iter().any(|w| !w.is_empty()) {
            return Err(FlatlandError::Document(format!("node `{id}` only has one output port")));
        }
        next = port(0);
    }
    Ok(items)
}

/// List form, pretty-printed.
pub fn to_list_document(program: &FlatlandProgram) -> String {
    serde_json::to_string_pretty(program.items()).expect("primitives serialize")
}

fn emit_sequence(items: &[Primitive], counter: &mut usize, out: &mut Vec<Value>) -> Option<String> {
    let ids: Vec<String> = items
        .iter()
        .map(|_| {
            *counter += 1;
            format!("n{counter}")
        })
        .collect();
    // Reserve slots so nodes appear in pre-order.
    for (k, item) in items.iter().enumerate() {
        let next: Vec<&String> = ids.get(k + 1).into_iter().collect();
        let mut node = BTreeMap::new();
        node.insert("id", json!(ids[k]));
        let slot = out.len();
        out.push(Value::Null);
        match item {
            Primitive::Move { length } => {
                node.insert("type", json!("move"));
                node.insert("length", json!(length));
                node.insert("wires", json!([next]));
            }
            Primitive::Turn { angle } => {
                node.insert("type", json!("turn"));
                node.insert("angle", json!(angle));
                node.insert("wires", json!([next]));
            }
            Primitive::Loop { count, body } => {
                node.insert("type", json!("loop"));
                node.insert("count", json!(count));
                let first = emit_sequence(body, counter, out);
                let body_port: Vec<String> = first.into_iter().collect();
                node.insert("wires", json!([next, body_port]));
            }
        }
        out[slot] = json!(node);
    }
    ids.into_iter().next()
}

/// Flow form, pretty-printed, with ids `n1, n2, ...` in pre-order.
pub fn to_flow_document(program: &FlatlandProgram) -> String {
    let mut nodes = Vec::new();
    let mut counter = 0;
    emit_sequence(program.items(), &mut counter, &mut nodes);
    serde_json::to_string_pretty(&Value::Array(nodes)).expect("json values serialize")
}
