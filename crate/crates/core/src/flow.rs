// SPDX-License-Identifier: Apache-2.0

//! Flow-program documents: parsing, validation and canonical serialization.
//!
//! A flow program is a JSON array of node objects in the Node-RED export
//! shape. Every node carries a unique `id`, a `type`, and optionally `wires`,
//! a list of output ports where each port lists the ids of target nodes. All
//! other keys are attributes, except the editor metadata keys in
//! [`RESERVED_KEYS`], which never take part in comparison.

use std::collections::{BTreeMap, HashSet};

use serde_json::{Map, Value};
use thiserror::Error;

use crate::value::AttributeValue;

/// Structural and editor keys that are not node attributes.
pub const RESERVED_KEYS: [&str; 6] = ["id", "type", "wires", "x", "y", "z"];

pub fn is_reserved_key(key: &str) -> bool {
    RESERVED_KEYS.contains(&key)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("flow document must be a JSON array of nodes")]
    NotAnArray,
    #[error("node {index} is not a JSON object")]
    NodeNotObject { index: usize },
    #[error("node {index} is missing required field `{field}`")]
    MissingField { index: usize, field: &'static str },
    #[error("node {index} has invalid `{field}`: {reason}")]
    InvalidField {
        index: usize,
        field: &'static str,
        reason: String,
    },
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("node `{source_id}` is wired to unknown node `{target}`")]
    DanglingWire { source_id: String, target: String },
    #[error("node `{id}` uses reserved key `{key}` as an attribute")]
    ReservedAttribute { id: String, key: String },
}

/// One node of a flow program.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNode {
    pub id: String,
    pub node_type: String,
    pub attributes: BTreeMap<String, AttributeValue>,
    /// Output ports, each an ordered list of target node ids.
    pub wires: Vec<Vec<String>>,
}

impl FlowNode {
    pub fn new(id: impl Into<String>, node_type: impl Into<String>) -> Self {
        FlowNode {
            id: id.into(),
            node_type: node_type.into(),
            attributes: BTreeMap::new(),
            wires: Vec::new(),
        }
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<AttributeValue>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }

    pub fn with_port(mut self, targets: &[&str]) -> Self {
        self.wires
            .push(targets.iter().map(|t| (*t).to_owned()).collect());
        self
    }

    /// Every wire target across all ports, in port order.
    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.wires.iter().flatten().map(String::as_str)
    }
}

/// A validated flow program: ids are unique and every wire resolves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowProgram {
    nodes: Vec<FlowNode>,
}

impl FlowProgram {
    pub fn new(nodes: Vec<FlowNode>) -> Result<Self, FlowError> {
        let mut seen = HashSet::with_capacity(nodes.len());
        for (index, node) in nodes.iter().enumerate() {
            if node.id.is_empty() {
                return Err(FlowError::InvalidField {
                    index,
                    field: "id",
                    reason: "must be a nonempty string".into(),
                });
            }
            if node.node_type.is_empty() {
                return Err(FlowError::InvalidField {
                    index,
                    field: "type",
                    reason: "must be a nonempty string".into(),
                });
            }
            if !seen.insert(node.id.as_str()) {
                return Err(FlowError::DuplicateId(node.id.clone()));
            }
            if let Some(key) = node.attributes.keys().find(|k| is_reserved_key(k)) {
                return Err(FlowError::ReservedAttribute {
                    id: node.id.clone(),
                    key: key.clone(),
                });
            }
        }
        for node in &nodes {
            if let Some(target) = node.targets().find(|t| !seen.contains(t)) {
                return Err(FlowError::DanglingWire {
                    source_id: node.id.clone(),
                    target: target.to_owned(),
                });
            }
        }
        Ok(FlowProgram { nodes })
    }

    pub fn empty() -> Self {
        FlowProgram::default()
    }

    pub fn nodes(&self) -> &[FlowNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn into_nodes(self) -> Vec<FlowNode> {
        self.nodes
    }
}

/// Strips the reserved meta keys from a raw node record.
pub fn canonical_attributes(record: &Map<String, Value>) -> BTreeMap<String, AttributeValue> {
    record
        .iter()
        .filter(|(k, _)| !is_reserved_key(k))
        .map(|(k, v)| (k.clone(), AttributeValue::from(v.clone())))
        .collect()
}

/// Parses a flow document from text.
pub fn parse_flow(text: &str) -> Result<FlowProgram, FlowError> {
    let document: Value = serde_json::from_str(text).map_err(|e| {
        let location = format!(" at line {} column {}", e.line(), e.column());
        let message = e.to_string();
        FlowError::Syntax {
            line: e.line(),
            column: e.column(),
            message: message.strip_suffix(&location).unwrap_or(&message).to_string(),
        }
    })?;
    parse_flow_value(&document)
}

/// Parses an already-decoded JSON document.
pub fn parse_flow_value(document: &Value) -> Result<FlowProgram, FlowError> {
    let items = document.as_array().ok_or(FlowError::NotAnArray)?;
    let nodes = items
        .iter()
        .enumerate()
        .map(|(index, item)| parse_node(index, item))
        .collect::<Result<Vec<_>, _>>()?;
    FlowProgram::new(nodes)
}

fn parse_node(index: usize, item: &Value) -> Result<FlowNode, FlowError> {
    let record = item
        .as_object()
        .ok_or(FlowError::NodeNotObject { index })?;
    let id = required_string(record, index, "id")?;
    let node_type = required_string(record, index, "type")?;
    let wires = match record.get("wires") {
        None | Some(Value::Null) => Vec::new(),
        Some(value) => parse_wires(index, value)?,
    };
    Ok(FlowNode {
        id,
        node_type,
        attributes: canonical_attributes(record),
        wires,
    })
}

fn required_string(
    record: &Map<String, Value>,
    index: usize,
    field: &'static str,
) -> Result<String, FlowError> {
    match record.get(field) {
        None => Err(FlowError::MissingField { index, field }),
        Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
        Some(Value::String(_)) => Err(FlowError::InvalidField {
            index,
            field,
            reason: "must be a nonempty string".into(),
        }),
        Some(other) => Err(FlowError::InvalidField {
            index,
            field,
            reason: format!("expected a string, found {}", json_kind(other)),
        }),
    }
}

fn parse_wires(index: usize, value: &Value) -> Result<Vec<Vec<String>>, FlowError> {
    let invalid = |reason: &str| FlowError::InvalidField {
        index,
        field: "wires",
        reason: reason.to_owned(),
    };
    let ports = value
        .as_array()
        .ok_or_else(|| invalid("expected an array of ports"))?;
    ports
        .iter()
        .map(|port| {
            port.as_array()
                .ok_or_else(|| invalid("each port must be an array of node ids"))?
                .iter()
                .map(|target| {
                    target
                        .as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| invalid("wire targets must be strings"))
                })
                .collect()
        })
        .collect()
}

fn json_kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// Converts a program back into its JSON document form.
pub fn flow_to_value(program: &FlowProgram) -> Value {
    Value::Array(
        program
            .nodes
            .iter()
            .map(|node| {
                let mut record: Map<String, Value> = node
                    .attributes
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::from(v.clone())))
                    .collect();
                record.insert("id".into(), Value::String(node.id.clone()));
                record.insert("type".into(), Value::String(node.node_type.clone()));
                record.insert(
                    "wires".into(),
                    Value::Array(
                        node.wires
                            .iter()
                            .map(|port| {
                                Value::Array(port.iter().cloned().map(Value::String).collect())
                            })
                            .collect(),
                    ),
                );
                Value::Object(record)
            })
            .collect(),
    )
}

/// Serializes a program with sorted keys, so output is byte-stable.
pub fn serialize_flow(program: &FlowProgram) -> String {
    // serde_json's default map is a BTreeMap, which gives sorted keys.
    serde_json::to_string_pretty(&flow_to_value(program)).expect("flow values always serialize")
}
