// SPDX-License-Identifier: Apache-2.0

//! Flatland: a turtle-graphics toy environment.
//!
//! Programs are built from `move`, `turn` and `loop` primitives and draw on a
//! 128x128 binary canvas. Programs are compared on their flattened command
//! lists with an order-preserving variant of the divergence metric.

pub mod augment;
pub mod dataset;
pub mod delta;
pub mod program;
pub mod render;

use thiserror::Error;

pub use augment::{augment, AugmentParams};
pub use dataset::{generate_dataset, write_dataset, DatasetManifest, DatasetSample, DatasetSpec, ShapeKind};
pub use delta::{command_similarity, flatland_delta, flatland_delta_via_clique, list_alignment, list_delta, list_delta_via_clique};
pub use program::{
    parse_flatland, to_flow_document, to_list_document, Command, FlatlandProgram, Primitive, MAX_FLATTENED_LEN,
    MAX_MOVE_LENGTH, MAX_NESTING_DEPTH,
};
pub use render::{render, render_with_state, Canvas, TurtleState, CANVAS_SIZE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatlandError {
    #[error("loop nesting depth {depth} exceeds the limit of {limit}", limit = MAX_NESTING_DEPTH)]
    DepthExceeded { depth: usize },
    #[error("flattened program has {len} commands, more than the limit of {limit}", limit = MAX_FLATTENED_LEN)]
    TooLong { len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid program document: {0}")]
    Document(String),
    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),
    #[error("no augmentation within divergence {max_delta} after {attempts} attempts")]
    CannotSatisfyBound { max_delta: f64, attempts: u32 },
    #[error("{0}")]
    Io(String),
}
