// SPDX-License-Identifier: Apache-2.0

//! Scoring of generated flow-based programs and the g-index benchmark.
//!
//! * [`flow`] and [`dag`] parse Node-RED style program documents into
//!   attributed DAGs.
//! * [`divergence`] compares two DAGs through a node-weighted maximum clique
//!   of their association graph.
//! * [`generalization`] measures how far a task lies from a training
//!   curriculum and groups programs into task domains.
//! * [`gindex`] combines performance, generalization difficulty, sample
//!   counts, priors and compute into per-task contributions and the g-index.
//! * [`flatland`] is a turtle-graphics toy environment with its own
//!   list-based divergence.

pub mod corpus;
pub mod dag;
pub mod divergence;
pub mod flatland;
pub mod flow;
pub mod generalization;
pub mod gindex;
pub mod manifest;
pub mod simulate;
pub mod value;

pub use dag::{build_dag, DagVertex, ProgramDag};
pub use divergence::{delta, delta_with, DeltaOptions, DivergenceReport};
pub use flow::{parse_flow, serialize_flow, FlowNode, FlowProgram};
pub use value::AttributeValue;
