// SPDX-License-Identifier: Apache-2.0

//! A small synthetic corpus of programs grouped into task domains.
//!
//! Each domain has an 8-node base program with 4 attributes per node; every
//! program in the domain is the base with one attribute of one node changed.
//! Two programs of a domain therefore differ in at most two attributes
//! (divergence at most `1 - 7.5^2 / 64`), while domains share only the generic
//! `inject` and `debug` node types with differing attributes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dag::{DagVertex, ProgramDag};
use crate::value::AttributeValue;

pub const DOMAIN_NAMES: [&str; 16] = [
    "cron-schedule",
    "form-options",
    "google-search",
    "googlesearch-to-csv",
    "telegram-2-reply",
    "twitter",
    "youtube-play",
    "email-digest",
    "weather-alert",
    "mqtt-bridge",
    "rss-filter",
    "csv-report",
    "home-lights",
    "slack-notify",
    "sensor-log",
    "http-proxy",
];

const ROLES: [&str; 8] = [
    "inject", "function", "switch", "change", "template", "http request", "delay", "debug",
];

const EDGES: [(usize, usize); 7] = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 7), (2, 6)];

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledProgram {
    pub domain: usize,
    pub name: String,
    pub program: ProgramDag,
}

fn base_vertices(domain: usize) -> Vec<DagVertex> {
    let name = DOMAIN_NAMES[domain];
    ROLES
        .iter()
        .enumerate()
        .map(|(k, role)| {
            let node_type = if k == 0 || k == 7 {
                role.to_string()
            } else {
                format!("{name}/{role}")
            };
            DagVertex::new(node_type)
                .with_attribute("name", format!("{name}-{k}").as_str())
                .with_attribute("topic", name)
                .with_attribute("rate", (10 * domain + k) as i64)
                .with_attribute("enabled", true)
        })
        .collect()
}

fn perturb(value: &AttributeValue, variant: usize) -> AttributeValue {
    match value {
        AttributeValue::Text(s) => AttributeValue::Text(format!("{s}~{variant}")),
        AttributeValue::Bool(b) => AttributeValue::Bool(!b),
        AttributeValue::Number(n) => AttributeValue::from(n.as_f64() + 1.0 + variant as f64),
        other => other.clone(),
    }
}

/// `domains * per_domain` programs, domain-major.
///
/// # Panics
/// If `domains` exceeds [`DOMAIN_NAMES`].
pub fn synthetic_domain_corpus(domains: usize, per_domain: usize, seed: u64) -> Vec<LabeledProgram> {
    assert!(domains <= DOMAIN_NAMES.len(), "at most {} domains", DOMAIN_NAMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(domains * per_domain);
    for (d, domain_name) in DOMAIN_NAMES.iter().enumerate().take(domains) {
        for variant in 0..per_domain {
            let mut vertices = base_vertices(d);
            let node = rng.gen_range(0..vertices.len());
            let key = ["name", "topic", "rate", "enabled"][rng.gen_range(0..4)];
            let changed = perturb(&vertices[node].attributes[key], variant);
            vertices[node].attributes.insert(key.to_string(), changed);
            out.push(LabeledProgram {
                domain: d,
                name: format!("{domain_name}#{variant}"),
                program: ProgramDag::new(vertices, EDGES).expect("fixed acyclic edges"),
            });
        }
    }
    out
}
