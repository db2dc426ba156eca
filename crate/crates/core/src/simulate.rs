// SPDX-License-Identifier: Apache-2.0

//! Responsiveness curves: how the g-index of a synthetic single-task
//! evaluation moves as one input is swept with the others fixed.
//!
//! The curve uses an even split of training samples across domains. The band
//! around it is the min/max over random uneven splits (uniform over integer
//! compositions), always including the even split.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gindex::{curriculum_weight, experience, task_contribution_from_terms, DomainTerm, FormulaConstants};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid simulation config: {0}")]
pub struct InvalidConfig(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    /// Total training samples, split across domains.
    Samples,
    /// Total compute-time product in teraFLOP-seconds, split evenly.
    Compute,
    /// Performance.
    Theta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub sweep: SweepVariable,
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub domains: usize,
    pub theta: f64,
    pub samples: u64,
    pub compute: f64,
    pub rho: f64,
    /// One distance per domain; empty means [`DEFAULT_DOMAIN_OMEGA`] for all.
    pub domain_omegas: Vec<f64>,
    pub band_samples: usize,
    pub seed: u64,
    pub constants: FormulaConstants,
}

pub const DEFAULT_DOMAIN_OMEGA: f64 = 0.09;

impl SimulationConfig {
    /// Sixteen domains, 2560 samples, theta 0.7 and one hour at 127.53
    /// teraFLOPS, with a default range for the swept variable.
    pub fn new(sweep: SweepVariable) -> Self {
        let (start, end) = match sweep {
            SweepVariable::Samples => (640.0, 10240.0),
            SweepVariable::Compute => (1.0e4, 1.0e7),
            SweepVariable::Theta => (0.0, 1.0),
        };
        SimulationConfig {
            sweep,
            start,
            end,
            points: 50,
            domains: 16,
            theta: 0.7,
            samples: 2560,
            compute: 127.53 * 3600.0,
            rho: 1.0,
            domain_omegas: Vec::new(),
            band_samples: 32,
            seed: 0,
            constants: FormulaConstants::default(),
        }
    }

    fn omegas(&self) -> Vec<f64> {
        if self.domain_omegas.is_empty() {
            vec![DEFAULT_DOMAIN_OMEGA; self.domains]
        } else {
            self.domain_omegas.clone()
        }
    }

    fn validate(&self) -> Result<(), InvalidConfig> {
        let fail = |m: String| Err(InvalidConfig(m));
        if self.points < 2 {
            return fail(format!("points must be at least 2, got {}", self.points));
        }
        if self.domains == 0 {
            return fail("domains must be at least 1".into());
        }
        if !(self.start.is_finite() && self.end.is_finite() && self.start < self.end) {
            return fail(format!("need start < end, got {}..{}", self.start, self.end));
        }
        if !self.domain_omegas.is_empty() && self.domain_omegas.len() != self.domains {
            return fail(format!(
                "{} domain omegas given for {} domains",
                self.domain_omegas.len(),
                self.domains
            ));
        }
        if self.omegas().iter().any(|o| !(0.0..=1.0).contains(o)) {
            return fail("domain omegas must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return fail(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return fail(format!("rho must be non-negative, got {}", self.rho));
        }
        let (min_samples, min_compute) = match self.sweep {
            SweepVariable::Samples => (self.start.round(), self.compute),
            SweepVariable::Compute => (self.samples as f64, self.start),
            SweepVariable::Theta => {
                if self.start < 0.0 || self.end > 1.0 {
                    return fail("theta sweep must stay within [0, 1]".into());
                }
                (self.samples as f64, self.compute)
            }
        };
        if min_samples < self.domains as f64 {
            return fail(format!("need at least one sample per domain, got {min_samples}"));
        }
        if min_compute.is_nan() || min_compute / (self.domains as f64) < 1.0 {
            return fail(format!(
                "compute per domain must be at least 1 teraFLOP-second, got {}",
                min_compute / self.domains as f64
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub sweep_value: f64,
    pub g_index: f64,
    pub band_low: f64,
    pub band_high: f64,
}

fn even_split(total: u64, parts: usize) -> Vec<u64> {
    let base = total / parts as u64;
    let extra = (total % parts as u64) as usize;
    (0..parts).map(|i| base + u64::from(i < extra)).collect()
}

/// Uniformly random composition of `total` into `parts` positive integers.
fn random_split(total: u64, parts: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut cuts: Vec<u64> = sample(rng, total as usize - 1, parts - 1)
        .into_iter()
        .map(|c| c as u64 + 1)
        .collect();
    cuts.sort_unstable();
    let mut previous = 0;
    let mut out = Vec::with_capacity(parts);
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - previous);
        previous = c;
    }
    out
}

fn contribution(
    config: &SimulationConfig,
    omegas: &[f64],
    theta: f64,
    split: &[u64],
    compute: f64,
) -> Result<f64, InvalidConfig> {
    let per_domain = compute / config.domains as f64;
    let terms = split
        .iter()
        .zip(omegas)
        .enumerate()
        .map(|(i, (&n, &omega))| {
            Ok(DomainTerm {
                domain_id: format!("d{i}"),
                omega,
                gd: (config.constants.omega_exponent * omega).exp(),
                weight: curriculum_weight(n)?,
                experience: experience(per_domain, 1.0)?,
            })
        })
        .collect::<Result<Vec<_>, crate::gindex::GIndexError>>()
        .map_err(|e| InvalidConfig(e.to_string()))?;
    task_contribution_from_terms(theta, &terms, config.rho, &config.constants).map_err(|e| InvalidConfig(e.to_string()))
}

/// Computes `config.points` evenly spaced curve points.
pub fn simulate_responsiveness(config: &SimulationConfig) -> Result<Vec<CurvePoint>, InvalidConfig> {
    config.validate()?;
    config.constants.validate().map_err(|e| InvalidConfig(e.to_string()))?;
    let omegas = config.omegas();
    let step = (config.end - config.start) / (config.points - 1) as f64;
    (0..config.points)
        .map(|k| {
            let raw = if k + 1 == config.points {
                config.end
            } else {
                config.start + step * k as f64
            };
            let (sweep_value, total_samples, compute, theta) = match config.sweep {
                SweepVariable::Samples => {
                    let n = raw.round();
                    (n, n as u64, config.compute, config.theta)
                }
                SweepVariable::Compute => (raw, config.samples, raw, config.theta),
                SweepVariable::Theta => (raw, config.samples, config.compute, raw),
            };
            let g = contribution(config, &omegas, theta, &even_split(total_samples, config.domains), compute)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k as u64);
            let (mut low, mut high) = (g, g);
            for _ in 0..config.band_samples {
                let split = random_split(total_samples, config.domains, &mut rng);
                let v = contribution(config, &omegas, theta, &split, compute)?;
                low = low.min(v);
                high = high.max(v);
            }
            Ok(CurvePoint {
                sweep_value,
                g_index: g,
                band_low: low,
                band_high: high,
            })
        })
        .collect()
}

pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["sweep_value", "g_index", "band_low", "band_high"])
        .expect("in-memory write");
    for p in points {
        writer
            .write_record([
                p.sweep_value.to_string(),
                p.g_index.to_string(),
                p.band_low.to_string(),
                p.band_high.to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
