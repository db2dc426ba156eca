// SPDX-License-Identifier: Apache-2.0

//! Seeded augmentation: small perturbations of a program that stay within a
//! divergence bound of the original.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::delta::flatland_delta;
use super::program::{FlatlandProgram, Primitive};
use super::FlatlandError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentParams {
    /// Largest move-length change, pixels.
    pub move_jitter: f64,
    /// Largest turn-angle change, degrees.
    pub turn_jitter: f64,
    pub loop_count_delta: u32,
    /// Chance that a given move or turn is jittered.
    pub jitter_probability: f64,
    /// Chance that a given loop count is changed.
    pub loop_probability: f64,
    /// Chance, per slot, of prepending a global move or turn.
    pub insertion_probability: f64,
    pub max_insertions: usize,
    pub max_delta: f64,
    /// Extra attempts, each with perturbations halved, before giving up.
    pub max_retries: u32,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            move_jitter: 2.0,
            turn_jitter: 10.0,
            loop_count_delta: 1,
            jitter_probability: 0.3,
            loop_probability: 0.3,
            insertion_probability: 0.3,
            max_insertions: 1,
            max_delta: 0.3,
            max_retries: 6,
        }
    }
}

impl AugmentParams {
    /// No perturbation at all.
    pub fn none() -> Self {
        AugmentParams {
            move_jitter: 0.0,
            turn_jitter: 0.0,
            loop_count_delta: 0,
            jitter_probability: 0.0,
            loop_probability: 0.0,
            insertion_probability: 0.0,
            max_insertions: 0,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), FlatlandError> {
        let probabilities = [self.jitter_probability, self.loop_probability, self.insertion_probability];
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(FlatlandError::InvalidParameter("probabilities must lie in [0, 1]".into()));
        }
        if !(self.move_jitter >= 0.0 && self.turn_jitter >= 0.0 && self.move_jitter.is_finite() && self.turn_jitter.is_finite()) {
            return Err(FlatlandError::InvalidParameter("jitter bounds must be finite and non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.max_delta) {
            return Err(FlatlandError::InvalidParameter("max_delta must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

struct Perturber<'a> {
    params: &'a AugmentParams,
    scale: f64,
    rng: ChaCha8Rng,
}

impl Perturber<'_> {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool((p * self.scale).clamp(0.0, 1.0))
    }

    /// A whole-number offset in `[-bound, bound]`.
    fn jitter(&mut self, bound: f64) -> f64 {
        let b = (bound * self.scale).floor();
        if b < 1.0 {
            0.0
        } else {
            self.rng.gen_range(-b..=b).round()
        }
    }

    fn items(&mut self, items: &[Primitive]) -> Vec<Primitive> {
        items
            .iter()
            .map(|item| match item {
                Primitive::Move { length } => Primitive::Move {
                    length: if self.chance(self.params.jitter_probability) {
                        length + self.jitter(self.params.move_jitter)
                    } else {
                        *length
                    },
                },
                Primitive::Turn { angle } => Primitive::Turn {
                    angle: if self.chance(self.params.jitter_probability) {
                        angle + self.jitter(self.params.turn_jitter)
                    } else {
                        *angle
                    },
                },
                Primitive::Loop { count, body } => {
                    let mut count = *count;
                    if self.params.loop_count_delta > 0 && self.chance(self.params.loop_probability) {
                        let d = self.params.loop_count_delta;
                        count = if self.rng.gen_bool(0.5) {
                            count.saturating_add(d)
                        } else {
                            count.saturating_sub(d).max(1)
                        };
                    }
                    Primitive::Loop {
                        count,
                        body: self.items(body),
                    }
                }
            })
            .collect()
    }

    fn insertions(&mut self) -> Vec<Primitive> {
        let mut prefix = Vec::new();
        for _ in 0..self.params.max_insertions {
            if !self.chance(self.params.insertion_probability) {
                continue;
            }
            prefix.push(if self.rng.gen_bool(0.5) {
                Primitive::Move {
                    length: f64::from(self.rng.gen_range(1..=10u32)),
                }
            } else {
                Primitive::Turn {
                    angle: f64::from(15 * self.rng.gen_range(1..24u32)),
                }
            });
        }
        prefix
    }
}

/// Perturbs `program`. Attempt `k` (from 0 to `max_retries`) halves every
/// probability and jitter bound `k` times and draws from random stream `k`
/// of `seed`; the first candidate within `max_delta` of the input is
/// returned.
pub fn augment(program: &FlatlandProgram, seed: u64, params: &AugmentParams) -> Result<FlatlandProgram, FlatlandError> {
    params.validate()?;
    for attempt in 0..=params.max_retries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(attempt));
        let mut p = Perturber {
            params,
            scale: 0.5f64.powi(attempt as i32),
            rng,
        };
        let mut items = p.insertions();
        items.extend(p.items(program.items()));
        let Ok(candidate) = FlatlandProgram::new(items) else {
            continue;
        };
        if flatland_delta(program, &candidate) <= params.max_delta {
            return Ok(candidate);
        }
    }
    Err(FlatlandError::CannotSatisfyBound {
        max_delta: params.max_delta,
        attempts: params.max_retries + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> FlatlandProgram {
        FlatlandProgram::new(vec![Primitive::Loop {
            count: 4,
            body: vec![Primitive::Move { length: 20.0 }, Primitive::Turn { angle: 90.0 }],
        }])
        .unwrap()
    }

    #[test]
    fn no_perturbation_is_identity() {
        let out = augment(&square(), 3, &AugmentParams::none()).unwrap();
        assert_eq!(out, square());
        assert_eq!(flatland_delta(&square(), &out), 0.0);
    }

    #[test]
    fn deterministic_and_bounded() {
        let params = AugmentParams::default();
        let mut changed = 0;
        for seed in 0..200 {
            let a = augment(&square(), seed, &params).unwrap();
            assert_eq!(a, augment(&square(), seed, &params).unwrap());
            assert!(flatland_delta(&square(), &a) <= params.max_delta);
            changed += usize::from(a != square());
        }
        assert!(changed > 0);
    }

    #[test]
    fn empty_program_cannot_satisfy_bound() {
        assert!(matches!(
            augment(&FlatlandProgram::empty(), 0, &AugmentParams::default()),
            Err(FlatlandError::CannotSatisfyBound { .. })
        ));
    }
}
