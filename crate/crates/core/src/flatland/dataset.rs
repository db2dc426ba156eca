// SPDX-License-Identifier: Apache-2.0

//! Seeded generation of line and circle drawings.
//!
//! Every shape is a heading change (a multiple of 15 degrees) followed by
//! either a straight `move` or a 36-sided circle `loop(36, [move(s), turn(10)])`.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::program::{to_flow_document, FlatlandProgram, Primitive};
use super::render::{render, Canvas, TurtleState, CANVAS_SIZE};
use super::FlatlandError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Lines,
    Circles,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub shape: ShapeKind,
    pub min_shapes: u32,
    pub max_shapes: u32,
    /// Inclusive pixel range of line lengths.
    pub line_length: (u32, u32),
    /// Inclusive pixel range of circle side lengths.
    pub circle_step: (u32, u32),
    pub samples: usize,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            shape: ShapeKind::Mixed,
            min_shapes: 1,
            max_shapes: 5,
            line_length: (10, 40),
            circle_step: (1, 3),
            samples: 100,
            seed: 0,
        }
    }
}

impl DatasetSpec {
    fn validate(&self) -> Result<(), FlatlandError> {
        let bad = |m: &str| Err(FlatlandError::InvalidSpec(m.into()));
        if self.min_shapes == 0 || self.min_shapes > self.max_shapes {
            return bad("need 1 <= min_shapes <= max_shapes");
        }
        if self.max_shapes > 50 {
            return bad("max_shapes must be at most 50");
        }
        if self.line_length.0 == 0 || self.line_length.0 > self.line_length.1 {
            return bad("line_length must be a nonempty range of positive lengths");
        }
        if self.circle_step.0 == 0 || self.circle_step.0 > self.circle_step.1 {
            return bad("circle_step must be a nonempty range of positive lengths");
        }
        if self.line_length.1 as f64 > super::program::MAX_MOVE_LENGTH || self.circle_step.1 as f64 > super::program::MAX_MOVE_LENGTH {
            return bad("lengths exceed the move length limit");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSample {
    pub index: usize,
    pub program: FlatlandProgram,
    pub canvas: Canvas,
}

fn sample_program(spec: &DatasetSpec, index: usize) -> FlatlandProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let shapes = rng.gen_range(spec.min_shapes..=spec.max_shapes);
    let mut items = Vec::new();
    for _ in 0..shapes {
        items.push(Primitive::Turn {
            angle: f64::from(15 * rng.gen_range(0..24u32)),
        });
        let circle = match spec.shape {
            ShapeKind::Lines => false,
            ShapeKind::Circles => true,
            ShapeKind::Mixed => rng.gen_bool(0.5),
        };
        items.push(if circle {
            Primitive::Loop {
                count: 36,
                body: vec![
                    Primitive::Move {
                        length: f64::from(rng.gen_range(spec.circle_step.0..=spec.circle_step.1)),
                    },
                    Primitive::Turn { angle: 10.0 },
                ],
            }
        } else {
            Primitive::Move {
                length: f64::from(rng.gen_range(spec.line_length.0..=spec.line_length.1)),
            }
        });
    }
    FlatlandProgram::new(items).expect("generated programs respect the limits")
}

/// Sample `i` draws from random stream `i` of `spec.seed`, so samples do not
/// depend on each other or on thread scheduling.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<Vec<DatasetSample>, FlatlandError> {
    spec.validate()?;
    Ok((0..spec.samples)
        .into_par_iter()
        .map(|index| {
            let program = sample_program(spec, index);
            let canvas = render(&program);
            DatasetSample { index, program, canvas }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetEntry {
    pub program: String,
    pub image: String,
    pub fingerprint: String,
}

/// Describes a dataset written to disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetManifest {
    pub seed: u64,
    pub spec: DatasetSpec,
    pub start_pose: TurtleState,
    pub canvas_size: usize,
    pub samples: Vec<DatasetEntry>,
}

/// Writes `sample_NNNNN.json` (flow form) and `sample_NNNNN.pbm` per sample
/// plus `manifest.json` into `dir`.
pub fn write_dataset(dir: &Path, spec: &DatasetSpec) -> Result<DatasetManifest, FlatlandError> {
    let samples = generate_dataset(spec)?;
    let io = |e: std::io::Error| FlatlandError::Io(e.to_string());
    fs::create_dir_all(dir).map_err(io)?;
    let mut entries = Vec::with_capacity(samples.len());
    for s in &samples {
        let program = format!("sample_{:05}.json", s.index);
        let image = format!("sample_{:05}.pbm", s.index);
        fs::write(dir.join(&program), to_flow_document(&s.program) + "\n").map_err(io)?;
        fs::write(dir.join(&image), s.canvas.to_pbm()).map_err(io)?;
        entries.push(DatasetEntry {
            program,
            image,
            fingerprint: s.canvas.fingerprint(),
        });
    }
    let manifest = DatasetManifest {
        seed: spec.seed,
        spec: spec.clone(),
        start_pose: TurtleState::START,
        canvas_size: CANVAS_SIZE,
        samples: entries,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(dir.join("manifest.json"), text).map_err(io)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatland::program::Command;

    #[test]
    fn single_line_shape() {
        let spec = DatasetSpec {
            shape: ShapeKind::Lines,
            min_shapes: 1,
            max_shapes: 1,
            samples: 5,
            ..DatasetSpec::default()
        };
        for s in generate_dataset(&spec).unwrap() {
            match s.program.items() {
                [Primitive::Turn { .. }, Primitive::Move { length }] => assert!((10.0..=40.0).contains(length)),
                other => panic!("unexpected shape {other:?}"),
            }
            assert!(s.canvas.count_set() > 0);
        }
    }

    #[test]
    fn single_circle_shape() {
        let spec = DatasetSpec {
            shape: ShapeKind::Circles,
            min_shapes: 1,
            max_shapes: 1,
            samples: 3,
            ..DatasetSpec::default()
        };
        for s in generate_dataset(&spec).unwrap() {
            let flat = s.program.flatten();
            assert_eq!(flat.len(), 73);
            assert_eq!(flat.iter().filter(|c| matches!(c, Command::Move(_))).count(), 36);
        }
    }

    #[test]
    fn reproducible() {
        let spec = DatasetSpec {
            samples: 20,
            seed: 9,
            ..DatasetSpec::default()
        };
        assert_eq!(generate_dataset(&spec).unwrap(), generate_dataset(&spec).unwrap());
    }

    #[test]
    fn invalid_specs() {
        let spec = DatasetSpec {
            min_shapes: 3,
            max_shapes: 2,
            ..DatasetSpec::default()
        };
        assert!(matches!(generate_dataset(&spec), Err(FlatlandError::InvalidSpec(_))));
    }
}
