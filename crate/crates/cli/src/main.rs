// SPDX-License-Identifier: Apache-2.0

//! `gindex` command-line tool.
//!
//! Exit status is 0 on success, 1 on usage or internal errors, and 2 when a
//! generated program could not be parsed but was still scored.

mod args;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, FlatlandCommand, Format, GlobalArgs, Shape, SimulateArgs, Sweep};
use gindex_core::divergence::{dag_from_text, score_documents, DeltaOptions};
use gindex_core::flatland::{self, AugmentParams, DatasetSpec, ShapeKind};
use gindex_core::generalization::{cluster_domains, omega_of};
use gindex_core::gindex::{g_index, GIndexOptions, SystemDescriptor};
use gindex_core::manifest::{parse_curriculum, parse_manifest};
use gindex_core::simulate::{curve_to_csv, simulate_responsiveness, SimulationConfig, SweepVariable};

/// An error reported on standard error with exit status 1.
struct Failure(String);

fn fail(message: impl Into<String>) -> Failure {
    Failure(message.into())
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| fail(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `--out` when given, otherwise to standard output.
fn emit(global: &GlobalArgs, bytes: &[u8]) -> Result<(), Failure> {
    match &global.out {
        Some(path) => write_file(path, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| fail(format!("cannot write output: {e}"))),
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("values serialize") + "\n"
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",") + "\n";
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn delta_options(global: &GlobalArgs) -> DeltaOptions {
    let mut options = DeltaOptions::default();
    if let Some(budget) = global.clique_budget {
        options.clique_budget = budget;
    }
    options
}

fn score(global: &GlobalArgs, reference: &Path, generated: &Path) -> Outcome {
    let scored = score_documents(&read(reference)?, &read(generated)?, &delta_options(global))
        .map_err(|e| fail(format!("reference program {}: {e}", reference.display())))?;
    let report = &scored.report;
    let text = match global.format_or(Format::Json) {
        Format::Json => {
            let mut value = serde_json::to_value(report).expect("report serializes");
            value["theta"] = json!(report.theta());
            if let Some(e) = &scored.generated_error {
                value["generated_error"] = json!(e.to_string());
            }
            pretty(&value)
        }
        Format::Csv => csv_text(
            &["delta", "theta", "exact", "syntax_errors", "function_errors", "dataflow_errors"],
            &[vec![
                report.delta.to_string(),
                report.theta().to_string(),
                report.exact.to_string(),
                report.errors.syntax.to_string(),
                report.errors.function.to_string(),
                report.errors.dataflow.to_string(),
            ]],
        ),
    };
    emit(global, text.as_bytes())?;
    if let Some(e) = &scored.generated_error {
        eprintln!("warning: generated program {} did not parse: {e}", generated.display());
        return Ok(2);
    }
    Ok(0)
}

fn omega(global: &GlobalArgs, curriculum: &Path, program: &Path) -> Outcome {
    let curriculum = parse_curriculum(&read(curriculum)?).map_err(|e| fail(format!("{}: {e}", curriculum.display())))?;
    let dag = dag_from_text(&read(program)?).map_err(|e| fail(format!("{}: {e}", program.display())))?;
    let options = delta_options(global);
    let mut rows = Vec::new();
    for domain in curriculum.domains() {
        let value = omega_of(&dag, domain, &options).map_err(|e| fail(format!("domain {}: {e}", domain.id)))?;
        rows.push((domain.id.clone(), value));
    }
    let overall = omega_of(&dag, &curriculum, &options).map_err(|e| fail(e.to_string()))?;
    let text = match global.format_or(Format::Json) {
        Format::Json => pretty(&json!({
            "domains": rows.iter().map(|(id, o)| json!({"id": id, "omega": o})).collect::<Vec<_>>(),
            "omega": overall,
        })),
        Format::Csv => {
            let mut table: Vec<Vec<String>> = rows.iter().map(|(id, o)| vec![id.clone(), o.to_string()]).collect();
            table.push(vec!["*".into(), overall.to_string()]);
            csv_text(&["domain", "omega"], &table)
        }
    };
    emit(global, text.as_bytes())?;
    Ok(0)
}

fn cluster(global: &GlobalArgs, programs: &[PathBuf], threshold: f64) -> Outcome {
    let dags = programs
        .iter()
        .map(|p| dag_from_text(&read(p)?).map_err(|e| fail(format!("{}: {e}", p.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let partition = cluster_domains(&dags, threshold, &delta_options(global)).map_err(|e| fail(e.to_string()))?;
    let names: Vec<String> = programs.iter().map(|p| p.display().to_string()).collect();
    let text = match global.format_or(Format::Json) {
        Format::Json => {
            let mut value = serde_json::to_value(&partition).expect("partition serializes");
            value["files"] = json!(names);
            pretty(&value)
        }
        Format::Csv => {
            let assignment = partition.assignment();
            let rows: Vec<Vec<String>> = names
                .iter()
                .zip(assignment)
                .map(|(n, c)| vec![n.clone(), c.to_string()])
                .collect();
            csv_text(&["file", "cluster"], &rows)
        }
    };
    emit(global, text.as_bytes())?;
    Ok(0)
}

fn gindex(global: &GlobalArgs, manifest_path: &Path, rho: Option<f64>) -> Outcome {
    let mut manifest =
        parse_manifest(&read(manifest_path)?).map_err(|e| fail(format!("{}: {e}", manifest_path.display())))?;
    if let Some(rho) = rho {
        let notes = manifest.system.notes.clone();
        manifest.system = SystemDescriptor::new(manifest.system.name.clone(), rho)
            .map_err(|e| fail(format!("--rho: {e}")))?
            .with_notes(notes);
    }
    let options = GIndexOptions {
        delta: delta_options(global),
        ..GIndexOptions::default()
    };
    let report = g_index(&manifest, &options).map_err(|e| fail(e.to_string()))?;
    let summary = format!(
        "g-index={:.6} tasks={} mean_theta={:.6}",
        report.g_index,
        report.per_task.len(),
        report.mean_theta
    );
    match &global.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| fail(format!("cannot create {}: {e}", dir.display())))?;
            write_file(&dir.join("gindex_report.json"), report.to_json().as_bytes())?;
            write_file(&dir.join("gindex_report.csv"), report.to_csv().as_bytes())?;
            println!("{summary}");
        }
        None => {
            let text = match global.format_or(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(0)
}

fn simulate(global: &GlobalArgs, a: &SimulateArgs) -> Outcome {
    let sweep = match a.sweep {
        Sweep::Samples => SweepVariable::Samples,
        Sweep::Compute => SweepVariable::Compute,
        Sweep::Theta => SweepVariable::Theta,
    };
    let mut config = SimulationConfig::new(sweep);
    config.start = a.start.unwrap_or(config.start);
    config.end = a.end.unwrap_or(config.end);
    config.compute = a.compute.unwrap_or(config.compute);
    config.points = a.points;
    config.domains = a.domains;
    config.theta = a.theta;
    config.samples = a.samples;
    config.rho = a.rho;
    config.domain_omegas = vec![a.omega; a.domains];
    config.band_samples = a.band_samples;
    config.seed = global.seed;
    let points = simulate_responsiveness(&config).map_err(|e| fail(e.to_string()))?;
    let text = match global.format_or(Format::Csv) {
        Format::Csv => curve_to_csv(&points),
        Format::Json => pretty(&points),
    };
    emit(global, text.as_bytes())?;
    Ok(0)
}

fn load_flatland(path: &Path) -> Result<flatland::FlatlandProgram, Failure> {
    flatland::parse_flatland(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn flatland_command(global: &GlobalArgs, command: &FlatlandCommand) -> Outcome {
    match command {
        FlatlandCommand::Render { program, rle } => {
            let canvas = flatland::render(&load_flatland(program)?);
            if *rle {
                emit(global, canvas.to_rle().as_bytes())?;
            } else {
                emit(global, &canvas.to_pbm())?;
            }
        }
        FlatlandCommand::Score { first, second } => {
            let delta = flatland::flatland_delta(&load_flatland(first)?, &load_flatland(second)?);
            let text = match global.format_or(Format::Json) {
                Format::Json => pretty(&json!({"delta": delta, "theta": 1.0 - delta})),
                Format::Csv => csv_text(&["delta", "theta"], &[vec![delta.to_string(), (1.0 - delta).to_string()]]),
            };
            emit(global, text.as_bytes())?;
        }
        FlatlandCommand::Augment {
            program,
            count,
            max_delta,
        } => {
            let original = load_flatland(program)?;
            let params = AugmentParams {
                max_delta: *max_delta,
                ..AugmentParams::default()
            };
            let mut outputs = Vec::new();
            for i in 0..*count {
                let seed = global.seed.wrapping_add(i);
                let augmented = flatland::augment(&original, seed, &params).map_err(|e| fail(format!("seed {seed}: {e}")))?;
                let doc: Value = serde_json::from_str(&flatland::to_list_document(&augmented)).expect("valid json");
                outputs.push(json!({
                    "seed": seed,
                    "delta": flatland::flatland_delta(&original, &augmented),
                    "program": doc,
                }));
            }
            emit(global, pretty(&outputs).as_bytes())?;
        }
        FlatlandCommand::Gen {
            shape,
            samples,
            min_shapes,
            max_shapes,
        } => {
            let dir = global
                .out
                .as_ref()
                .ok_or_else(|| fail("flatland gen needs --out DIR"))?;
            let spec = DatasetSpec {
                shape: match shape {
                    Shape::Lines => ShapeKind::Lines,
                    Shape::Circles => ShapeKind::Circles,
                    Shape::Mixed => ShapeKind::Mixed,
                },
                min_shapes: *min_shapes,
                max_shapes: *max_shapes,
                samples: *samples,
                seed: global.seed,
                ..DatasetSpec::default()
            };
            let manifest = flatland::write_dataset(dir, &spec).map_err(|e| fail(e.to_string()))?;
            println!("wrote {} samples to {}", manifest.samples.len(), dir.display());
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Outcome {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(fail("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| fail(e.to_string()))?;
    }
    let global = &cli.global;
    match &cli.command {
        Command::Score { reference, generated } => score(global, reference, generated),
        Command::Omega { curriculum, program } => omega(global, curriculum, program),
        Command::Cluster { programs, threshold } => cluster(global, programs, *threshold),
        Command::Gindex { manifest, rho } => gindex(global, manifest, *rho),
        Command::Simulate(a) => simulate(global, a),
        Command::Flatland(command) => flatland_command(global, command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
