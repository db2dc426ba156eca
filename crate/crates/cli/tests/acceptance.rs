// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gindex_core::corpus::synthetic_domain_corpus;
use gindex_core::dag::{DagVertex, ProgramDag};
use gindex_core::divergence::{build_association_graph, delta, delta_brute_force, delta_single, node_similarity, pairwise_matrix, DeltaOptions};
use gindex_core::flatland::{
    self, augment, generate_dataset, list_delta, list_delta_via_clique, render, render_with_state, AugmentParams, Command,
    DatasetSpec, FlatlandProgram, Primitive, ShapeKind, TurtleState,
};
use gindex_core::generalization::{cluster_from_matrix, gd};
use gindex_core::gindex::{curriculum_weight, experience, task_contribution_from_terms, DomainTerm, FormulaConstants};
use gindex_core::simulate::{simulate_responsiveness, SimulationConfig, SweepVariable};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

/// Random DAG: up to `max_nodes` nodes (at least one), types from 4, up to 4
/// attributes with small value ranges, forward edges under a random order.
fn random_dag(rng: &mut ChaCha8Rng, max_nodes: usize) -> ProgramDag {
    let n = rng.gen_range(1..=max_nodes);
    let vertices = (0..n)
        .map(|_| {
            let mut v = DagVertex::new(format!("t{}", rng.gen_range(0..4)));
            for k in 0..rng.gen_range(0..=4) {
                v = v.with_attribute(format!("k{k}"), rng.gen_range(0..3i64));
            }
            v
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.3) {
                edges.push((order[a], order[b]));
            }
        }
    }
    ProgramDag::new(vertices, edges).expect("forward edges are acyclic")
}

/// Same shape and types with some attribute values redrawn.
fn mutate(rng: &mut ChaCha8Rng, g: &ProgramDag) -> ProgramDag {
    let vertices = g
        .vertices()
        .iter()
        .map(|v| {
            let mut v = v.clone();
            for value in v.attributes.values_mut() {
                if rng.gen_bool(0.3) {
                    *value = rng.gen_range(0..3i64).into();
                }
            }
            v
        })
        .collect();
    ProgramDag::new(vertices, g.edges().iter().copied()).expect("same edges")
}

fn random_pair(rng: &mut ChaCha8Rng, max_nodes: usize) -> (ProgramDag, ProgramDag) {
    let a = random_dag(rng, max_nodes);
    let b = if rng.gen_bool(0.5) { mutate(rng, &a) } else { random_dag(rng, max_nodes) };
    (a, b)
}

fn metric_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut empty_graphs = 0;
    for case in 0..1000 {
        let (a, b) = random_pair(&mut rng, 10);
        let ab = delta(&a, &b);
        let ba = delta(&b, &a);
        ensure(ab.exact && ba.exact, || format!("case {case}: clique search not exact"))?;
        ensure((0.0..=1.0).contains(&ab.delta), || format!("case {case}: delta {} out of range", ab.delta))?;
        ensure((ab.delta - ba.delta).abs() <= 1e-12, || format!("case {case}: asymmetric {} vs {}", ab.delta, ba.delta))?;
        ensure(delta(&a, &a).delta == 0.0, || format!("case {case}: delta(g, g) != 0"))?;
        let empty = build_association_graph(&a, &b).is_empty();
        empty_graphs += usize::from(empty);
        ensure((ab.delta == 1.0) == empty, || format!("case {case}: delta {} but empty association graph = {empty}", ab.delta))?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("1000 pairs, {empty_graphs} with empty association graph, {:.2?}", start.elapsed()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let (a, b) = random_pair(&mut rng, 7);
        let fast = delta(&a, &b).delta;
        let slow = delta_brute_force(&a, &b).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("case {case}: clique {fast} vs exhaustive {slow}"))?;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("200 pairs identical, {:.2?}", start.elapsed()))
}

fn single_node_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let node = |rng: &mut ChaCha8Rng| {
            let mut v = DagVertex::new(format!("t{}", rng.gen_range(0..2)));
            for k in 0..4 {
                if rng.gen_bool(0.7) {
                    v = v.with_attribute(format!("k{k}"), rng.gen_range(0..2i64));
                }
            }
            v
        };
        let (x, y) = (node(&mut rng), node(&mut rng));
        // Independent similarity: equal values over the union of keys.
        let w = if x.node_type != y.node_type {
            0.0
        } else {
            let keys: std::collections::BTreeSet<&String> = x.attributes.keys().chain(y.attributes.keys()).collect();
            if keys.is_empty() {
                1.0
            } else {
                let equal = keys.iter().filter(|k| x.attributes.get(**k) == y.attributes.get(**k)).count();
                equal as f64 / keys.len() as f64
            }
        };
        let a = ProgramDag::new(vec![x.clone()], []).unwrap();
        let b = ProgramDag::new(vec![y.clone()], []).unwrap();
        let d = delta(&a, &b).delta;
        ensure(d == 1.0 - w * w, || format!("case {case}: delta {d}, 1 - w^2 = {}", 1.0 - w * w))?;
        ensure(node_similarity(&x, &y).value() == w, || format!("case {case}: similarity mismatch"))?;
    }
    Ok("100 single-node pairs exact".into())
}

fn chain(types: &[&str]) -> ProgramDag {
    ProgramDag::new(types.iter().map(|t| DagVertex::new(*t)).collect(), (1..types.len()).map(|i| (i - 1, i))).unwrap()
}

fn worked_fixtures() -> Outcome {
    let chain_delta = delta(&chain(&["A", "B", "C"]), &chain(&["A", "B"])).delta;
    ensure((chain_delta - 1.0 / 3.0).abs() <= 1e-12, || format!("chain delta {chain_delta}"))?;
    let single = delta_single(
        &DagVertex::new("a").with_attribute("k", 1i64).with_attribute("j", 2i64),
        &DagVertex::new("a").with_attribute("k", 1i64).with_attribute("j", 3i64),
    );
    ensure(single == 0.75, || format!("single-node delta {single}"))?;
    let w16 = curriculum_weight(16).map_err(|e| e.to_string())?;
    ensure(w16 == 0.2, || format!("W(16) = {w16}"))?;
    let gd0 = gd(0.0).map_err(|e| e.to_string())?;
    ensure(gd0 == 1.0, || format!("GD(0) = {gd0}"))?;
    let gd009 = gd(0.09).map_err(|e| e.to_string())?;
    ensure((gd009 - 2.4596).abs() <= 1e-4, || format!("GD(0.09) = {gd009}"))?;
    let e = experience(4.0, 256.0).map_err(|e| e.to_string())?;
    ensure(e == 10.0, || format!("E(4, 256) = {e}"))?;
    let term = DomainTerm {
        domain_id: "d".into(),
        omega: 0.0,
        gd: gd0,
        weight: curriculum_weight(1).unwrap(),
        experience: experience(2.0, 1.0).unwrap(),
    };
    let tc = task_contribution_from_terms(1.0, &[term], 1.0, &FormulaConstants::default()).map_err(|e| e.to_string())?;
    ensure((tc - 285.267).abs() <= 1e-2, || format!("TC = {tc}"))?;
    let manifest = fixture("manifest_single.json");
    let text = std::fs::read_to_string(&manifest).map_err(|e| e.to_string())?;
    let m = gindex_core::manifest::parse_manifest(&text).map_err(|e| e.to_string())?;
    let report = gindex_core::gindex::g_index(&m, &Default::default()).map_err(|e| e.to_string())?;
    ensure((report.g_index - 285.267).abs() <= 1e-2, || format!("g-index = {}", report.g_index))?;
    Ok(format!(
        "chain {chain_delta:.6}, GD(0.09) {gd009:.6}, TC {tc:.6}, g-index {:.6}",
        report.g_index
    ))
}

fn responsiveness() -> Outcome {
    let mut details = Vec::new();
    for (sweep, increasing) in [
        (SweepVariable::Samples, false),
        (SweepVariable::Compute, false),
        (SweepVariable::Theta, true),
    ] {
        let start = Instant::now();
        let config = SimulationConfig::new(sweep);
        let points = simulate_responsiveness(&config).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(points.len() == 50, || format!("{sweep:?}: {} points", points.len()))?;
        let monotone = points.windows(2).all(|w| {
            if increasing {
                w[1].g_index > w[0].g_index
            } else {
                w[1].g_index < w[0].g_index
            }
        });
        ensure(monotone, || format!("{sweep:?}: not strictly monotone"))?;
        within(elapsed, Duration::from_secs(10))?;
        details.push(format!(
            "{sweep:?} {:.3}->{:.3}",
            points[0].g_index,
            points[49].g_index
        ));
    }
    Ok(details.join(", "))
}

fn domain_structure() -> Outcome {
    let corpus = synthetic_domain_corpus(7, 5, 0);
    let programs: Vec<ProgramDag> = corpus.iter().map(|p| p.program.clone()).collect();
    let matrix = pairwise_matrix(&programs, &programs, &DeltaOptions::default());
    ensure(matrix.exact, || "inexact divergence".into())?;
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for i in 0..programs.len() {
        for j in i + 1..programs.len() {
            if corpus[i].domain == corpus[j].domain {
                intra.push(matrix.values[i][j]);
            } else {
                inter.push(matrix.values[i][j]);
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mi, mx) = (mean(&intra), mean(&inter));
    ensure(mi < 0.15, || format!("mean intra-domain delta {mi}"))?;
    ensure(mx > 0.5, || format!("mean inter-domain delta {mx}"))?;
    let partition = cluster_from_matrix(&matrix.values, 0.15).map_err(|e| e.to_string())?;
    ensure(partition.clusters.len() == 7, || format!("{} clusters", partition.clusters.len()))?;
    let assignment = partition.assignment();
    let recovered = (0..programs.len()).all(|i| assignment[i] == corpus[i].domain);
    ensure(recovered, || "clusters do not match domains".into())?;
    Ok(format!("intra {mi:.4}, inter {mx:.4}, 7 clusters"))
}

fn square() -> FlatlandProgram {
    FlatlandProgram::new(vec![Primitive::Loop {
        count: 4,
        body: vec![Primitive::Move { length: 20.0 }, Primitive::Turn { angle: 90.0 }],
    }])
    .unwrap()
}

fn random_commands(rng: &mut ChaCha8Rng) -> Vec<Command> {
    (0..rng.gen_range(1..=10))
        .map(|_| {
            let p = f64::from(rng.gen_range(0..3u32)) * 15.0;
            if rng.gen_bool(0.5) {
                Command::Move(p)
            } else {
                Command::Turn(p)
            }
        })
        .collect()
}

fn flatland_suite() -> Outcome {
    let spec = DatasetSpec {
        shape: ShapeKind::Mixed,
        samples: 8,
        seed: 4,
        ..DatasetSpec::default()
    };
    let samples = generate_dataset(&spec).map_err(|e| e.to_string())?;
    let reference = samples[0].canvas.fingerprint();
    for run in 0..100 {
        let again = render(&samples[0].program).fingerprint();
        ensure(again == reference, || format!("render {run} differs"))?;
    }

    let (_, end) = render_with_state(&square());
    ensure(end == TurtleState::START, || format!("square ends at {end:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..1000 {
        let a = random_commands(&mut rng);
        let b = random_commands(&mut rng);
        let ab = list_delta(&a, &b);
        let ba = list_delta(&b, &a);
        ensure((0.0..=1.0).contains(&ab), || format!("list case {case}: {ab} out of range"))?;
        ensure((ab - ba).abs() <= 1e-12, || format!("list case {case}: asymmetric"))?;
        ensure(list_delta(&a, &a) == 0.0, || format!("list case {case}: self delta nonzero"))?;
        let shares = a.iter().any(|x| b.iter().any(|y| flatland::command_similarity(x, y).is_one()));
        ensure((ab == 1.0) == !shares, || format!("list case {case}: delta {ab}, shared command {shares}"))?;
        let (via_clique, _) = list_delta_via_clique(&a, &b, gindex_core::divergence::DEFAULT_CLIQUE_BUDGET);
        ensure(via_clique == ab, || format!("list case {case}: clique route {via_clique} vs {ab}"))?;
    }

    let params = AugmentParams::default();
    let bases: Vec<FlatlandProgram> = std::iter::once(square()).chain(samples.iter().map(|s| s.program.clone())).collect();
    let mut changed = 0;
    for seed in 0..500u64 {
        let base = &bases[seed as usize % bases.len()];
        let out = augment(base, seed, &params).map_err(|e| format!("seed {seed}: {e}"))?;
        let d = flatland::flatland_delta(base, &out);
        ensure(d <= params.max_delta, || format!("seed {seed}: delta {d}"))?;
        changed += usize::from(&out != base);
    }
    Ok(format!("hash-stable, square closes, 1000 list pairs, 500 augmentations ({changed} changed)"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gindex");
    let run = |args: &[&str]| {
        Process::new(bin)
            .args(args)
            .env_remove("GINDEX_CLIQUE_BUDGET")
            .output()
            .map_err(|e| e.to_string())
    };
    let manifest = fixture("manifest_mixed.json");
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for dir in &dirs {
        let out = run(&["gindex", manifest.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])?;
        ensure(out.status.success(), || format!("gindex failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    }
    for name in ["gindex_report.json", "gindex_report.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs between runs"))?;
    }
    let r = fixture("ref.json");
    for (generated, expected) in [("ref.json", 0), ("malformed.json", 2), ("gen.json", 0)] {
        let out = run(&["score", r.to_str().unwrap(), fixture(generated).to_str().unwrap()])?;
        ensure(out.status.code() == Some(expected), || {
            format!("score {generated}: exit {:?}, expected {expected}", out.status.code())
        })?;
    }
    Ok("reports byte-identical; score exits 0/2/0".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("metric laws", metric_laws),
        ("oracle equivalence", oracle_equivalence),
        ("single-node reduction", single_node_reduction),
        ("worked fixtures", worked_fixtures),
        ("responsiveness sweeps", responsiveness),
        ("domain structure", domain_structure),
        ("flatland suite", flatland_suite),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
