//! End-to-end acceptance checks, one line of output per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use gentle_core::fixtures::{document, gentle_fixture, quiver, FIXTURES};
use gentle_core::generate::{generate_random_instance, random_gentle_quiver, InstanceClass};
use gentle_core::normalize::measures::branch_relations_with_measure;
use gentle_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn inv(points: &[(u64, u64)]) -> AagInvariant {
    AagInvariant::from_points(points.iter().copied())
}

fn rel(a: &str, b: &str) -> Relation {
    Relation::new(a, b).unwrap()
}

/// Class and size for the `i`-th generated instance.
fn instance(i: u64, class: InstanceClass, max_n: usize) -> GentleQuiver {
    let n = 2 + (i as usize * 7 + 3) % (max_n - 1);
    let fraction = (i % 5) as f64 / 4.0;
    let doc = generate_random_instance(class, n, fraction, i).unwrap();
    gentle(&doc.body).unwrap()
}

fn classes(i: u64) -> InstanceClass {
    if i.is_multiple_of(2) {
        InstanceClass::A
    } else {
        InstanceClass::Atilde
    }
}

/// Random gentle quiver with at most `max_n` vertices.
fn random_quiver(rng: &mut ChaCha8Rng, max_n: usize) -> GentleQuiver {
    let n = rng.gen_range(1..=max_n);
    let extra = rng.gen_range(0..n.min(4));
    random_gentle_quiver(n, extra, rng.gen()).unwrap()
}

fn legal_moves(g: &GentleQuiver) -> Vec<RewriteStep> {
    let mut out = Vec::new();
    for x in g.presentation().vertices() {
        if can_reflect(g, x).unwrap() {
            out.push(RewriteStep::Reflect(x.clone()));
        }
        if can_coreflect(g, x).unwrap() {
            out.push(RewriteStep::Coreflect(x.clone()));
        }
    }
    out
}

fn random_chain(g: &GentleQuiver, rng: &mut ChaCha8Rng, len: usize) -> (GentleQuiver, usize) {
    let mut cur = g.clone();
    let mut done = 0;
    for _ in 0..len {
        let moves = legal_moves(&cur);
        let Some(step) = moves.choose(rng) else { break };
        cur = step.apply(&cur).unwrap();
        done += 1;
    }
    (cur, done)
}

fn gorenstein_by_oracle(q: &QuiverWithRelations) -> Option<usize> {
    let p = Plain::new(q);
    Oracle::new(&p, search_signs(&p).unwrap()).longest_antipath()
}

fn golden_invariants() -> Check {
    let expected = [
        ("f1", inv(&[(4, 2)])),
        ("f2", inv(&[(0, 3), (3, 0)])),
        ("f7", inv(&[(4, 5), (2, 1)])),
        ("f8", inv(&[(0, 3), (3, 3), (2, 1)])),
    ];
    for (key, f) in expected {
        let got = aag_invariant(&gentle_fixture(key)).unwrap();
        ensure!(got == f, "{key}: got {got}, expected {f}");
        ensure!(oracle_invariant(&quiver(key).unwrap()) == f, "{key}: oracle disagrees");
    }
    Ok(())
}

fn golden_rewrite() -> Check {
    let got = reflect(&gentle_fixture("f3"), &VertexId::new("x").unwrap()).unwrap();
    let expected = QuiverWithRelations::from_strs(
        &["x", "v", "v_p", "y", "y_p", "z", "z_p"],
        &[
            ("alpha", "y_p", "v"),
            ("alpha_p", "y", "v_p"),
            ("beta", "x", "y"),
            ("beta_p", "x", "y_p"),
            ("gamma", "z", "x"),
            ("gamma_p", "z_p", "x"),
        ],
        &[("alpha", "beta_p"), ("beta_p", "gamma"), ("alpha_p", "beta"), ("beta", "gamma_p")],
    );
    ensure!(got.presentation() == &expected, "reflection at x gave {:?}", got.presentation());
    Ok(())
}

fn completion_laws() -> Check {
    let Completion::Gentle { quiver: done, added } =
        complete_relations(&gentle_fixture("f7"), &[rel("x5", "x6")]).unwrap()
    else {
        return Err("f7 completion is not gentle".into());
    };
    let renamed = done
        .presentation()
        .rename_arrows(&BTreeMap::from([(added[0].1.clone(), ArrowId::new("x7").unwrap())]))
        .unwrap();
    ensure!(renamed == quiver("f8").unwrap(), "f7 completion differs from f8");

    match complete_relations(&gentle_fixture("f4"), &[rel("alpha", "beta")]).unwrap() {
        Completion::NotGentle { witness_orbit } => {
            ensure!(witness_orbit == vec![rel("alpha", "beta")], "witness {witness_orbit:?}")
        }
        Completion::Gentle { .. } => return Err("f4 completion should not be gentle".into()),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut gentle_runs, mut blocked) = (0, 0);
    while gentle_runs < 200 {
        let g = random_quiver(&mut rng, 12);
        let p = Plain::new(g.presentation());
        let oracle = Oracle::new(&p, search_signs(&p).unwrap());
        let iso = oracle.isolated();
        if iso.is_empty() {
            continue;
        }
        let r0: BTreeSet<(usize, usize)> = iso.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        match complete_relations(&g, &relation_ids(&p, &r0)).unwrap() {
            Completion::Gentle { quiver, .. } => {
                ensure!(!oracle.completion_blocked(&r0), "completion should have failed");
                let lhs = oracle_invariant(quiver.presentation());
                let rhs = oracle.completion_prediction(&p, &r0);
                ensure!(lhs == rhs, "formula fails: {:?} vs {:?}", points(&lhs), points(&rhs));
                gentle_runs += 1;
            }
            Completion::NotGentle { .. } => {
                ensure!(oracle.completion_blocked(&r0), "completion should be gentle");
                blocked += 1;
            }
        }
    }
    ensure!(blocked > 0, "no blocked completion was exercised");
    Ok(())
}

fn classification_verdicts() -> Check {
    let c7 = classify(&gentle_fixture("f7")).unwrap();
    ensure!(!c7.in_class() && c7.cluster_tilted.is_none(), "f7: {c7:?}");

    let c8 = classify(&gentle_fixture("f8")).unwrap();
    let want = ClassDecompositionAtilde {
        m1: 0,
        m2: 1,
        p: 3,
        q: 1,
    };
    ensure!(c8.class_atilde == Some(want), "f8: {:?}", c8.class_atilde);

    let f2 = gentle_fixture("f2");
    let c2 = classify(&f2).unwrap();
    ensure!(c2.cluster_tilted == Some(ClusterType::TypeA), "f2: {:?}", c2.cluster_tilted);
    let p = Plain::new(f2.presentation());
    let oracle = Oracle::new(&p, search_signs(&p).unwrap());
    ensure!(oracle.relations_in_triangles(&p), "f2 shape route");
    ensure!(oracle.longest_antipath().unwrap_or(0) <= 1, "f2 dimension route");
    Ok(())
}

fn sum_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let g = random_quiver(&mut rng, 14);
        let f = aag_invariant(&g).unwrap();
        let (v, a) = (g.num_vertices() as u64, g.num_arrows() as u64);
        ensure!(f.p_sum() + a == 2 * v && f.q_sum() == a, "{f} on {v} vertices, {a} arrows");
    }
    Ok(())
}

fn invariance_under_rewrites() -> Check {
    let mut moves = 0;
    for i in 0..500 {
        let g = instance(i, classes(i), 12);
        let f = aag_invariant(&g).unwrap();
        for step in legal_moves(&g) {
            let h = step.apply(&g).unwrap();
            ensure!(aag_invariant(&h).unwrap() == f, "instance {i}: {step} changes the invariant");
            moves += 1;
        }
    }
    ensure!(moves > 1000, "only {moves} legal rewrites exercised");
    Ok(())
}

fn oracle_equivalence() -> Check {
    let all = exhaustive_gentle(5, 5);
    for q in &all {
        let p = Plain::new(q);
        let signs = search_signs(&p).unwrap();
        let oracle = Oracle::new(&p, signs.clone());
        let g = gentle(q).unwrap().with_signs(signs.to_assignment(&p)).unwrap();
        let (mut paths, mut antipaths) = enumerate_threads(&g).unwrap();
        paths.sort();
        antipaths.sort();
        ensure!((paths, antipaths) == oracle.threads(&p), "threads differ on {q:?}");
        ensure!(aag_invariant(&g).unwrap() == oracle.invariant(&p), "invariant differs on {q:?}");
    }
    ensure!(all.len() > 1000, "only {} quivers enumerated", all.len());
    Ok(())
}

fn strictly_decreasing_per_phase(log: &[MeasureSnapshot]) -> bool {
    log.windows(2)
        .filter(|w| w[0].phase == w[1].phase)
        .all(|w| w[1].key() < w[0].key())
}

fn normalization_soundness() -> Check {
    for i in 0..500u64 {
        let class = if i < 300 { InstanceClass::A } else { InstanceClass::Atilde };
        let g = instance(i, class, 12);
        let result = match class {
            InstanceClass::A => normalize_a(&g),
            InstanceClass::Atilde => normalize_a_tilde(&g),
        }
        .map_err(|e| format!("instance {i} ({class}): {e}"))?;

        let iterations = |phase: Phase| result.measure_log.iter().filter(|m| m.phase == phase && !m.is_done()).count();
        let (v, a) = (g.num_vertices(), g.num_arrows());
        match class {
            InstanceClass::A => {
                let ranked = branch_relations_with_measure(&g).unwrap();
                let max_n = ranked.iter().map(|&(_, n)| n as usize).max().unwrap_or(0);
                let cap = v * (ranked.len() + 1) * (max_n + 1);
                let used = iterations(Phase::BranchRelationsA);
                ensure!(used <= cap, "instance {i}: {used} iterations, cap {cap}");
            }
            InstanceClass::Atilde => {
                let cap = (v + a + 1).pow(3);
                for phase in [Phase::BranchRelationsAtilde, Phase::BranchArrowsAndTriangles, Phase::FreeRelations] {
                    let used = iterations(phase);
                    ensure!(used <= cap, "instance {i}: {used} iterations in {phase:?}, cap {cap}");
                }
            }
        }

        let want = match class {
            InstanceClass::A => ClusterType::TypeA,
            InstanceClass::Atilde => ClusterType::TypeAtilde,
        };
        let out = &result.final_quiver;
        ensure!(classify(out).unwrap().cluster_tilted == Some(want), "instance {i}: output not cluster tilted");
        let p = Plain::new(out.presentation());
        ensure!(
            Oracle::new(&p, search_signs(&p).unwrap()).relations_in_triangles(&p),
            "instance {i}: output has a relation outside the triangles"
        );
        ensure!(
            oracle_invariant(out.presentation()) == oracle_invariant(g.presentation()),
            "instance {i}: invariant changed"
        );
        ensure!(strictly_decreasing_per_phase(&result.measure_log), "instance {i}: measure log not decreasing");
        verify_trace(&result.trace).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(())
}

fn gorenstein_values() -> Check {
    for (key, want) in [("f1", 1), ("f2", 0), ("f6", 2)] {
        let by_oracle = gorenstein_by_oracle(&quiver(key).unwrap());
        ensure!(by_oracle == Some(want), "{key}: oracle gives {by_oracle:?}");
        let got = gorenstein_dimension(&gentle_fixture(key)).unwrap();
        ensure!(got == GorensteinDimension::Exact(want as u64), "{key}: got {got:?}");
    }
    let mut tilted = 0;
    for i in 0..300 {
        let g = instance(i, classes(i), 12);
        let outputs = match classes(i) {
            InstanceClass::A => normalize_a(&g),
            InstanceClass::Atilde => normalize_a_tilde(&g),
        }
        .map(|r| r.final_quiver)
        .map_err(|e| format!("instance {i}: {e}"))?;
        for h in [g, outputs] {
            let c = classify(&h).unwrap();
            if c.cluster_tilted.is_some() {
                tilted += 1;
                ensure!(c.gorenstein.at_most_one(), "instance {i}: {:?}", c.gorenstein);
                let d = gorenstein_by_oracle(h.presentation()).unwrap_or(0);
                ensure!(d <= 1, "instance {i}: oracle dimension {d}");
            }
        }
    }
    ensure!(tilted >= 300, "only {tilted} cluster tilted quivers checked");
    Ok(())
}

fn derived_equivalence() -> Check {
    let mut nontrivial = 0;
    for i in 0..100 {
        let g = instance(1000 + i, classes(i), 10);
        let mut left = ChaCha8Rng::seed_from_u64(2 * i);
        let mut right = ChaCha8Rng::seed_from_u64(2 * i + 1);
        let (g1, n1) = random_chain(&g, &mut left, 6);
        let (g2, n2) = random_chain(&g, &mut right, 6);
        if n1 + n2 > 0 {
            nontrivial += 1;
        }
        let verdict = derived_equivalent(&g1, &g2).unwrap();
        ensure!(verdict == EquivalenceVerdict::EquivalentInClass, "seed {i}: {verdict:?}");
    }
    ensure!(nontrivial >= 90, "only {nontrivial} seeds had a legal rewrite");
    let verdict = derived_equivalent(&gentle_fixture("f1"), &gentle_fixture("f2")).unwrap();
    ensure!(verdict == EquivalenceVerdict::NotEquivalent, "f1 vs f2: {verdict:?}");
    Ok(())
}

/// Corrupts one line of a document.
fn corrupt(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = rng.gen_range(0..lines.len());
    match rng.gen_range(0..4) {
        0 => lines[i] = format!("bogus {}", lines[i]),
        1 => lines[i].push_str(" extra!"),
        2 => {
            let copy = lines[i].clone();
            lines.insert(i, copy);
        }
        _ => lines[i] = lines[i].replace(' ', " ?"),
    }
    lines.join("\n")
}

fn parser_round_trip() -> Check {
    for (key, _) in FIXTURES {
        let doc = document(key).unwrap();
        ensure!(parse_dsl(&emit(&doc)).as_ref() == Ok(&doc), "{key} does not round trip");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rejected = 0;
    for i in 0..500 {
        let doc = generate_random_instance(classes(i), 2 + (i as usize % 11), (i % 3) as f64 / 2.0, i).unwrap();
        let text = emit(&doc);
        ensure!(parse_dsl(&text).as_ref() == Ok(&doc), "generated document {i} does not round trip");

        let bad = corrupt(&text, &mut rng);
        if let Err(errors) = parse_dsl(&bad) {
            rejected += 1;
            let lines: Vec<&str> = bad.lines().collect();
            for e in errors {
                let Position { line, column } = e.position;
                ensure!(line >= 1 && line <= lines.len().max(1), "document {i}: line {line} out of range");
                let width = lines.get(line - 1).map_or(0, |l| l.chars().count());
                ensure!(column >= 1 && column <= width + 1, "document {i}: column {column} beyond line {line}");
            }
        }
    }
    ensure!(rejected >= 400, "only {rejected} corrupted documents were rejected");

    let errors = parse_dsl("quiver q\nvertices 1 2\narrow a 1 3\n").unwrap_err();
    ensure!(
        errors.iter().any(|e| e.position == Position { line: 3, column: 11 }),
        "undeclared vertex reported at {:?}",
        errors.iter().map(|e| e.position).collect::<Vec<_>>()
    );
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("golden invariants", golden_invariants),
        ("golden rewrite", golden_rewrite),
        ("completion laws", completion_laws),
        ("classification verdicts", classification_verdicts),
        ("sum identities", sum_identities),
        ("invariance under rewrites", invariance_under_rewrites),
        ("oracle equivalence", oracle_equivalence),
        ("normalization soundness", normalization_soundness),
        ("Gorenstein values", gorenstein_values),
        ("derived equivalence decision", derived_equivalence),
        ("parser round trip", parser_round_trip),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS criterion {}: {name} ({secs:.1}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
