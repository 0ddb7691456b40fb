//! Acceptance suite. Each criterion runs end to end against its stated
//! tolerance and time budget and prints one pass/fail line; the test
//! fails if any criterion does.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use openrewrite_core::canon::canonical_form;
use openrewrite_core::colimit::{
    certify_pushout_square, pushout, pushout_complement, verify_pushout, CommutingSquare, Span,
};
use openrewrite_core::cospan::{compose_cospans, StructuredCospan};
use openrewrite_core::double::{
    find_cospan_matches, apply_cospan_rule, validate_cospan_rule,
};
use openrewrite_core::dpo::fixtures::{g3, h3, loop_rule};
use openrewrite_core::dpo::{apply_rule, find_matches, Rule};
use openrewrite_core::graph::{
    all_subgraphs, are_isomorphic, compose_homs, enumerate_homs, enumerate_isos, Graph, GraphHom,
};
use openrewrite_core::oracle::{
    check_additivity, check_interchange, check_thm54, check_thm62, random_graph, CheckConfig,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::process::Command;
use std::time::{Duration, Instant};

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn finish(results: Vec<Outcome>) {
    let mut all_ok = true;
    for r in &results {
        let within = r.elapsed <= r.budget;
        let ok = r.passed && within;
        all_ok &= ok;
        println!(
            "{} {} ({:.2?} of {:.0?} budget): {}",
            if ok { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed,
            r.budget,
            r.detail
        );
    }
    assert!(all_ok, "acceptance criteria failed");
}

fn timed<F: FnOnce() -> (bool, String)>(
    name: &'static str,
    budget_secs: u64,
    f: F,
) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f();
    Outcome {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget_secs),
    }
}

fn open_x1() -> StructuredCospan {
    StructuredCospan {
        inputs: ["a", "c", "d"].map(String::from).into(),
        outputs: ["d", "e"].map(String::from).into(),
        apex: Graph::from_parts(
            ["a", "b", "c", "d", "e"],
            [
                ("x1", "a", "b"),
                ("x2", "b", "d"),
                ("x3", "d", "a"),
                ("x4", "e", "d"),
                ("x5", "d", "c"),
                ("x6", "c", "b"),
            ],
        ),
        input_map: [("a", "a"), ("c", "c"), ("d", "d")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
        output_map: [("d", "d"), ("e", "e")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
    }
}

fn open_x2() -> StructuredCospan {
    StructuredCospan {
        inputs: ["d", "e"].map(String::from).into(),
        outputs: ["e", "f"].map(String::from).into(),
        apex: Graph::from_parts(
            ["d", "e", "f"],
            [("y1", "d", "e"), ("y2", "e", "f"), ("y3", "f", "d")],
        ),
        input_map: [("d", "d"), ("e", "e")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
        output_map: [("e", "e"), ("f", "f")]
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .into(),
    }
}

/// Random span whose legs start from a shared small apex.
fn random_span(rng: &mut StdRng) -> Span {
    loop {
        let apex = random_graph(rng.gen(), 3, 2, None);
        let left_target = random_graph(rng.gen(), 4, 4, None);
        let right_target = random_graph(rng.gen(), 4, 4, None);
        let lefts = enumerate_homs(&apex, &left_target, false);
        let rights = enumerate_homs(&apex, &right_target, false);
        if lefts.is_empty() || rights.is_empty() {
            continue;
        }
        let left = lefts[rng.gen_range(0..lefts.len())].clone();
        let right = rights[rng.gen_range(0..rights.len())].clone();
        return Span { apex, left, right };
    }
}

fn criterion_1() -> (bool, String) {
    let rule = loop_rule();
    let matches: Vec<_> = find_matches(&rule, &g3(), true)
        .unwrap()
        .into_iter()
        .filter(|m| m.applicable)
        .collect();
    if matches.len() != 1 {
        return (false, format!("expected 1 mono match, found {}", matches.len()));
    }
    let step = apply_rule(&rule, &g3(), &matches[0].matching).unwrap();
    let complement_ok =
        step.complement.node_count() == 3 && step.complement.edge_count() == 2;
    let result_iso = are_isomorphic(&step.result, &h3())
        && !enumerate_isos(&step.result, &h3()).is_empty();
    (
        complement_ok && result_iso,
        format!(
            "complement {}n/{}e, result isomorphic to loop-free host: {}",
            step.complement.node_count(),
            step.complement.edge_count(),
            result_iso
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let composite = compose_cospans(&open_x1(), &open_x2()).unwrap();
    let ok = composite.apex.node_count() == 6
        && composite.apex.edge_count() == 9
        && composite.inputs == ["a", "c", "d"].map(String::from).into()
        && composite.outputs == ["e", "f"].map(String::from).into();
    (
        ok,
        format!(
            "apex {}n/{}e, inputs {:?}, outputs {:?}",
            composite.apex.node_count(),
            composite.apex.edge_count(),
            composite.inputs,
            composite.outputs
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(23_01_01);
    let mut false_negatives = 0u32;
    for _ in 0..200 {
        let span = random_span(&mut rng);
        let po = pushout(&span).unwrap();
        let square = CommutingSquare {
            span,
            cocone_left: po.inj_left,
            cocone_right: po.inj_right,
        };
        if !verify_pushout(&square).unwrap() {
            false_negatives += 1;
        }
    }
    let mut false_positives = 0u32;
    for i in 0..50 {
        let span = random_span(&mut rng);
        let po = pushout(&span).unwrap();
        let p = po.object.clone();
        let (bad, cocone_left, cocone_right) = match i % 3 {
            0 => {
                // invented node
                let mut bad = p.clone();
                bad.nodes.insert("!stray".into());
                let retarget = |h: &GraphHom| GraphHom {
                    source: h.source.clone(),
                    target: bad.clone(),
                    node_map: h.node_map.clone(),
                    edge_map: h.edge_map.clone(),
                };
                (bad.clone(), retarget(&po.inj_left), retarget(&po.inj_right))
            }
            1 => {
                // duplicated edge
                let mut bad = p.clone();
                match p.edges.iter().next() {
                    Some((id, e)) => {
                        bad.edges.insert(format!("{id}!dup"), e.clone());
                    }
                    None => {
                        bad.nodes.insert("!stray".into());
                    }
                }
                let retarget = |h: &GraphHom| GraphHom {
                    source: h.source.clone(),
                    target: bad.clone(),
                    node_map: h.node_map.clone(),
                    edge_map: h.edge_map.clone(),
                };
                (bad.clone(), retarget(&po.inj_left), retarget(&po.inj_right))
            }
            _ => {
                // merged pair of nodes
                let nodes: Vec<_> = p.nodes.iter().cloned().collect();
                if nodes.len() < 2 {
                    let mut bad = p.clone();
                    bad.nodes.insert("!stray".into());
                    let retarget = |h: &GraphHom| GraphHom {
                        source: h.source.clone(),
                        target: bad.clone(),
                        node_map: h.node_map.clone(),
                        edge_map: h.edge_map.clone(),
                    };
                    (bad.clone(), retarget(&po.inj_left), retarget(&po.inj_right))
                } else {
                    let (u, v) = (nodes[0].clone(), nodes[1].clone());
                    let bad = p.relabeled(
                        &[(u.clone(), v.clone())].into(),
                        &Default::default(),
                    );
                    let quotient = GraphHom {
                        source: p.clone(),
                        target: bad.clone(),
                        node_map: p
                            .nodes
                            .iter()
                            .map(|n| {
                                (n.clone(), if *n == u { v.clone() } else { n.clone() })
                            })
                            .collect(),
                        edge_map: p.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
                    };
                    (
                        bad,
                        compose_homs(&po.inj_left, &quotient).unwrap(),
                        compose_homs(&po.inj_right, &quotient).unwrap(),
                    )
                }
            }
        };
        let _ = bad;
        let square = CommutingSquare {
            span: po.span,
            cocone_left,
            cocone_right,
        };
        if verify_pushout(&square).unwrap() {
            false_positives += 1;
        }
    }
    (
        false_negatives == 0 && false_positives == 0,
        format!(
            "200 constructed pushouts: {false_negatives} rejected; 50 corrupted squares: {false_positives} accepted"
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(44);
    let mut checked_matches = 0u32;
    let mut complements_found = 0u32;
    let mut violations = 0u32;
    let mut config = 0u64;
    while checked_matches < 40 && config < 400 {
        config += 1;
        // a small monic-legged rule and a host of at most 4 nodes
        let left = random_graph(rng.gen(), 3, 3, None);
        let interface_nodes: Vec<_> = left
            .nodes
            .iter()
            .filter(|_| rng.gen_bool(0.8))
            .cloned()
            .collect();
        if interface_nodes.is_empty() {
            continue;
        }
        let interface = Graph::discrete(interface_nodes);
        let to_left = GraphHom {
            source: interface.clone(),
            target: left.clone(),
            node_map: interface.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
            edge_map: Default::default(),
        };
        let Ok(rule) = Rule::new("probe", to_left, GraphHom::identity(&interface)) else {
            continue;
        };
        let g = random_graph(rng.gen(), 4, 4, None);
        for cand in find_matches(&rule, &g, true).unwrap() {
            if !cand.applicable {
                continue;
            }
            let formula = pushout_complement(&rule.to_left, &cand.matching).unwrap();
            checked_matches += 1;
            let mut found_here = 0u32;
            for sub in all_subgraphs(&g) {
                let candidate = sub.to_graph();
                let inclusion = sub.inclusion();
                for to_candidate in enumerate_homs(&rule.interface, &candidate, false) {
                    let span = Span {
                        apex: rule.interface.clone(),
                        left: rule.to_left.clone(),
                        right: to_candidate,
                    };
                    let commutes = compose_homs(&span.left, &cand.matching).unwrap()
                        == compose_homs(&span.right, &inclusion).unwrap();
                    if commutes
                        && certify_pushout_square(&span, &cand.matching, &inclusion).unwrap()
                    {
                        found_here += 1;
                        if !are_isomorphic(&candidate, &formula.complement) {
                            violations += 1;
                        }
                    }
                }
            }
            if found_here == 0 {
                violations += 1;
            }
            complements_found += found_here;
        }
    }
    (
        violations == 0 && checked_matches >= 40,
        format!(
            "{checked_matches} matches, {complements_found} complements enumerated, {violations} non-isomorphic"
        ),
    )
}

fn criterion_5() -> (bool, String) {
    let report = check_thm54(&CheckConfig {
        trials: 100,
        seed: 42,
        depth: 3,
        inject_failure: false,
    })
    .unwrap();
    if !report.passed() {
        return (false, format!("{} counterexamples", report.failures.len()));
    }
    let injected = check_thm54(&CheckConfig {
        trials: 3,
        seed: 42,
        depth: 3,
        inject_failure: true,
    })
    .unwrap();
    (
        !injected.passed(),
        format!(
            "100 trials, 0 counterexamples; injection reports {}",
            injected.failures.len()
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let report = check_additivity(&CheckConfig {
        trials: 50,
        seed: 42,
        depth: 2,
        inject_failure: false,
    })
    .unwrap();
    (
        report.passed(),
        format!("50 trials, {} failures", report.failures.len()),
    )
}

fn criterion_7() -> (bool, String) {
    let report = check_thm62(&CheckConfig {
        trials: 50,
        seed: 42,
        depth: 2,
        inject_failure: false,
    })
    .unwrap();
    (
        report.passed(),
        format!("50 trials, {} failures", report.failures.len()),
    )
}

fn criterion_8() -> (bool, String) {
    let report = check_interchange(&CheckConfig {
        trials: 50,
        seed: 42,
        depth: 1,
        inject_failure: false,
    })
    .unwrap();
    (
        report.passed() && report.trials >= 50,
        format!("{} quadruples, {} failures", report.trials, report.failures.len()),
    )
}

fn criterion_9() -> (bool, String) {
    // plain derived rules re-validate across random applications
    let mut rng = StdRng::seed_from_u64(99);
    let mut derivations = 0u32;
    let mut violations = 0u32;
    for _ in 0..120 {
        let g = random_graph(rng.gen(), 5, 5, None);
        let rule = loop_rule();
        for cand in find_matches(&rule, &g, true).unwrap() {
            if !cand.applicable {
                continue;
            }
            let step = apply_rule(&rule, &g, &cand.matching).unwrap();
            let derived = step.derived_rule().unwrap();
            if !derived.validate().is_valid()
                || !step.derived_to_left.classify().is_mono
                || !step.derived_to_right.classify().is_mono
            {
                violations += 1;
            }
            derivations += 1;
        }
    }
    // cospan derived squares re-validate (mono apex legs, iso feet)
    let rule = openrewrite_core::double::fixtures::loop_cospan_rule().square;
    let (_, mid, _) = openrewrite_core::double::fixtures::two_loop_decomposition();
    for target in [
        rule.normalize().unwrap().top,
        mid,
    ] {
        for cand in find_cospan_matches(&rule, &target, true).unwrap() {
            if !cand.applicable {
                continue;
            }
            let derivation = apply_cospan_rule(&rule, &target, &cand.morphism).unwrap();
            if !validate_cospan_rule(&derivation.derived).is_valid() {
                violations += 1;
            }
            derivations += 1;
        }
    }
    (
        violations == 0 && derivations > 0,
        format!("{derivations} derivations re-validated, {violations} violations"),
    )
}

fn criterion_10() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_openrewrite");
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let fx = |name: &str| fixtures.join(name).to_string_lossy().into_owned();
    let strip_timing = |bytes: &[u8]| -> String {
        String::from_utf8_lossy(bytes)
            .lines()
            .filter(|l| !l.contains("\"wall_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let x1 = fx("x1.json");
    let x2 = fx("x2.json");
    let rule = fx("loop-rule.json");
    let g3 = fx("g3.json");
    let grammar = fx("loop-grammar.json");
    let h3 = fx("h3.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["compose", &x1, &x2],
        vec!["apply", "-r", &rule, "-g", &g3, "--match", "0"],
        vec![
            "reach", "-G", &grammar, "--from", &g3, "--to", &h3, "--max-depth", "2",
        ],
        vec!["discretize", "-G", &grammar],
        vec!["export-dot", &x1],
        vec!["check", "thm54", "--trials", "5", "--seed", "1"],
        vec!["validate", &g3],
        vec!["match", "-r", &rule, "-g", &g3],
    ];
    for args in &cases {
        let run = || {
            Command::new(bin)
                .args(args)
                .env("OPENREWRITE_SEED", "0")
                .output()
                .unwrap()
        };
        let a = run();
        let b = run();
        if strip_timing(&a.stdout) != strip_timing(&b.stdout)
            || a.status.code() != b.status.code()
        {
            return (false, format!("nondeterministic output for {args:?}"));
        }
    }
    (true, format!("{} commands byte-identical across reruns", cases.len()))
}

#[test]
fn acceptance() {
    // worked-example sanity used by several criteria
    assert_eq!(canonical_form(&g3()).len() > 0, true);
    let results = vec![
        timed("criterion 1 (worked DPO example)", 1, criterion_1),
        timed("criterion 2 (open-graph composition)", 1, criterion_2),
        timed("criterion 3 (universal-property oracle)", 120, criterion_3),
        timed("criterion 4 (complement uniqueness)", 300, criterion_4),
        timed("criterion 5 (discretization suite)", 600, criterion_5),
        timed("criterion 6 (additivity suite)", 300, criterion_6),
        timed("criterion 7 (inductive-language suite)", 900, criterion_7),
        timed("criterion 8 (interchange suite)", 300, criterion_8),
        timed("criterion 9 (derived rules re-validate)", 300, criterion_9),
        timed("criterion 10 (CLI determinism)", 300, criterion_10),
    ];
    finish(results);
}
