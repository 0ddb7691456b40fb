//! Randomized and exhaustive theorem-checking suites. Every check is
//! deterministic in its seed, records its bounds, and serializes any
//! counterexample completely enough to re-run it.

use crate::canon::certificate_hex;
use crate::cospan::StructuredCospan;
use crate::discrete::{discretize_grammar, hat_grammar};
use crate::double::{
    hcompose, interchange_check, lang_closure, squares_isomorphic, vcompose, ClosureLimits,
    Square,
};
use crate::dpo::{
    derive_closure, reachable, Grammar, Reachability, Rule, SearchBounds, Trace,
};
use crate::error::Error;
use crate::graph::{Edge, Graph, GraphHom, NodeId};
use crate::json::{to_json_string, GrammarDoc, GraphDoc};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub trials: u32,
    pub seed: u64,
    pub depth: usize,
    /// deliberately corrupt one trial to demonstrate the check can fail
    pub inject_failure: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckFailure {
    pub trial: u32,
    pub description: String,
    pub counterexample: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub format_version: String,
    pub check: String,
    pub trials: u32,
    pub seed: u64,
    pub bounds: Value,
    pub failures: Vec<CheckFailure>,
    pub wall_ms: u128,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn new(check: &str, cfg: &CheckConfig, bounds: Value) -> CheckReport {
        CheckReport {
            format_version: crate::json::FORMAT_VERSION.to_string(),
            check: check.to_string(),
            trials: cfg.trials,
            seed: cfg.seed,
            bounds,
            failures: Vec::new(),
            wall_ms: 0,
        }
    }
}

/// Deterministic random graph within the given bounds; nodes are named
/// `n0..`, edges `e0..`. With a type graph, types are sampled so the
/// typing is a valid homomorphism.
pub fn random_graph(seed: u64, max_nodes: usize, max_edges: usize, type_graph: Option<&Graph>) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    random_graph_with(&mut rng, max_nodes, max_edges, type_graph)
}

fn random_graph_with(
    rng: &mut StdRng,
    max_nodes: usize,
    max_edges: usize,
    type_graph: Option<&Graph>,
) -> Graph {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let nodes: Vec<NodeId> = (0..n).map(|i| format!("n{i}")).collect();
    let mut g = Graph::discrete(nodes.clone());
    let mut node_types = BTreeMap::new();
    if let Some(tg) = type_graph {
        let tg_nodes: Vec<&NodeId> = tg.nodes.iter().collect();
        for node in &nodes {
            node_types.insert(
                node.clone(),
                tg_nodes[rng.gen_range(0..tg_nodes.len())].clone(),
            );
        }
    }
    let m = rng.gen_range(0..=max_edges);
    let mut edge_types = BTreeMap::new();
    let mut added = 0usize;
    let mut attempts = 0usize;
    while added < m && attempts < 8 * m.max(1) {
        attempts += 1;
        let src = nodes[rng.gen_range(0..n)].clone();
        let tgt = nodes[rng.gen_range(0..n)].clone();
        if let Some(tg) = type_graph {
            let candidates: Vec<&String> = tg
                .edges
                .iter()
                .filter(|(_, te)| {
                    node_types.get(&src) == Some(&te.src) && node_types.get(&tgt) == Some(&te.tgt)
                })
                .map(|(id, _)| id)
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let te = candidates[rng.gen_range(0..candidates.len())].clone();
            edge_types.insert(format!("e{added}"), te);
        }
        g.edges.insert(format!("e{added}"), Edge { src, tgt });
        added += 1;
    }
    if type_graph.is_some() {
        g.typing = Some(crate::graph::Typing {
            type_graph: "tg".into(),
            node_types,
            edge_types,
        });
    }
    g
}

/// Random rule biased toward applicability: the interface is a subgraph
/// of the left side (all nodes kept most of the time, so matches rarely
/// dangle), and the right side extends the interface.
fn random_rule(
    rng: &mut StdRng,
    name: String,
    max_nodes: usize,
    max_edges: usize,
    discrete_interface: bool,
) -> Rule {
    let left = random_graph_with(rng, max_nodes, max_edges, None);
    // interface nodes: usually all of them
    let keep_all = rng.gen_bool(0.7);
    let interface_nodes: BTreeSet<NodeId> = left
        .nodes
        .iter()
        .filter(|_| keep_all || rng.gen_bool(0.7))
        .cloned()
        .collect();
    let interface_nodes = if interface_nodes.is_empty() {
        left.nodes.iter().take(1).cloned().collect()
    } else {
        interface_nodes
    };
    let interface_edges: BTreeMap<String, Edge> = if discrete_interface {
        BTreeMap::new()
    } else {
        left.edges
            .iter()
            .filter(|(_, e)| {
                interface_nodes.contains(&e.src) && interface_nodes.contains(&e.tgt)
            })
            .filter(|_| rng.gen_bool(0.5))
            .map(|(id, e)| (id.clone(), e.clone()))
            .collect()
    };
    let interface = Graph {
        nodes: interface_nodes,
        edges: interface_edges,
        typing: None,
    };
    let to_left = GraphHom {
        source: interface.clone(),
        target: left.clone(),
        node_map: interface.nodes.iter().map(|x| (x.clone(), x.clone())).collect(),
        edge_map: interface.edges.keys().map(|x| (x.clone(), x.clone())).collect(),
    };
    // right side: the interface plus a few fresh nodes and edges
    let mut right = interface.clone();
    for i in 0..rng.gen_range(0..=2) {
        right.nodes.insert(format!("r{i}"));
    }
    let right_nodes: Vec<NodeId> = right.nodes.iter().cloned().collect();
    for i in 0..rng.gen_range(0..=2) {
        let src = right_nodes[rng.gen_range(0..right_nodes.len())].clone();
        let tgt = right_nodes[rng.gen_range(0..right_nodes.len())].clone();
        right.edges.insert(format!("re{i}"), Edge { src, tgt });
    }
    let to_right = GraphHom {
        source: interface.clone(),
        target: right.clone(),
        node_map: interface.nodes.iter().map(|x| (x.clone(), x.clone())).collect(),
        edge_map: interface.edges.keys().map(|x| (x.clone(), x.clone())).collect(),
    };
    Rule::new(name, to_left, to_right).expect("random rule construction is valid")
}

fn random_grammar(
    rng: &mut StdRng,
    max_rules: usize,
    max_nodes: usize,
    max_edges: usize,
    discrete_interface: bool,
) -> Grammar {
    let count = rng.gen_range(1..=max_rules.max(1));
    let rules = (0..count)
        .map(|i| {
            random_rule(
                rng,
                format!("rule{i}"),
                max_nodes,
                max_edges,
                discrete_interface,
            )
        })
        .collect();
    Grammar::new(rules).expect("random grammar names are unique")
}

fn grammar_value(g: &Grammar) -> Value {
    serde_json::from_str(&to_json_string(&GrammarDoc::from_grammar(g))).unwrap()
}

fn graph_value(g: &Graph) -> Value {
    serde_json::from_str(&to_json_string(&GraphDoc::from_graph(g))).unwrap()
}

/// Add an isolated node; the canonical corruption used by the failure
/// injection modes (it mimics a pushout that invented an element).
fn corrupt_graph(g: &Graph) -> Graph {
    let mut bad = g.clone();
    bad.nodes.insert("!corrupt".into());
    if let Some(t) = &mut bad.typing {
        if let Some(any) = t.node_types.values().next().cloned() {
            t.node_types.insert("!corrupt".into(), any);
        }
    }
    bad
}

/// The derivation closures of a grammar and of its discretization agree
/// as canonical-form sets at every common depth.
pub fn check_thm54(cfg: &CheckConfig) -> Result<CheckReport, Error> {
    let start = Instant::now();
    let max_rule_nodes = 4;
    let max_start_nodes = 5;
    let max_size = 9;
    let mut report = CheckReport::new(
        "thm54",
        cfg,
        json!({
            "depth": cfg.depth,
            "max_rule_nodes": max_rule_nodes,
            "max_start_nodes": max_start_nodes,
            "max_size": max_size,
            "inject_failure": cfg.inject_failure,
        }),
    );
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    for trial in 0..cfg.trials {
        let grammar = random_grammar(&mut rng, 2, max_rule_nodes, 4, false);
        let g = random_graph_with(&mut rng, max_start_nodes, 6, None);
        let flat = discretize_grammar(&grammar)?;
        let bounds = SearchBounds {
            max_depth: cfg.depth,
            max_size,
        };
        let original = derive_closure(&grammar, &g, bounds, true)?;
        let discrete = derive_closure(&flat, &g, bounds, true)?;
        let keys_a: BTreeSet<_> = original.classes.keys().cloned().collect();
        let mut keys_b: BTreeSet<_> = discrete.classes.keys().cloned().collect();
        if cfg.inject_failure && trial == 0 {
            // simulate a pushout that invented a node somewhere in the
            // discrete closure
            let mut bad = corrupt_graph(&g);
            while keys_a.contains(&crate::canon::canonical_form(&bad)) {
                bad = corrupt_graph(&bad);
            }
            keys_b.insert(crate::canon::canonical_form(&bad));
        }
        if keys_a != keys_b {
            let only_a: Vec<String> = keys_a
                .difference(&keys_b)
                .map(|c| certificate_hex(c))
                .collect();
            let only_b: Vec<String> = keys_b
                .difference(&keys_a)
                .map(|c| certificate_hex(c))
                .collect();
            report.failures.push(CheckFailure {
                trial,
                description: "closure of the grammar and of its discretization differ".into(),
                counterexample: json!({
                    "grammar": grammar_value(&grammar),
                    "start": graph_value(&g),
                    "only_in_original": only_a,
                    "only_in_discrete": only_b,
                }),
            });
        }
    }
    report.wall_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Rewriting is additive over disjoint unions: witnesses for `x ~> y`
/// and `x' ~> y'` combine to a witness for `x+x' ~> y+y'`.
pub fn check_additivity(cfg: &CheckConfig) -> Result<CheckReport, Error> {
    let start = Instant::now();
    let max_size = 16;
    let mut report = CheckReport::new(
        "additivity",
        cfg,
        json!({
            "depth": cfg.depth,
            "max_size": max_size,
            "inject_failure": cfg.inject_failure,
        }),
    );
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    for trial in 0..cfg.trials {
        let grammar = random_grammar(&mut rng, 2, 3, 3, false);
        let x = random_graph_with(&mut rng, 4, 4, None);
        let x2 = random_graph_with(&mut rng, 4, 4, None);
        let bounds = SearchBounds {
            max_depth: cfg.depth,
            max_size: 8,
        };
        let pick = |rng: &mut StdRng, closure: &crate::dpo::Closure| -> (Graph, usize) {
            let traces: Vec<&Trace> = closure.classes.values().collect();
            let t = traces[rng.gen_range(0..traces.len())];
            let end = t
                .steps
                .last()
                .map(|s| s.result.clone())
                .unwrap_or_else(|| {
                    // reflexive class: recover the start graph
                    closure
                        .classes
                        .values()
                        .find_map(|tr| tr.steps.first().map(|s| s.start().clone()))
                        .unwrap_or_default()
                });
            (end, t.steps.len())
        };
        let c1 = derive_closure(&grammar, &x, bounds, true)?;
        let c2 = derive_closure(&grammar, &x2, bounds, true)?;
        let (y, d1) = {
            let (end, d) = pick(&mut rng, &c1);
            if d == 0 {
                (x.clone(), 0)
            } else {
                (end, d)
            }
        };
        let (y2, d2) = {
            let (end, d) = pick(&mut rng, &c2);
            if d == 0 {
                (x2.clone(), 0)
            } else {
                (end, d)
            }
        };
        let sum_start = crate::colimit::coproduct(&x, &x2)?.object;
        let mut sum_target = crate::colimit::coproduct(&y, &y2)?.object;
        if cfg.inject_failure && trial == 0 {
            sum_target = corrupt_graph(&sum_target);
        }
        let verdict = reachable(
            &grammar,
            &sum_start,
            &sum_target,
            SearchBounds {
                max_depth: d1 + d2,
                max_size,
            },
            true,
        )?;
        if !matches!(verdict, Reachability::Found(_)) {
            report.failures.push(CheckFailure {
                trial,
                description: format!(
                    "sum not reachable in {} steps although parts are ({} and {})",
                    d1 + d2,
                    d1,
                    d2
                ),
                counterexample: json!({
                    "grammar": grammar_value(&grammar),
                    "x": graph_value(&x),
                    "x2": graph_value(&x2),
                    "y": graph_value(&y),
                    "y2": graph_value(&y2),
                }),
            });
        }
    }
    report.wall_ms = start.elapsed().as_millis();
    Ok(report)
}

/// The complement cospan of a derivation step: the rule's interface
/// nodes map into the step's complement, with an empty output foot.
fn theta_cospan(
    grammar: &Grammar,
    step: &crate::dpo::DerivationStep,
) -> Result<StructuredCospan, Error> {
    let rule = grammar
        .rule(&step.rule_name)
        .ok_or_else(|| Error::Invalid("trace names unknown rule".into()))?;
    let theta: BTreeMap<String, String> = rule
        .interface
        .nodes
        .iter()
        .map(|z| {
            (
                z.clone(),
                step.matching.node_map[&rule.to_left.node_map[z]].clone(),
            )
        })
        .collect();
    Ok(StructuredCospan {
        inputs: rule.interface.nodes.iter().cloned().collect(),
        outputs: BTreeSet::new(),
        apex: step.complement.clone(),
        input_map: theta,
        output_map: BTreeMap::new(),
    })
}

/// A closed graph rewrites to another iff the language generated by the
/// decomposition squares contains a square between their closed cospans:
/// operational reachability and inductive square existence agree.
pub fn check_thm62(cfg: &CheckConfig) -> Result<CheckReport, Error> {
    let start = Instant::now();
    let max_size = 6;
    // square rows may not outgrow what the operational search can
    // verify, so the node caps agree
    let limits = ClosureLimits {
        max_squares: 400,
        max_apex_nodes: max_size,
        max_apex_edges: 14,
    };
    let mut report = CheckReport::new(
        "thm62",
        cfg,
        json!({
            "depth": cfg.depth,
            "max_size": max_size,
            "max_squares": limits.max_squares,
            "inject_failure": cfg.inject_failure,
        }),
    );
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    for trial in 0..cfg.trials {
        let (grammar, g) = if cfg.inject_failure && trial == 0 {
            // the worked fixture guarantees at least one derivation step
            // for the injected corruption to land on
            (
                crate::dpo::fixtures::loop_grammar(),
                crate::dpo::fixtures::g3(),
            )
        } else {
            (
                random_grammar(&mut rng, 2, 3, 3, true),
                random_graph_with(&mut rng, 4, 4, None),
            )
        };
        let flat = discretize_grammar(&grammar)?;
        let bounds = SearchBounds {
            max_depth: cfg.depth,
            max_size,
        };
        let operational = derive_closure(&flat, &g, bounds, true)?;
        // chains in the language closure can double per round, so the
        // converse direction is checked at the deeper operational bound
        let deep_bounds = SearchBounds {
            max_depth: (1usize << cfg.depth.min(3)).max(cfg.depth),
            max_size,
        };
        let deep = derive_closure(&flat, &g, deep_bounds, true)?;

        let hat = hat_grammar(&flat)?;

        // seeds: the closed start plus the complement cospans of every
        // derivation step (the horizontal arrows of the constructive
        // proof)
        let mut seeds: Vec<StructuredCospan> = vec![StructuredCospan::closed(&g)];
        for trace in operational.classes.values() {
            for step in &trace.steps {
                seeds.push(theta_cospan(&flat, step)?);
            }
        }
        let lang = lang_closure(&hat, &seeds, cfg.depth.max(1), limits)?;

        let closed_g = StructuredCospan::closed(&g);
        // every operationally reached graph has a witnessing square:
        // each step is a generator square beside the identity square on
        // its complement cospan, and the steps stack vertically
        for trace in operational.classes.values() {
            let mut witness = Square::identity(&closed_g);
            let mut construction: Result<(), Error> = Ok(());
            for step in &trace.steps {
                let hat_rule = hat
                    .rules
                    .iter()
                    .find(|r| r.name == format!("{}-hat", step.rule_name))
                    .ok_or_else(|| Error::Invalid("missing decomposition square".into()))?;
                let mut gen = hat_rule.square.clone();
                if cfg.inject_failure && trial == 0 {
                    // as if the step's pushout had invented a node
                    gen.bottom.apex = corrupt_graph(&gen.bottom.apex);
                    gen.down.apex.target = gen.bottom.apex.clone();
                    gen.down.target = gen.bottom.clone();
                }
                let step_square =
                    hcompose(&gen, &Square::identity(&theta_cospan(&flat, step)?));
                match step_square.and_then(|s| vcompose(&witness, &s)) {
                    Ok(next) => witness = next,
                    Err(e) => {
                        construction = Err(e);
                        break;
                    }
                }
            }
            let end = trace
                .steps
                .last()
                .map(|s| s.result.clone())
                .unwrap_or_else(|| g.clone());
            let boundary_ok = construction.is_ok()
                && crate::cospan::cospans_isomorphic(&witness.top, &closed_g)
                && crate::cospan::cospans_isomorphic(
                    &witness.bottom,
                    &StructuredCospan::closed(&end),
                );
            // the constructed square is a composite of generators, so it
            // must appear in the bounded closure whenever that closure
            // finished
            let in_closure = if boundary_ok && lang.complete {
                lang.contains_square(&witness)?
            } else {
                boundary_ok
            };
            if !boundary_ok || !in_closure {
                report.failures.push(CheckFailure {
                    trial,
                    description: "reachable graph has no witnessing square".into(),
                    counterexample: json!({
                        "grammar": grammar_value(&flat),
                        "start": graph_value(&g),
                        "end": graph_value(&end),
                        "construction_error": construction.err().map(|e| e.to_string()),
                        "squares_built": lang.squares.len(),
                        "closure_complete": lang.complete,
                    }),
                });
            }
        }
        // every square out of closed(g) lands on an operationally
        // reachable graph
        let top_cert = closed_g.certificate();
        for square in &lang.squares {
            if square.top.certificate() != top_cert || !square.bottom.inputs.is_empty() {
                continue;
            }
            if !deep.contains(&square.bottom.apex) {
                report.failures.push(CheckFailure {
                    trial,
                    description: "square lands on an operationally unreachable graph".into(),
                    counterexample: json!({
                        "grammar": grammar_value(&flat),
                        "start": graph_value(&g),
                        "bottom": graph_value(&square.bottom.apex),
                    }),
                });
            }
        }
    }
    report.wall_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Interchange holds on composable quadruples sampled from small
/// language closures.
pub fn check_interchange(cfg: &CheckConfig) -> Result<CheckReport, Error> {
    let start = Instant::now();
    let limits = ClosureLimits {
        max_squares: 70,
        max_apex_nodes: 5,
        max_apex_edges: 7,
    };
    let mut report = CheckReport::new(
        "interchange",
        cfg,
        json!({
            "max_squares": limits.max_squares,
            "inject_failure": cfg.inject_failure,
        }),
    );
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut checked: u32 = 0;
    let mut round: u64 = 0;
    while checked < cfg.trials && round < 40 {
        round += 1;
        // a random open graph whose interface carries some loops, so the
        // loop rule composes in all directions
        let apex = random_graph_with(&mut rng, 3, 4, None);
        let nodes: Vec<NodeId> = apex.nodes.iter().cloned().collect();
        let with_loops = {
            let mut g = apex.clone();
            for (i, n) in nodes.iter().enumerate() {
                if rng.gen_bool(0.6) {
                    g.edges.insert(
                        format!("extra_loop{i}"),
                        Edge {
                            src: n.clone(),
                            tgt: n.clone(),
                        },
                    );
                }
            }
            g
        };
        let feet: BTreeMap<String, String> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (format!("q{i}"), n.clone()))
            .collect();
        let seed_cospan = StructuredCospan {
            inputs: feet.keys().cloned().collect(),
            outputs: feet.keys().cloned().collect(),
            apex: with_loops,
            input_map: feet.clone(),
            output_map: feet,
        };
        let closure = lang_closure(
            &crate::double::fixtures::loop_cospan_grammar(),
            &[seed_cospan],
            1,
            limits,
        )?;
        let squares = &closure.squares;
        'quads: for a in squares {
            for b in squares {
                if a.output_set() != b.input_set() {
                    continue;
                }
                for c in squares {
                    if !crate::cospan::cospans_isomorphic(&a.bottom, &c.top) {
                        continue;
                    }
                    for d in squares {
                        if b.output_set() != d.input_set()
                            || c.output_set() != d.input_set()
                            || !crate::cospan::cospans_isomorphic(&b.bottom, &d.top)
                        {
                            continue;
                        }
                        let ok = if cfg.inject_failure && checked == 0 {
                            // corrupt one composite before comparison
                            let h_then_v = vcompose(&hcompose(a, b)?, &hcompose(c, d)?)?;
                            let mut v_then_h = hcompose(&vcompose(a, c)?, &vcompose(b, d)?)?;
                            v_then_h.top.apex = corrupt_graph(&v_then_h.top.apex);
                            v_then_h.up.apex.target = v_then_h.top.apex.clone();
                            v_then_h.up.target = v_then_h.top.clone();
                            squares_isomorphic(&h_then_v, &v_then_h)?
                        } else {
                            interchange_check(a, b, c, d)?
                        };
                        if !ok {
                            report.failures.push(CheckFailure {
                                trial: checked,
                                description: "interchange law violated".into(),
                                counterexample: json!({
                                    "a_top": graph_value(&a.top.apex),
                                    "b_top": graph_value(&b.top.apex),
                                    "c_top": graph_value(&c.top.apex),
                                    "d_top": graph_value(&d.top.apex),
                                }),
                            });
                        }
                        checked += 1;
                        if checked >= cfg.trials {
                            break 'quads;
                        }
                    }
                }
            }
        }
    }
    report.trials = checked;
    report.wall_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Dispatch by check name; the CLI surface.
pub fn run_check(name: &str, cfg: &CheckConfig) -> Result<CheckReport, Error> {
    match name {
        "thm54" => check_thm54(cfg),
        "additivity" => check_additivity(cfg),
        "thm62" => check_thm62(cfg),
        "interchange" => check_interchange(cfg),
        other => Err(Error::Invalid(format!(
            "unknown check {other:?} (expected thm54, thm62, additivity or interchange)"
        ))),
    }
}

#[allow(dead_code)]
fn unused_square_guard(_: &Square) {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_graphs_deterministic_and_valid() {
        let a = random_graph(0, 1, 0, None);
        assert_eq!(a.node_count(), 1);
        assert_eq!(a.edge_count(), 0);
        assert_eq!(random_graph(7, 5, 6, None), random_graph(7, 5, 6, None));
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..200 {
            let g = random_graph_with(&mut rng, 6, 8, None);
            assert!(g.validate().is_valid());
        }
    }

    #[test]
    fn random_typed_graphs_validate_against_type_graph() {
        let tg = Graph::from_parts(["A", "B"], [("t1", "A", "B"), ("t2", "B", "B")]);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_graph_with(&mut rng, 5, 6, Some(&tg));
            assert!(g.validate_against(&tg).is_valid(), "{}", g.validate_against(&tg));
        }
    }

    #[test]
    fn thm54_small_run_passes() {
        let report = check_thm54(&CheckConfig {
            trials: 12,
            seed: 42,
            depth: 2,
            inject_failure: false,
        })
        .unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn thm54_injection_fails() {
        let report = check_thm54(&CheckConfig {
            trials: 3,
            seed: 42,
            depth: 2,
            inject_failure: true,
        })
        .unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn additivity_small_run_passes() {
        let report = check_additivity(&CheckConfig {
            trials: 8,
            seed: 11,
            depth: 2,
            inject_failure: false,
        })
        .unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn additivity_injection_fails() {
        let report = check_additivity(&CheckConfig {
            trials: 2,
            seed: 11,
            depth: 2,
            inject_failure: true,
        })
        .unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn thm62_small_run_passes() {
        let report = check_thm62(&CheckConfig {
            trials: 6,
            seed: 5,
            depth: 2,
            inject_failure: false,
        })
        .unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn thm62_injection_fails() {
        let report = check_thm62(&CheckConfig {
            trials: 2,
            seed: 5,
            depth: 2,
            inject_failure: true,
        })
        .unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn interchange_small_run_passes() {
        let report = check_interchange(&CheckConfig {
            trials: 10,
            seed: 9,
            depth: 1,
            inject_failure: false,
        })
        .unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.trials > 0);
    }

    #[test]
    fn interchange_injection_fails() {
        let report = check_interchange(&CheckConfig {
            trials: 3,
            seed: 9,
            depth: 1,
            inject_failure: true,
        })
        .unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn reports_reproducible() {
        let cfg = CheckConfig {
            trials: 5,
            seed: 123,
            depth: 2,
            inject_failure: false,
        };
        let normalize = |mut r: CheckReport| {
            r.wall_ms = 0;
            serde_json::to_string(&r).unwrap()
        };
        assert_eq!(
            normalize(check_thm54(&cfg).unwrap()),
            normalize(check_thm54(&cfg).unwrap())
        );
    }
}
