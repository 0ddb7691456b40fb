//! Double-pushout rewriting: rules, grammars, match finding, rule
//! application, derived rules, and bounded reachability search.

use crate::canon::canonical_form;
use crate::colimit::{gluing_check, pushout, pushout_complement, GluingReport, Span};
use crate::error::Error;
use crate::graph::{enumerate_homs, Graph, GraphHom, ValidationReport};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// A rewrite rule: a span `left <- interface -> right` with monic legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub left: Graph,
    pub interface: Graph,
    pub right: Graph,
    pub to_left: GraphHom,
    pub to_right: GraphHom,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        to_left: GraphHom,
        to_right: GraphHom,
    ) -> Result<Rule, Error> {
        let rule = Rule {
            name: name.into(),
            left: to_left.target.clone(),
            interface: to_left.source.clone(),
            right: to_right.target.clone(),
            to_left,
            to_right,
        };
        let report = rule.validate();
        if !report.is_valid() {
            return Err(Error::Invalid(report.to_string()));
        }
        Ok(rule)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.to_left.source != self.interface || self.to_right.source != self.interface {
            report
                .violations
                .push(format!("rule {}: legs do not share the interface", self.name));
        }
        if self.to_left.target != self.left {
            report
                .violations
                .push(format!("rule {}: left leg target mismatch", self.name));
        }
        if self.to_right.target != self.right {
            report
                .violations
                .push(format!("rule {}: right leg target mismatch", self.name));
        }
        for v in self.to_left.validate().violations {
            report.violations.push(format!("rule {}: left leg: {v}", self.name));
        }
        for v in self.to_right.validate().violations {
            report.violations.push(format!("rule {}: right leg: {v}", self.name));
        }
        if report.is_valid() {
            if !self.to_left.classify().is_mono {
                report
                    .violations
                    .push(format!("rule {}: left leg not monic", self.name));
            }
            if !self.to_right.classify().is_mono {
                report
                    .violations
                    .push(format!("rule {}: right leg not monic", self.name));
            }
        }
        report
    }

    /// An identity rule on a graph: nothing is deleted or added.
    pub fn identity(name: impl Into<String>, g: &Graph) -> Rule {
        Rule {
            name: name.into(),
            left: g.clone(),
            interface: g.clone(),
            right: g.clone(),
            to_left: GraphHom::identity(g),
            to_right: GraphHom::identity(g),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grammar {
    pub rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(rules: Vec<Rule>) -> Result<Grammar, Error> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name.clone()) {
                return Err(Error::Invalid(format!("duplicate rule name {}", r.name)));
            }
            let report = r.validate();
            if !report.is_valid() {
                return Err(Error::Invalid(report.to_string()));
            }
        }
        Ok(Grammar { rules })
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Rules in name order; search iterates them this way so traces are
    /// reproducible regardless of file order.
    pub fn rules_by_name(&self) -> Vec<&Rule> {
        let mut rs: Vec<&Rule> = self.rules.iter().collect();
        rs.sort_by(|a, b| a.name.cmp(&b.name));
        rs
    }
}

/// A candidate match annotated with its gluing report.
#[derive(Debug, Clone)]
pub struct MatchCandidate {
    pub matching: GraphHom,
    pub applicable: bool,
    pub gluing: GluingReport,
}

/// All homs from the rule's left side into `g`, monos only when flagged,
/// each annotated with applicability.
pub fn find_matches(rule: &Rule, g: &Graph, mono_only: bool) -> Result<Vec<MatchCandidate>, Error> {
    enumerate_homs(&rule.left, g, mono_only)
        .into_iter()
        .map(|m| {
            let gluing = gluing_check(&rule.to_left, &m)?;
            Ok(MatchCandidate {
                applicable: gluing.ok(),
                gluing,
                matching: m,
            })
        })
        .collect()
}

/// One application of a rule: complement, result, and the derived rule
/// `g <- k' -> h` that the step begets.
#[derive(Debug, Clone)]
pub struct DerivationStep {
    pub rule_name: String,
    pub matching: GraphHom,
    pub complement: Graph,
    pub result: Graph,
    /// derived rule left leg `k' -> g`
    pub derived_to_left: GraphHom,
    /// derived rule right leg `k' -> h`
    pub derived_to_right: GraphHom,
}

impl DerivationStep {
    pub fn start(&self) -> &Graph {
        &self.derived_to_left.target
    }

    /// The derived rule as a rule value; both pushout squares guarantee
    /// monic legs.
    pub fn derived_rule(&self) -> Result<Rule, Error> {
        Rule::new(
            format!("{}-derived", self.rule_name),
            self.derived_to_left.clone(),
            self.derived_to_right.clone(),
        )
    }
}

/// Apply `rule` to `g` at `matching` by pushout complement then pushout.
pub fn apply_rule(rule: &Rule, g: &Graph, matching: &GraphHom) -> Result<DerivationStep, Error> {
    if matching.source != rule.left || &matching.target != g || !matching.is_valid() {
        return Err(Error::BadMatch);
    }
    let complement = pushout_complement(&rule.to_left, matching)?;
    let po = pushout(&Span {
        apex: rule.interface.clone(),
        left: complement.to_complement.clone(),
        right: rule.to_right.clone(),
    })?;
    let step = DerivationStep {
        rule_name: rule.name.clone(),
        matching: matching.clone(),
        complement: complement.complement,
        result: po.object,
        derived_to_left: complement.inclusion,
        derived_to_right: po.inj_left,
    };
    debug_assert!(step.derived_to_left.classify().is_mono);
    debug_assert!(step.derived_to_right.classify().is_mono);
    Ok(step)
}

/// A chain of derivation steps from a start graph.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub steps: Vec<DerivationStep>,
    pub start_canonical: Vec<u8>,
    pub end_canonical: Vec<u8>,
}

impl Trace {
    pub fn reflexive(g: &Graph) -> Trace {
        let cert = canonical_form(g);
        Trace {
            steps: Vec::new(),
            start_canonical: cert.clone(),
            end_canonical: cert,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for w in self.steps.windows(2) {
            if w[0].result != *w[1].start() {
                report.violations.push(format!(
                    "step after {} does not start at the previous result",
                    w[0].rule_name
                ));
            }
        }
        report
    }
}

/// Search bounds for the rewrite-relation closure.
#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub max_depth: usize,
    /// cap on node count of intermediate graphs
    pub max_size: usize,
}

/// Bounded reflexive-transitive closure of one-step derivability,
/// deduplicated by canonical form. `complete` is false when the bounds
/// cut anything off.
#[derive(Debug, Clone)]
pub struct Closure {
    /// canonical form -> shortest trace reaching it
    pub classes: BTreeMap<Vec<u8>, Trace>,
    pub complete: bool,
}

impl Closure {
    pub fn contains(&self, g: &Graph) -> bool {
        self.classes.contains_key(&canonical_form(g))
    }
}

/// BFS over rule applications from `g`, mono matches only when flagged.
/// Reflexive: `g` itself is in the closure at depth zero. Shortest
/// traces are retained, with ties broken by rule-name order then match
/// order.
pub fn derive_closure(
    grammar: &Grammar,
    g: &Graph,
    bounds: SearchBounds,
    mono_only: bool,
) -> Result<Closure, Error> {
    let mut classes: BTreeMap<Vec<u8>, Trace> = BTreeMap::new();
    let mut complete = true;

    let start_cert = canonical_form(g);
    classes.insert(start_cert.clone(), Trace::reflexive(g));
    let mut frontier: VecDeque<(Graph, Vec<DerivationStep>)> = VecDeque::new();
    frontier.push_back((g.clone(), Vec::new()));

    for depth in 0..bounds.max_depth {
        let mut next: VecDeque<(Graph, Vec<DerivationStep>)> = VecDeque::new();
        while let Some((current, steps)) = frontier.pop_front() {
            for rule in grammar.rules_by_name() {
                for cand in find_matches(rule, &current, mono_only)? {
                    if !cand.applicable {
                        continue;
                    }
                    let step = apply_rule(rule, &current, &cand.matching)?;
                    if step.result.node_count() > bounds.max_size {
                        complete = false;
                        continue;
                    }
                    let cert = canonical_form(&step.result);
                    if classes.contains_key(&cert) {
                        continue;
                    }
                    let mut trace_steps = steps.clone();
                    trace_steps.push(step.clone());
                    classes.insert(
                        cert,
                        Trace {
                            steps: trace_steps.clone(),
                            start_canonical: start_cert.clone(),
                            end_canonical: canonical_form(&step.result),
                        },
                    );
                    next.push_back((step.result, trace_steps));
                }
            }
        }
        if depth + 1 == bounds.max_depth && !next.is_empty() {
            // depth bound hit with work left: closure may be partial
            complete = false;
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(Closure { classes, complete })
}

/// Outcome of a reachability query. `definitive` distinguishes a proven
/// "no" (the closure was exhausted within bounds) from bound exhaustion.
#[derive(Debug, Clone)]
pub enum Reachability {
    Found(Box<Trace>),
    NotReached { definitive: bool },
}

pub fn reachable(
    grammar: &Grammar,
    from: &Graph,
    to: &Graph,
    bounds: SearchBounds,
    mono_only: bool,
) -> Result<Reachability, Error> {
    let closure = derive_closure(grammar, from, bounds, mono_only)?;
    match closure.classes.get(&canonical_form(to)) {
        Some(trace) => Ok(Reachability::Found(Box::new(trace.clone()))),
        None => Ok(Reachability::NotReached {
            definitive: closure.complete,
        }),
    }
}

/// The worked loop-removal example used throughout the test suites: a
/// three-node host graph with one loop, and the rule that removes a
/// loop while keeping its node.
pub mod fixtures {
    use super::*;
    use std::collections::BTreeMap;

    pub fn pt() -> Graph {
        Graph::from_parts(["u"], Vec::<(&str, &str, &str)>::new())
    }

    pub fn loop1() -> Graph {
        Graph::from_parts(["u"], [("loop", "u", "u")])
    }

    pub fn g3() -> Graph {
        Graph::from_parts(
            ["a", "b", "c"],
            [("e1", "a", "c"), ("e2", "b", "c"), ("e3", "c", "c")],
        )
    }

    pub fn h3() -> Graph {
        Graph::from_parts(["a", "b", "c"], [("e1", "a", "c"), ("e2", "b", "c")])
    }

    /// The loop-removal rule: a node with a loop rewrites to the bare
    /// node.
    pub fn loop_rule() -> Rule {
        Rule::new(
            "drop-loop",
            GraphHom {
                source: pt(),
                target: loop1(),
                node_map: [("u".into(), "u".into())].into(),
                edge_map: BTreeMap::new(),
            },
            GraphHom::identity(&pt()),
        )
        .unwrap()
    }

    pub fn loop_grammar() -> Grammar {
        Grammar::new(vec![loop_rule()]).unwrap()
    }

    pub fn two_loops() -> Graph {
        Graph::from_parts(["p", "q"], [("lp", "p", "p"), ("lq", "q", "q")])
    }
}
