//! Wire formats. JSON is the only input format; every top-level
//! document the tool emits carries `"format_version": "1"`. Graphs and
//! homs embedded inside larger documents do not repeat the field.

use crate::canon::certificate_hex;
use crate::cospan::{CospanMorphism, StructuredCospan};
use crate::double::{CospanGrammar, CospanRule, Square};
use crate::dpo::{DerivationStep, Grammar, Rule, Trace};
use crate::error::Error;
use crate::graph::{Edge, Graph, GraphHom, Typing};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const FORMAT_VERSION: &str = "1";

fn default_version() -> String {
    FORMAT_VERSION.to_string()
}

fn check_version(v: &str) -> Result<(), Error> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "unrecognized format_version {v:?} (expected {FORMAT_VERSION:?})"
        )))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypingDoc {
    pub type_graph: String,
    pub node_types: BTreeMap<String, String>,
    pub edge_types: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(default = "default_version", skip_serializing_if = "is_embedded")]
    pub format_version: String,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub typing: Option<TypingDoc>,
}

// embedded graphs leave the version to the enclosing document
fn is_embedded(v: &str) -> bool {
    v == "embedded"
}

impl GraphDoc {
    pub fn from_graph(g: &Graph) -> GraphDoc {
        GraphDoc {
            format_version: default_version(),
            nodes: g.nodes.iter().cloned().collect(),
            edges: g
                .edges
                .iter()
                .map(|(id, e)| EdgeDoc {
                    id: id.clone(),
                    src: e.src.clone(),
                    tgt: e.tgt.clone(),
                })
                .collect(),
            typing: g.typing.as_ref().map(|t| TypingDoc {
                type_graph: t.type_graph.clone(),
                node_types: t.node_types.clone(),
                edge_types: t.edge_types.clone(),
            }),
        }
    }

    pub fn embedded(g: &Graph) -> GraphDoc {
        let mut doc = GraphDoc::from_graph(g);
        doc.format_version = "embedded".into();
        doc
    }

    pub fn into_graph(self) -> Result<Graph, Error> {
        if self.format_version != "embedded" {
            check_version(&self.format_version)?;
        }
        let mut nodes = BTreeSet::new();
        for n in self.nodes {
            if !nodes.insert(n.clone()) {
                return Err(Error::Malformed(format!("duplicate node id {n}")));
            }
        }
        let mut edges = BTreeMap::new();
        for e in self.edges {
            if edges
                .insert(
                    e.id.clone(),
                    Edge {
                        src: e.src,
                        tgt: e.tgt,
                    },
                )
                .is_some()
            {
                return Err(Error::Malformed(format!("duplicate edge id {}", e.id)));
            }
        }
        Ok(Graph {
            nodes,
            edges,
            typing: self.typing.map(|t| Typing {
                type_graph: t.type_graph,
                node_types: t.node_types,
                edge_types: t.edge_types,
            }),
        })
    }
}

/// Maps-only hom document; source and target come from context.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomDoc {
    pub nodes: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

impl HomDoc {
    pub fn from_hom(h: &GraphHom) -> HomDoc {
        HomDoc {
            nodes: h.node_map.clone(),
            edges: h.edge_map.clone(),
        }
    }

    pub fn into_hom(self, source: &Graph, target: &Graph) -> Result<GraphHom, Error> {
        let hom = GraphHom {
            source: source.clone(),
            target: target.clone(),
            node_map: self.nodes,
            edge_map: self.edges,
        };
        let report = hom.validate();
        if !report.is_valid() {
            return Err(Error::Malformed(format!("invalid hom: {report}")));
        }
        Ok(hom)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleDoc {
    #[serde(default = "default_version", skip_serializing_if = "is_embedded")]
    pub format_version: String,
    pub name: String,
    pub left: GraphDoc,
    pub interface: GraphDoc,
    pub right: GraphDoc,
    pub to_left: HomDoc,
    pub to_right: HomDoc,
}

impl RuleDoc {
    pub fn from_rule(r: &Rule) -> RuleDoc {
        RuleDoc {
            format_version: default_version(),
            name: r.name.clone(),
            left: GraphDoc::embedded(&r.left),
            interface: GraphDoc::embedded(&r.interface),
            right: GraphDoc::embedded(&r.right),
            to_left: HomDoc::from_hom(&r.to_left),
            to_right: HomDoc::from_hom(&r.to_right),
        }
    }

    pub fn embedded(r: &Rule) -> RuleDoc {
        let mut doc = RuleDoc::from_rule(r);
        doc.format_version = "embedded".into();
        doc
    }

    pub fn into_rule(self) -> Result<Rule, Error> {
        if self.format_version != "embedded" {
            check_version(&self.format_version)?;
        }
        let left = self.left.into_graph()?;
        let interface = self.interface.into_graph()?;
        let right = self.right.into_graph()?;
        Rule::new(
            self.name,
            self.to_left.into_hom(&interface, &left)?,
            self.to_right.into_hom(&interface, &right)?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrammarDoc {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub rules: Vec<RuleDoc>,
}

impl GrammarDoc {
    pub fn from_grammar(g: &Grammar) -> GrammarDoc {
        GrammarDoc {
            format_version: default_version(),
            rules: g.rules.iter().map(RuleDoc::embedded).collect(),
        }
    }

    pub fn into_grammar(self) -> Result<Grammar, Error> {
        check_version(&self.format_version)?;
        Grammar::new(
            self.rules
                .into_iter()
                .map(RuleDoc::into_rule)
                .collect::<Result<Vec<_>, _>>()?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CospanDoc {
    #[serde(default = "default_version", skip_serializing_if = "is_embedded")]
    pub format_version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub apex: GraphDoc,
    pub input_map: BTreeMap<String, String>,
    pub output_map: BTreeMap<String, String>,
}

impl CospanDoc {
    pub fn from_cospan(c: &StructuredCospan) -> CospanDoc {
        CospanDoc {
            format_version: default_version(),
            inputs: c.inputs.iter().cloned().collect(),
            outputs: c.outputs.iter().cloned().collect(),
            apex: GraphDoc::embedded(&c.apex),
            input_map: c.input_map.clone(),
            output_map: c.output_map.clone(),
        }
    }

    pub fn embedded(c: &StructuredCospan) -> CospanDoc {
        let mut doc = CospanDoc::from_cospan(c);
        doc.format_version = "embedded".into();
        doc
    }

    pub fn into_cospan(self) -> Result<StructuredCospan, Error> {
        if self.format_version != "embedded" {
            check_version(&self.format_version)?;
        }
        let cospan = StructuredCospan {
            inputs: self.inputs.into_iter().collect(),
            outputs: self.outputs.into_iter().collect(),
            apex: self.apex.into_graph()?,
            input_map: self.input_map,
            output_map: self.output_map,
        };
        let report = cospan.validate();
        if !report.is_valid() {
            return Err(Error::Malformed(format!("invalid cospan: {report}")));
        }
        Ok(cospan)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerticalDoc {
    pub f: BTreeMap<String, String>,
    pub g: HomDoc,
    pub h: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CospanRuleDoc {
    #[serde(default = "default_version", skip_serializing_if = "is_embedded")]
    pub format_version: String,
    pub name: String,
    pub top: CospanDoc,
    pub middle: CospanDoc,
    pub bottom: CospanDoc,
    pub up: VerticalDoc,
    pub down: VerticalDoc,
}

impl CospanRuleDoc {
    pub fn from_rule(r: &CospanRule) -> CospanRuleDoc {
        let s = &r.square;
        CospanRuleDoc {
            format_version: default_version(),
            name: r.name.clone(),
            top: CospanDoc::embedded(&s.top),
            middle: CospanDoc::embedded(&s.middle),
            bottom: CospanDoc::embedded(&s.bottom),
            up: VerticalDoc {
                f: s.up.inputs.clone(),
                g: HomDoc::from_hom(&s.up.apex),
                h: s.up.outputs.clone(),
            },
            down: VerticalDoc {
                f: s.down.inputs.clone(),
                g: HomDoc::from_hom(&s.down.apex),
                h: s.down.outputs.clone(),
            },
        }
    }

    pub fn embedded(r: &CospanRule) -> CospanRuleDoc {
        let mut doc = CospanRuleDoc::from_rule(r);
        doc.format_version = "embedded".into();
        doc
    }

    pub fn into_rule(self) -> Result<CospanRule, Error> {
        if self.format_version != "embedded" {
            check_version(&self.format_version)?;
        }
        let top = self.top.into_cospan()?;
        let middle = self.middle.into_cospan()?;
        let bottom = self.bottom.into_cospan()?;
        let square = Square {
            up: CospanMorphism {
                source: middle.clone(),
                target: top.clone(),
                inputs: self.up.f,
                apex: self.up.g.into_hom(&middle.apex, &top.apex)?,
                outputs: self.up.h,
            },
            down: CospanMorphism {
                source: middle.clone(),
                target: bottom.clone(),
                inputs: self.down.f,
                apex: self.down.g.into_hom(&middle.apex, &bottom.apex)?,
                outputs: self.down.h,
            },
            top,
            middle,
            bottom,
        };
        let report = crate::double::validate_cospan_rule(&square);
        if !report.is_valid() {
            return Err(Error::Malformed(format!("invalid cospan rule: {report}")));
        }
        Ok(CospanRule {
            name: self.name,
            square,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CospanGrammarDoc {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub rules: Vec<CospanRuleDoc>,
}

impl CospanGrammarDoc {
    pub fn from_grammar(g: &CospanGrammar) -> CospanGrammarDoc {
        CospanGrammarDoc {
            format_version: default_version(),
            rules: g.rules.iter().map(CospanRuleDoc::embedded).collect(),
        }
    }

    pub fn into_grammar(self) -> Result<CospanGrammar, Error> {
        check_version(&self.format_version)?;
        CospanGrammar::new(
            self.rules
                .into_iter()
                .map(CospanRuleDoc::into_rule)
                .collect::<Result<Vec<_>, _>>()?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDoc {
    pub rule: String,
    #[serde(rename = "match")]
    pub matching: HomDoc,
    pub complement: GraphDoc,
    pub result: GraphDoc,
    pub derived_to_left: HomDoc,
    pub derived_to_right: HomDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDoc {
    #[serde(default = "default_version")]
    pub format_version: String,
    pub start: GraphDoc,
    pub steps: Vec<StepDoc>,
    pub start_canonical: String,
    pub end_canonical: String,
}

impl TraceDoc {
    pub fn from_trace(start: &Graph, trace: &Trace) -> TraceDoc {
        TraceDoc {
            format_version: default_version(),
            start: GraphDoc::embedded(start),
            steps: trace
                .steps
                .iter()
                .map(|s| StepDoc {
                    rule: s.rule_name.clone(),
                    matching: HomDoc::from_hom(&s.matching),
                    complement: GraphDoc::embedded(&s.complement),
                    result: GraphDoc::embedded(&s.result),
                    derived_to_left: HomDoc::from_hom(&s.derived_to_left),
                    derived_to_right: HomDoc::from_hom(&s.derived_to_right),
                })
                .collect(),
            start_canonical: certificate_hex(&trace.start_canonical),
            end_canonical: certificate_hex(&trace.end_canonical),
        }
    }

    /// Rebuild a trace; the grammar supplies each step's rule so the
    /// match homs get their sources back.
    pub fn into_trace(self, grammar: &Grammar) -> Result<(Graph, Trace), Error> {
        check_version(&self.format_version)?;
        let start = self.start.into_graph()?;
        let mut steps = Vec::new();
        let mut current = start.clone();
        for doc in self.steps {
            let rule = grammar
                .rule(&doc.rule)
                .ok_or_else(|| Error::Malformed(format!("unknown rule {}", doc.rule)))?;
            let complement = doc.complement.into_graph()?;
            let result = doc.result.into_graph()?;
            let step = DerivationStep {
                rule_name: doc.rule,
                matching: doc.matching.into_hom(&rule.left, &current)?,
                derived_to_left: doc.derived_to_left.into_hom(&complement, &current)?,
                derived_to_right: doc.derived_to_right.into_hom(&complement, &result)?,
                complement,
                result: result.clone(),
            };
            current = result;
            steps.push(step);
        }
        let trace = Trace {
            steps,
            start_canonical: crate::canon::canonical_form(&start),
            end_canonical: crate::canon::canonical_form(&current),
        };
        Ok((start, trace))
    }
}

/// Payload kinds recognized by schema autodetection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    Graph,
    Rule,
    Grammar,
    Cospan,
    CospanRule,
    CospanGrammar,
    Trace,
}

/// Detect the payload kind of a JSON document from its fields.
pub fn detect_kind(value: &serde_json::Value) -> Result<PayloadKind, Error> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Malformed("expected a JSON object".into()))?;
    let has = |k: &str| obj.contains_key(k);
    if has("steps") && has("start") {
        Ok(PayloadKind::Trace)
    } else if has("rules") {
        let rules = obj.get("rules").and_then(|r| r.as_array());
        let cospan_rule = rules
            .and_then(|r| r.first())
            .map(|r| r.get("top").is_some())
            .unwrap_or(false);
        Ok(if cospan_rule {
            PayloadKind::CospanGrammar
        } else {
            PayloadKind::Grammar
        })
    } else if has("top") && has("middle") && has("bottom") {
        Ok(PayloadKind::CospanRule)
    } else if has("left") && has("interface") && has("right") {
        Ok(PayloadKind::Rule)
    } else if has("apex") && has("inputs") {
        Ok(PayloadKind::Cospan)
    } else if has("nodes") && has("edges") {
        Ok(PayloadKind::Graph)
    } else {
        Err(Error::Malformed(
            "unrecognized document shape (no graph/rule/grammar/cospan fields)".into(),
        ))
    }
}

/// Parse with position-reported syntax errors.
pub fn parse_value(text: &str) -> Result<serde_json::Value, Error> {
    serde_json::from_str(text).map_err(|e| {
        Error::Malformed(format!(
            "JSON syntax error at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

pub fn from_value<T: for<'de> Deserialize<'de>>(value: serde_json::Value) -> Result<T, Error> {
    serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))
}

/// Stable pretty rendering with a trailing newline. Values are routed
/// through `serde_json::Value` so keys come out sorted and parse-print
/// is the identity on everything the tool emits.
pub fn to_json_string<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values render");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::{g3, loop_grammar, loop_rule};

    #[test]
    fn graph_round_trip() {
        let g = g3();
        let text = to_json_string(&GraphDoc::from_graph(&g));
        let value = parse_value(&text).unwrap();
        assert_eq!(detect_kind(&value).unwrap(), PayloadKind::Graph);
        let back: GraphDoc = from_value(value).unwrap();
        assert_eq!(back.into_graph().unwrap(), g);
        // parse-print identity on emitted text
        let reparsed: GraphDoc = from_value(parse_value(&text).unwrap()).unwrap();
        assert_eq!(to_json_string(&reparsed), text);
    }

    #[test]
    fn rule_and_grammar_round_trip() {
        let text = to_json_string(&GrammarDoc::from_grammar(&loop_grammar()));
        let back: GrammarDoc = from_value(parse_value(&text).unwrap()).unwrap();
        let grammar = back.into_grammar().unwrap();
        assert_eq!(grammar.rules.len(), 1);
        assert_eq!(grammar.rules[0], loop_rule());
    }

    #[test]
    fn version_is_checked() {
        let text = r#"{"format_version":"99","nodes":[],"edges":[]}"#;
        let doc: GraphDoc = from_value(parse_value(text).unwrap()).unwrap();
        assert!(matches!(doc.into_graph(), Err(Error::Malformed(_))));
    }

    #[test]
    fn version_defaults_when_absent() {
        let text = r#"{"nodes":["a"],"edges":[]}"#;
        let doc: GraphDoc = from_value(parse_value(text).unwrap()).unwrap();
        assert!(doc.into_graph().is_ok());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_value("{\"nodes\": [,]}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = r#"{"nodes":["a","a"],"edges":[]}"#;
        let doc: GraphDoc = from_value(parse_value(text).unwrap()).unwrap();
        assert!(matches!(doc.into_graph(), Err(Error::Malformed(_))));
    }

    #[test]
    fn trace_round_trip() {
        use crate::dpo::{apply_rule, find_matches, Trace};
        let rule = loop_rule();
        let m = &find_matches(&rule, &g3(), true).unwrap()[0].matching;
        let step = apply_rule(&rule, &g3(), m).unwrap();
        let trace = Trace {
            start_canonical: crate::canon::canonical_form(&g3()),
            end_canonical: crate::canon::canonical_form(&step.result),
            steps: vec![step],
        };
        let doc = TraceDoc::from_trace(&g3(), &trace);
        let text = to_json_string(&doc);
        let back: TraceDoc = from_value(parse_value(&text).unwrap()).unwrap();
        let (start, rebuilt) = back.into_trace(&loop_grammar()).unwrap();
        assert_eq!(start, g3());
        assert_eq!(rebuilt.steps.len(), 1);
        assert_eq!(rebuilt.steps[0].result, trace.steps[0].result);
    }

    #[test]
    fn cospan_rule_round_trip() {
        use crate::double::fixtures::loop_cospan_rule;
        let rule = loop_cospan_rule();
        let text = to_json_string(&CospanRuleDoc::from_rule(&rule));
        let value = parse_value(&text).unwrap();
        assert_eq!(detect_kind(&value).unwrap(), PayloadKind::CospanRule);
        let back: CospanRuleDoc = from_value(value).unwrap();
        assert_eq!(back.into_rule().unwrap(), rule);
    }
}
