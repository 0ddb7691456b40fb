//! Deterministic DOT rendering of graphs, open graphs, and traces.
//! Cospans render as clustered subgraphs (feet boxes beside the apex
//! box); traces as a sequence of clusters, one per step.

use crate::cospan::StructuredCospan;
use crate::dpo::Trace;
use crate::graph::Graph;
use std::fmt::Write;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn write_graph_body(out: &mut String, g: &Graph, prefix: &str, indent: &str) {
    for n in &g.nodes {
        let label = match g.node_type(n) {
            Some(t) => format!("{n}:{t}"),
            None => n.clone(),
        };
        let _ = writeln!(
            out,
            "{indent}{} [label={}];",
            quote(&format!("{prefix}{n}")),
            quote(&label)
        );
    }
    for (id, e) in &g.edges {
        let label = match g.edge_type(id) {
            Some(t) => format!("{id}:{t}"),
            None => id.clone(),
        };
        let _ = writeln!(
            out,
            "{indent}{} -> {} [label={}];",
            quote(&format!("{prefix}{}", e.src)),
            quote(&format!("{prefix}{}", e.tgt)),
            quote(&label)
        );
    }
}

pub fn graph_to_dot(g: &Graph) -> String {
    let mut out = String::from("digraph g {\n");
    write_graph_body(&mut out, g, "", "  ");
    out.push_str("}\n");
    out
}

pub fn cospan_to_dot(c: &StructuredCospan) -> String {
    let mut out = String::from("digraph cospan {\n  rankdir=LR;\n");
    out.push_str("  subgraph cluster_inputs {\n    label=\"inputs\";\n    style=rounded;\n");
    for i in &c.inputs {
        let _ = writeln!(out, "    {} [shape=box];", quote(&format!("in:{i}")));
    }
    out.push_str("  }\n");
    out.push_str("  subgraph cluster_apex {\n    label=\"apex\";\n    style=rounded;\n");
    write_graph_body(&mut out, &c.apex, "apex:", "    ");
    out.push_str("  }\n");
    out.push_str("  subgraph cluster_outputs {\n    label=\"outputs\";\n    style=rounded;\n");
    for o in &c.outputs {
        let _ = writeln!(out, "    {} [shape=box];", quote(&format!("out:{o}")));
    }
    out.push_str("  }\n");
    for (i, n) in &c.input_map {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed];",
            quote(&format!("in:{i}")),
            quote(&format!("apex:{n}"))
        );
    }
    for (o, n) in &c.output_map {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed];",
            quote(&format!("out:{o}")),
            quote(&format!("apex:{n}"))
        );
    }
    out.push_str("}\n");
    out
}

pub fn trace_to_dot(start: &Graph, trace: &Trace) -> String {
    let steps: Vec<(String, Graph)> = trace
        .steps
        .iter()
        .map(|s| (s.rule_name.clone(), s.result.clone()))
        .collect();
    step_sequence_to_dot(start, &steps)
}

/// Render a start graph and a sequence of named results as clusters.
pub fn step_sequence_to_dot(start: &Graph, steps: &[(String, Graph)]) -> String {
    let mut out = String::from("digraph trace {\n  rankdir=LR;\n");
    let mut emit = |idx: usize, label: &str, g: &Graph| {
        let _ = writeln!(out, "  subgraph cluster_{idx} {{");
        let _ = writeln!(out, "    label={};", quote(label));
        out.push_str("    style=rounded;\n");
        write_graph_body(&mut out, g, &format!("s{idx}:"), "    ");
        out.push_str("  }\n");
    };
    emit(0, "start", start);
    for (i, (rule, result)) in steps.iter().enumerate() {
        emit(i + 1, &format!("after {rule}"), result);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::{g3, loop_grammar};
    use crate::dpo::{derive_closure, SearchBounds};

    #[test]
    fn graph_dot_has_nodes_and_edges() {
        let dot = graph_to_dot(&g3());
        assert_eq!(dot.matches("label=").count(), 6); // 3 nodes + 3 edges
        assert!(dot.starts_with("digraph g {"));
    }

    #[test]
    fn cospan_dot_has_three_clusters() {
        use crate::cospan::StructuredCospan;
        let c = StructuredCospan::identity(["x".to_string()]);
        let dot = cospan_to_dot(&c);
        assert_eq!(dot.matches("subgraph cluster_").count(), 3);
    }

    #[test]
    fn dot_is_deterministic() {
        assert_eq!(graph_to_dot(&g3()), graph_to_dot(&g3()));
        let closure = derive_closure(
            &loop_grammar(),
            &g3(),
            SearchBounds {
                max_depth: 1,
                max_size: 8,
            },
            true,
        )
        .unwrap();
        let trace = closure.classes.values().last().unwrap();
        assert_eq!(trace_to_dot(&g3(), trace), trace_to_dot(&g3(), trace));
        assert!(trace_to_dot(&g3(), trace).contains("after drop-loop"));
    }
}
