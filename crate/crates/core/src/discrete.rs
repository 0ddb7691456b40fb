//! The discrete comonad on graphs, discrete grammars, the meet-based
//! complement construction, and the grammar of decomposition squares.

use crate::colimit::{certify_pushout_square, Span};
use crate::cospan::{CospanMorphism, StructuredCospan};
use crate::double::{validate_cospan_rule, CospanGrammar, CospanRule, Square};
use crate::dpo::{Grammar, Rule};
use crate::error::Error;
use crate::graph::{
    compose_homs, lattice_join, lattice_meet, Graph, GraphHom, Subgraph, Typing,
};
use std::collections::{BTreeMap, BTreeSet};

/// The discrete graph underlying a graph, with its monic counit.
#[derive(Debug, Clone)]
pub struct FlatResult {
    pub flat: Graph,
    /// node-identity inclusion `flat -> input`
    pub counit: GraphHom,
}

/// Drop all edges, keep the nodes: the comonad induced by the discrete
/// graph adjunction.
pub fn flatten(g: &Graph) -> FlatResult {
    let flat = Graph {
        nodes: g.nodes.clone(),
        edges: BTreeMap::new(),
        typing: g.typing.as_ref().map(|t| Typing {
            type_graph: t.type_graph.clone(),
            node_types: t.node_types.clone(),
            edge_types: BTreeMap::new(),
        }),
    };
    let counit = GraphHom {
        source: flat.clone(),
        target: g.clone(),
        node_map: g.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
        edge_map: BTreeMap::new(),
    };
    FlatResult { flat, counit }
}

/// Replace a rule's interface by its underlying discrete graph; the legs
/// are the original legs restricted along the counit.
pub fn discretize_rule(rule: &Rule) -> Result<Rule, Error> {
    let flat = flatten(&rule.interface);
    Rule::new(
        rule.name.clone(),
        compose_homs(&flat.counit, &rule.to_left)?,
        compose_homs(&flat.counit, &rule.to_right)?,
    )
}

/// Discretize every rule; names get a `-flat` suffix.
pub fn discretize_grammar(grammar: &Grammar) -> Result<Grammar, Error> {
    let rules = grammar
        .rules
        .iter()
        .map(|r| {
            let mut flat = discretize_rule(r)?;
            flat.name = format!("{}-flat", r.name);
            Ok(flat)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Grammar::new(rules)
}

/// The complement subgraph from the meet-based construction: all nodes
/// of the ambient graph, every edge outside the interface image. The
/// defining identities `w v k = d`, `w ^ k = flat k` and the pushout
/// square over `flat k` are certified on every call.
pub fn w_complement(k_img: &Subgraph) -> Result<Subgraph, Error> {
    let d = &k_img.ambient;
    let w = Subgraph {
        ambient: d.clone(),
        nodes: d.nodes.clone(),
        edges: d
            .edges
            .keys()
            .filter(|e| !k_img.edges.contains(*e))
            .cloned()
            .collect(),
    };
    let flat_k = Subgraph {
        ambient: d.clone(),
        nodes: k_img.nodes.clone(),
        edges: BTreeSet::new(),
    };
    let join = lattice_join(&w, k_img)?;
    if join != Subgraph::full(d) {
        return Err(Error::CertificationFailed(
            "w v k is not the whole ambient graph".into(),
        ));
    }
    let meet = lattice_meet(&w, k_img)?;
    if meet != flat_k {
        return Err(Error::CertificationFailed(
            "w ^ k is not the discrete interface".into(),
        ));
    }
    // the square  flat k -> k, flat k -> w  over d is a pushout
    let flat_graph = flat_k.to_graph();
    let span = Span {
        apex: flat_graph.clone(),
        left: GraphHom {
            source: flat_graph.clone(),
            target: k_img.to_graph(),
            node_map: flat_k.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
            edge_map: BTreeMap::new(),
        },
        right: GraphHom {
            source: flat_graph,
            target: w.to_graph(),
            node_map: flat_k.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
            edge_map: BTreeMap::new(),
        },
    };
    if !certify_pushout_square(&span, &k_img.inclusion(), &w.inclusion())? {
        return Err(Error::CertificationFailed(
            "complement square is not a pushout".into(),
        ));
    }
    Ok(w)
}

/// Decomposition squares: for each discrete-interface rule, the cospan
/// rule with empty left feet, the rule legs vertically, and the
/// interface nodes as shared right feet.
pub fn hat_grammar(discrete: &Grammar) -> Result<CospanGrammar, Error> {
    let mut rules = Vec::new();
    for rule in &discrete.rules {
        if rule.interface.edge_count() != 0 {
            return Err(Error::NonDiscreteInterface(rule.name.clone()));
        }
        let feet: BTreeSet<String> = rule.interface.nodes.iter().cloned().collect();
        let row = |apex: &Graph, leg: &GraphHom| StructuredCospan {
            inputs: BTreeSet::new(),
            outputs: feet.clone(),
            apex: apex.clone(),
            input_map: BTreeMap::new(),
            output_map: leg.node_map.clone(),
        };
        let top = row(&rule.left, &rule.to_left);
        let middle = row(&rule.interface, &GraphHom::identity(&rule.interface));
        let bottom = row(&rule.right, &rule.to_right);
        let fo: BTreeMap<String, String> = feet.iter().map(|x| (x.clone(), x.clone())).collect();
        let square = Square {
            up: CospanMorphism {
                source: middle.clone(),
                target: top.clone(),
                inputs: BTreeMap::new(),
                apex: rule.to_left.clone(),
                outputs: fo.clone(),
            },
            down: CospanMorphism {
                source: middle.clone(),
                target: bottom.clone(),
                inputs: BTreeMap::new(),
                apex: rule.to_right.clone(),
                outputs: fo,
            },
            top,
            middle,
            bottom,
        };
        let report = validate_cospan_rule(&square);
        if !report.is_valid() {
            return Err(Error::Invalid(format!(
                "decomposition square for {}: {report}",
                rule.name
            )));
        }
        rules.push(CospanRule {
            name: format!("{}-hat", rule.name),
            square,
        });
    }
    CospanGrammar::new(rules)
}
