//! Open graphs as structured cospans: two finite interface sets mapped
//! into the nodes of an apex graph. Composition glues apexes by pushout
//! over the shared interface.

use crate::canon::canonical_form;
use crate::colimit::{pushout, Span};
use crate::error::Error;
use crate::graph::{
    compose_homs, enumerate_homs, Graph, GraphHom, NodeId, ValidationReport,
};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StructuredCospan {
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
    pub apex: Graph,
    pub input_map: BTreeMap<String, NodeId>,
    pub output_map: BTreeMap<String, NodeId>,
}

impl StructuredCospan {
    /// Identity cospan on a finite set: a discrete apex with identity
    /// interface maps.
    pub fn identity<I: IntoIterator<Item = String>>(elems: I) -> StructuredCospan {
        let set: BTreeSet<String> = elems.into_iter().collect();
        StructuredCospan {
            apex: Graph::discrete(set.iter().cloned()),
            input_map: set.iter().map(|x| (x.clone(), x.clone())).collect(),
            output_map: set.iter().map(|x| (x.clone(), x.clone())).collect(),
            inputs: set.clone(),
            outputs: set,
        }
    }

    /// A closed system: empty interfaces around the whole graph.
    pub fn closed(g: &Graph) -> StructuredCospan {
        StructuredCospan {
            inputs: BTreeSet::new(),
            outputs: BTreeSet::new(),
            apex: g.clone(),
            input_map: BTreeMap::new(),
            output_map: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.apex.validate();
        for i in &self.inputs {
            match self.input_map.get(i) {
                None => report.violations.push(format!("input {i}: unmapped")),
                Some(n) if !self.apex.nodes.contains(n) => report
                    .violations
                    .push(format!("input {i}: image {n} not an apex node")),
                _ => {}
            }
        }
        for extra in self.input_map.keys().filter(|i| !self.inputs.contains(*i)) {
            report
                .violations
                .push(format!("input map names unknown element {extra}"));
        }
        for o in &self.outputs {
            match self.output_map.get(o) {
                None => report.violations.push(format!("output {o}: unmapped")),
                Some(n) if !self.apex.nodes.contains(n) => report
                    .violations
                    .push(format!("output {o}: image {n} not an apex node")),
                _ => {}
            }
        }
        for extra in self.output_map.keys().filter(|o| !self.outputs.contains(*o)) {
            report
                .violations
                .push(format!("output map names unknown element {extra}"));
        }
        report
    }

    /// The input interface as a discrete graph together with its leg
    /// into the apex.
    pub fn input_leg(&self) -> GraphHom {
        GraphHom {
            source: Graph::discrete(self.inputs.iter().cloned()),
            target: self.apex.clone(),
            node_map: self.input_map.clone(),
            edge_map: BTreeMap::new(),
        }
    }

    pub fn output_leg(&self) -> GraphHom {
        GraphHom {
            source: Graph::discrete(self.outputs.iter().cloned()),
            target: self.apex.clone(),
            node_map: self.output_map.clone(),
            edge_map: BTreeMap::new(),
        }
    }

    /// Rename interface elements through bijections (identity where not
    /// mentioned). Used to line up boundaries before composition.
    pub fn relabel_interfaces(
        &self,
        input_names: &BTreeMap<String, String>,
        output_names: &BTreeMap<String, String>,
    ) -> StructuredCospan {
        let ren = |names: &BTreeMap<String, String>, x: &String| {
            names.get(x).unwrap_or(x).clone()
        };
        StructuredCospan {
            inputs: self.inputs.iter().map(|x| ren(input_names, x)).collect(),
            outputs: self.outputs.iter().map(|x| ren(output_names, x)).collect(),
            apex: self.apex.clone(),
            input_map: self
                .input_map
                .iter()
                .map(|(x, n)| (ren(input_names, x), n.clone()))
                .collect(),
            output_map: self
                .output_map
                .iter()
                .map(|(x, n)| (ren(output_names, x), n.clone()))
                .collect(),
        }
    }

    /// Certificate of the cospan up to apex isomorphism with interfaces
    /// fixed pointwise: the apex canonical form with each interface node
    /// pinned by a unique type tag.
    pub fn certificate(&self) -> Vec<u8> {
        canonical_form(&pin_interfaces(self))
    }
}

/// Apex graph with interface attachments encoded into node types so the
/// canonicalizer treats interface elements as fixed.
fn pin_interfaces(c: &StructuredCospan) -> Graph {
    let mut g = c.apex.clone();
    let base = g.typing.clone();
    let mut node_types: BTreeMap<String, String> = g
        .nodes
        .iter()
        .map(|n| {
            let orig = base
                .as_ref()
                .and_then(|t| t.node_types.get(n).cloned())
                .unwrap_or_default();
            (n.clone(), format!("~{orig}"))
        })
        .collect();
    for (i, n) in &c.input_map {
        let t = node_types.get_mut(n).expect("interface image is an apex node");
        t.push_str(&format!("|in:{i}"));
    }
    for (o, n) in &c.output_map {
        let t = node_types.get_mut(n).expect("interface image is an apex node");
        t.push_str(&format!("|out:{o}"));
    }
    let edge_types = g
        .edges
        .keys()
        .map(|e| {
            let orig = base
                .as_ref()
                .and_then(|t| t.edge_types.get(e).cloned())
                .unwrap_or_default();
            (e.clone(), format!("~{orig}"))
        })
        .collect();
    g.typing = Some(crate::graph::Typing {
        type_graph: format!(
            "cospan:{}",
            base.as_ref().map(|t| t.type_graph.as_str()).unwrap_or("")
        ),
        node_types,
        edge_types,
    });
    g
}

/// Compose two open graphs along a shared interface. The interfaces must
/// be equal as sets; use [`StructuredCospan::relabel_interfaces`] first
/// when they only correspond through a bijection.
pub fn compose_cospans(
    c1: &StructuredCospan,
    c2: &StructuredCospan,
) -> Result<StructuredCospan, Error> {
    if c1.outputs != c2.inputs {
        return Err(Error::InterfaceMismatch(format!(
            "outputs {:?} != inputs {:?}",
            c1.outputs, c2.inputs
        )));
    }
    let shared = Graph::discrete(c1.outputs.iter().cloned());
    let span = Span {
        apex: shared.clone(),
        left: GraphHom {
            source: shared.clone(),
            target: c1.apex.clone(),
            node_map: c1.output_map.clone(),
            edge_map: BTreeMap::new(),
        },
        right: GraphHom {
            source: shared,
            target: c2.apex.clone(),
            node_map: c2.input_map.clone(),
            edge_map: BTreeMap::new(),
        },
    };
    let p = pushout(&span)?;
    Ok(StructuredCospan {
        inputs: c1.inputs.clone(),
        outputs: c2.outputs.clone(),
        input_map: c1
            .input_map
            .iter()
            .map(|(i, n)| (i.clone(), p.inj_left.node_map[n].clone()))
            .collect(),
        output_map: c2
            .output_map
            .iter()
            .map(|(o, n)| (o.clone(), p.inj_right.node_map[n].clone()))
            .collect(),
        apex: p.object,
    })
}

/// A morphism of structured cospans: interface maps `f`, `h` and an apex
/// hom `g` making both squares commute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CospanMorphism {
    pub source: StructuredCospan,
    pub target: StructuredCospan,
    pub inputs: BTreeMap<String, String>,
    pub apex: GraphHom,
    pub outputs: BTreeMap<String, String>,
}

impl CospanMorphism {
    pub fn identity(c: &StructuredCospan) -> CospanMorphism {
        CospanMorphism {
            source: c.clone(),
            target: c.clone(),
            inputs: c.inputs.iter().map(|x| (x.clone(), x.clone())).collect(),
            apex: GraphHom::identity(&c.apex),
            outputs: c.outputs.iter().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.apex.source != self.source.apex {
            report
                .violations
                .push("apex hom source is not the source apex".into());
        }
        if self.apex.target != self.target.apex {
            report
                .violations
                .push("apex hom target is not the target apex".into());
        }
        for v in self.apex.validate().violations {
            report.violations.push(format!("apex hom: {v}"));
        }
        for i in &self.source.inputs {
            match self.inputs.get(i) {
                None => report.violations.push(format!("input {i}: unmapped")),
                Some(fi) if !self.target.inputs.contains(fi) => report
                    .violations
                    .push(format!("input {i}: image {fi} not a target input")),
                Some(fi) => {
                    let lhs = self
                        .source
                        .input_map
                        .get(i)
                        .and_then(|n| self.apex.node_map.get(n));
                    let rhs = self.target.input_map.get(fi);
                    if lhs != rhs {
                        report
                            .violations
                            .push(format!("input {i}: square does not commute"));
                    }
                }
            }
        }
        for o in &self.source.outputs {
            match self.outputs.get(o) {
                None => report.violations.push(format!("output {o}: unmapped")),
                Some(ho) if !self.target.outputs.contains(ho) => report
                    .violations
                    .push(format!("output {o}: image {ho} not a target output")),
                Some(ho) => {
                    let lhs = self
                        .source
                        .output_map
                        .get(o)
                        .and_then(|n| self.apex.node_map.get(n));
                    let rhs = self.target.output_map.get(ho);
                    if lhs != rhs {
                        report
                            .violations
                            .push(format!("output {o}: square does not commute"));
                    }
                }
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    pub fn interface_legs_bijective(&self) -> bool {
        let fi: BTreeSet<_> = self.inputs.values().collect();
        let ho: BTreeSet<_> = self.outputs.values().collect();
        self.inputs.len() == self.source.inputs.len()
            && fi.len() == self.inputs.len()
            && fi.len() == self.target.inputs.len()
            && self.outputs.len() == self.source.outputs.len()
            && ho.len() == self.outputs.len()
            && ho.len() == self.target.outputs.len()
    }
}

pub fn compose_cospan_morphisms(
    m1: &CospanMorphism,
    m2: &CospanMorphism,
) -> Result<CospanMorphism, Error> {
    if m1.target != m2.source {
        return Err(Error::EndpointMismatch);
    }
    Ok(CospanMorphism {
        source: m1.source.clone(),
        target: m2.target.clone(),
        inputs: m1
            .inputs
            .iter()
            .map(|(a, b)| (a.clone(), m2.inputs[b].clone()))
            .collect(),
        apex: compose_homs(&m1.apex, &m2.apex)?,
        outputs: m1
            .outputs
            .iter()
            .map(|(a, b)| (a.clone(), m2.outputs[b].clone()))
            .collect(),
    })
}

/// Isomorphism with interfaces fixed pointwise: same feet, and an apex
/// iso commuting with both interface maps.
pub fn cospans_isomorphic(c1: &StructuredCospan, c2: &StructuredCospan) -> bool {
    if c1.inputs != c2.inputs || c1.outputs != c2.outputs {
        return false;
    }
    c1.certificate() == c2.certificate()
}

/// Exhibit the apex iso behind [`cospans_isomorphic`], if any. The
/// interface images pin part of the node assignment, and the pinned
/// certificate decides existence before any search runs.
pub fn find_cospan_iso(c1: &StructuredCospan, c2: &StructuredCospan) -> Option<CospanMorphism> {
    if c1.inputs != c2.inputs || c1.outputs != c2.outputs {
        return None;
    }
    if c1.certificate() != c2.certificate() {
        return None;
    }
    let mut forced: BTreeMap<String, String> = BTreeMap::new();
    for (i, n) in &c1.input_map {
        let want = c2.input_map.get(i)?;
        if forced.insert(n.clone(), want.clone()).is_some_and(|prev| prev != *want) {
            return None;
        }
    }
    for (o, n) in &c1.output_map {
        let want = c2.output_map.get(o)?;
        if forced.insert(n.clone(), want.clone()).is_some_and(|prev| prev != *want) {
            return None;
        }
    }
    crate::graph::find_iso_with(&c1.apex, &c2.apex, &forced).map(|iso| CospanMorphism {
        source: c1.clone(),
        target: c2.clone(),
        inputs: c1.inputs.iter().map(|x| (x.clone(), x.clone())).collect(),
        apex: iso,
        outputs: c1.outputs.iter().map(|x| (x.clone(), x.clone())).collect(),
    })
}

/// All cospan morphisms `source -> target` (apex homs monic when
/// `mono_only`), each interface map enumerated over its commuting
/// candidates.
pub fn enumerate_cospan_morphisms(
    source: &StructuredCospan,
    target: &StructuredCospan,
    mono_only: bool,
) -> Vec<CospanMorphism> {
    let mut out = Vec::new();
    for apex in enumerate_homs(&source.apex, &target.apex, mono_only) {
        // candidates per interface element: target elements whose image
        // agrees with the apex hom
        let input_choices: Vec<(String, Vec<String>)> = source
            .inputs
            .iter()
            .map(|i| {
                let want = apex.node_map.get(&source.input_map[i]);
                let cands = target
                    .inputs
                    .iter()
                    .filter(|ti| target.input_map.get(*ti) == want)
                    .cloned()
                    .collect();
                (i.clone(), cands)
            })
            .collect();
        let output_choices: Vec<(String, Vec<String>)> = source
            .outputs
            .iter()
            .map(|o| {
                let want = apex.node_map.get(&source.output_map[o]);
                let cands = target
                    .outputs
                    .iter()
                    .filter(|to| target.output_map.get(*to) == want)
                    .cloned()
                    .collect();
                (o.clone(), cands)
            })
            .collect();
        if input_choices.iter().any(|(_, c)| c.is_empty())
            || output_choices.iter().any(|(_, c)| c.is_empty())
        {
            continue;
        }
        let mut stack: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
        for (elem, cands) in input_choices.iter().chain(output_choices.iter()) {
            let mut next = Vec::new();
            for partial in &stack {
                for c in cands {
                    let mut m = partial.clone();
                    m.insert(elem.clone(), c.clone());
                    next.push(m);
                }
            }
            stack = next;
        }
        for combined in stack {
            let inputs: BTreeMap<String, String> = source
                .inputs
                .iter()
                .map(|i| (i.clone(), combined[i].clone()))
                .collect();
            let outputs: BTreeMap<String, String> = source
                .outputs
                .iter()
                .map(|o| (o.clone(), combined[o].clone()))
                .collect();
            out.push(CospanMorphism {
                source: source.clone(),
                target: target.clone(),
                inputs,
                apex: apex.clone(),
                outputs,
            });
        }
    }
    out
}
