//! Squares of open-graph rewriting: cospan rewrite rules, their
//! horizontal and vertical composition, the interchange law, DPO
//! rewriting of structured cospans, and a bounded language closure.
//!
//! A square is a vertically stacked triple of structured cospans with
//! morphisms from the middle row up and down. Rules are the squares
//! whose apex legs are monic and whose interface legs are bijections;
//! composition preserves that shape.

use crate::canon::canonical_form;
use crate::colimit::{
    gluing_check, pullback, pushout, pushout_complement, Cospan, GluingReport, PushoutResult, Span,
};
use crate::cospan::{
    enumerate_cospan_morphisms, find_cospan_iso, CospanMorphism,
    StructuredCospan,
};
use crate::error::Error;
use crate::graph::{compose_homs, Edge, Graph, GraphHom, Typing, ValidationReport};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub top: StructuredCospan,
    pub middle: StructuredCospan,
    pub bottom: StructuredCospan,
    /// middle -> top
    pub up: CospanMorphism,
    /// middle -> bottom
    pub down: CospanMorphism,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CospanRule {
    pub name: String,
    pub square: Square,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CospanGrammar {
    pub rules: Vec<CospanRule>,
}

impl CospanGrammar {
    pub fn new(rules: Vec<CospanRule>) -> Result<CospanGrammar, Error> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name.clone()) {
                return Err(Error::Invalid(format!("duplicate rule name {}", r.name)));
            }
            let report = validate_cospan_rule(&r.square);
            if !report.is_valid() {
                return Err(Error::Invalid(format!("rule {}: {report}", r.name)));
            }
        }
        Ok(CospanGrammar { rules })
    }
}

impl Square {
    pub fn identity(c: &StructuredCospan) -> Square {
        Square {
            top: c.clone(),
            middle: c.clone(),
            bottom: c.clone(),
            up: CospanMorphism::identity(c),
            down: CospanMorphism::identity(c),
        }
    }

    /// Commutativity and well-formedness of the constituent morphisms.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.up.source != self.middle || self.up.target != self.top {
            report
                .violations
                .push("up morphism does not go middle -> top".into());
        }
        if self.down.source != self.middle || self.down.target != self.bottom {
            report
                .violations
                .push("down morphism does not go middle -> bottom".into());
        }
        for v in self.up.validate().violations {
            report.violations.push(format!("up: {v}"));
        }
        for v in self.down.validate().violations {
            report.violations.push(format!("down: {v}"));
        }
        for (label, row) in [
            ("top", &self.top),
            ("middle", &self.middle),
            ("bottom", &self.bottom),
        ] {
            for v in row.validate().violations {
                report.violations.push(format!("{label}: {v}"));
            }
        }
        report
    }

    /// Interface sets of a normalized square (all rows share them).
    pub fn input_set(&self) -> &BTreeSet<String> {
        &self.middle.inputs
    }

    pub fn output_set(&self) -> &BTreeSet<String> {
        &self.middle.outputs
    }

    /// Rename top and bottom feet through the interface bijections so
    /// both vertical legs become identities on the feet. Requires the
    /// rule shape (bijective interface legs).
    pub fn normalize(&self) -> Result<Square, Error> {
        if !self.up.interface_legs_bijective() || !self.down.interface_legs_bijective() {
            return Err(Error::Invalid(
                "square interface legs are not bijections".into(),
            ));
        }
        let invert = |m: &BTreeMap<String, String>| -> BTreeMap<String, String> {
            m.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
        };
        let top = self
            .top
            .relabel_interfaces(&invert(&self.up.inputs), &invert(&self.up.outputs));
        let bottom = self
            .bottom
            .relabel_interfaces(&invert(&self.down.inputs), &invert(&self.down.outputs));
        let middle = self.middle.clone();
        let fi: BTreeMap<String, String> =
            middle.inputs.iter().map(|x| (x.clone(), x.clone())).collect();
        let fo: BTreeMap<String, String> =
            middle.outputs.iter().map(|x| (x.clone(), x.clone())).collect();
        let square = Square {
            up: CospanMorphism {
                source: middle.clone(),
                target: top.clone(),
                inputs: fi.clone(),
                apex: self.up.apex.clone(),
                outputs: fo.clone(),
            },
            down: CospanMorphism {
                source: middle.clone(),
                target: bottom.clone(),
                inputs: fi,
                apex: self.down.apex.clone(),
                outputs: fo,
            },
            top,
            middle,
            bottom,
        };
        let report = square.validate();
        if !report.is_valid() {
            return Err(Error::Invalid(format!("normalization broke square: {report}")));
        }
        Ok(square)
    }

    /// Certificate deduplicating squares up to row isomorphisms that fix
    /// the interfaces pointwise and commute with the vertical legs. The
    /// whole square is encoded as one typed graph and canonicalized.
    pub fn certificate(&self) -> Result<Vec<u8>, Error> {
        Ok(canonical_form(&encode_square(&self.normalize()?)))
    }
}

/// Check the rule shape: commutative square, monic apex legs, bijective
/// interface legs.
pub fn validate_cospan_rule(s: &Square) -> ValidationReport {
    let mut report = s.validate();
    if report.is_valid() {
        if !s.up.apex.classify().is_mono {
            report.violations.push("up apex leg not monic".into());
        }
        if !s.down.apex.classify().is_mono {
            report.violations.push("down apex leg not monic".into());
        }
        if !s.up.interface_legs_bijective() {
            report.violations.push("up interface legs not bijective".into());
        }
        if !s.down.interface_legs_bijective() {
            report
                .violations
                .push("down interface legs not bijective".into());
        }
    }
    report
}

/// Group a row's edges into parallel classes `(src, tgt, type)`.
fn parallel_classes(g: &Graph) -> BTreeMap<(String, String, String), Vec<String>> {
    let mut classes: BTreeMap<(String, String, String), Vec<String>> = BTreeMap::new();
    for (id, e) in &g.edges {
        classes
            .entry((
                e.src.clone(),
                e.tgt.clone(),
                g.edge_type(id).unwrap_or("").to_string(),
            ))
            .or_default()
            .push(id.clone());
    }
    classes
}

fn edge_injective(h: &GraphHom) -> bool {
    let images: BTreeSet<&String> = h.edge_map.values().collect();
    images.len() == h.edge_map.len()
}

/// Encode a normalized square with edge-injective legs, collapsing each
/// parallel-edge bundle to one incidence node that carries its
/// multiplicity. Bundles aligned by the legs are interchangeable under
/// square isomorphism, so counts are a complete invariant.
fn encode_square_collapsed(s: &Square) -> Graph {
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut node_types: BTreeMap<String, String> = BTreeMap::new();
    let mut edges: BTreeMap<String, Edge> = BTreeMap::new();
    let mut edge_types: BTreeMap<String, String> = BTreeMap::new();
    let mut fresh = 0usize;
    let mut add_edge = |edges: &mut BTreeMap<String, Edge>,
                        edge_types: &mut BTreeMap<String, String>,
                        src: String,
                        tgt: String,
                        ty: String| {
        let id = format!("#{fresh}");
        fresh += 1;
        edges.insert(id.clone(), Edge { src, tgt });
        edge_types.insert(id, ty);
    };

    // class id of the bundle containing a given edge, per layer
    let mut bundle_of: BTreeMap<(String, String), String> = BTreeMap::new();
    for (layer, row) in [("t", &s.top), ("m", &s.middle), ("b", &s.bottom)] {
        for n in &row.apex.nodes {
            let id = format!("{layer}.n:{n}");
            node_types.insert(
                id.clone(),
                format!("{layer}|n|{}", row.apex.node_type(n).unwrap_or("")),
            );
            nodes.insert(id);
        }
        for ((src, tgt, ty), members) in parallel_classes(&row.apex) {
            let id = format!("{layer}.pe:{src}\u{1}{tgt}\u{1}{ty}");
            node_types.insert(id.clone(), format!("{layer}|e|{ty}|x{}", members.len()));
            nodes.insert(id.clone());
            add_edge(
                &mut edges,
                &mut edge_types,
                id.clone(),
                format!("{layer}.n:{src}"),
                "src".into(),
            );
            add_edge(
                &mut edges,
                &mut edge_types,
                id.clone(),
                format!("{layer}.n:{tgt}"),
                "tgt".into(),
            );
            for m in members {
                bundle_of.insert((layer.to_string(), m), id.clone());
            }
        }
        for (i, n) in &row.input_map {
            let foot = format!("f.i:{i}");
            node_types.insert(foot.clone(), format!("fi|{i}"));
            nodes.insert(foot.clone());
            add_edge(
                &mut edges,
                &mut edge_types,
                foot,
                format!("{layer}.n:{n}"),
                format!("{layer}|in"),
            );
        }
        for (o, n) in &row.output_map {
            let foot = format!("f.o:{o}");
            node_types.insert(foot.clone(), format!("fo|{o}"));
            nodes.insert(foot.clone());
            add_edge(
                &mut edges,
                &mut edge_types,
                foot,
                format!("{layer}.n:{n}"),
                format!("{layer}|out"),
            );
        }
    }
    for (leg, layer, hom) in [("u", "t", &s.up.apex), ("d", "b", &s.down.apex)] {
        for (x, y) in &hom.node_map {
            add_edge(
                &mut edges,
                &mut edge_types,
                format!("m.n:{x}"),
                format!("{layer}.n:{y}"),
                format!("{leg}|n"),
            );
        }
        // one hit-count edge per aligned bundle pair
        let mut hits: BTreeMap<(String, String), usize> = BTreeMap::new();
        for (x, y) in &hom.edge_map {
            let from = bundle_of[&("m".to_string(), x.clone())].clone();
            let to = bundle_of[&(layer.to_string(), y.clone())].clone();
            *hits.entry((from, to)).or_insert(0) += 1;
        }
        for ((from, to), count) in hits {
            add_edge(
                &mut edges,
                &mut edge_types,
                from,
                to,
                format!("{leg}|e|x{count}"),
            );
        }
    }
    Graph {
        nodes,
        edges,
        typing: Some(Typing {
            type_graph: format!("square:{}", s.middle.apex.type_graph_name().unwrap_or("")),
            node_types,
            edge_types,
        }),
    }
}

/// Encode a normalized square as a single typed graph: apex elements of
/// each row become nodes tagged by layer, apex edges become incidence
/// nodes, interface elements become nodes pinned by their own name, and
/// the interface maps and vertical homs become tagged edges.
fn encode_square(s: &Square) -> Graph {
    if edge_injective(&s.up.apex) && edge_injective(&s.down.apex) {
        return encode_square_collapsed(s);
    }
    encode_square_full(s)
}

fn encode_square_full(s: &Square) -> Graph {
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut node_types: BTreeMap<String, String> = BTreeMap::new();
    let mut edges: BTreeMap<String, Edge> = BTreeMap::new();
    let mut edge_types: BTreeMap<String, String> = BTreeMap::new();
    let mut fresh = 0usize;
    let mut add_edge = |edges: &mut BTreeMap<String, Edge>,
                        edge_types: &mut BTreeMap<String, String>,
                        src: String,
                        tgt: String,
                        ty: String| {
        let id = format!("#{fresh}");
        fresh += 1;
        edges.insert(id.clone(), Edge { src, tgt });
        edge_types.insert(id, ty);
    };

    for (layer, row) in [("t", &s.top), ("m", &s.middle), ("b", &s.bottom)] {
        for n in &row.apex.nodes {
            let id = format!("{layer}.n:{n}");
            node_types.insert(
                id.clone(),
                format!("{layer}|n|{}", row.apex.node_type(n).unwrap_or("")),
            );
            nodes.insert(id);
        }
        for (eid, e) in &row.apex.edges {
            let id = format!("{layer}.e:{eid}");
            node_types.insert(
                id.clone(),
                format!("{layer}|e|{}", row.apex.edge_type(eid).unwrap_or("")),
            );
            nodes.insert(id.clone());
            add_edge(
                &mut edges,
                &mut edge_types,
                id.clone(),
                format!("{layer}.n:{}", e.src),
                "src".into(),
            );
            add_edge(
                &mut edges,
                &mut edge_types,
                id,
                format!("{layer}.n:{}", e.tgt),
                "tgt".into(),
            );
        }
        for (i, n) in &row.input_map {
            let foot = format!("f.i:{i}");
            node_types.insert(foot.clone(), format!("fi|{i}"));
            nodes.insert(foot.clone());
            add_edge(
                &mut edges,
                &mut edge_types,
                foot,
                format!("{layer}.n:{n}"),
                format!("{layer}|in"),
            );
        }
        for (o, n) in &row.output_map {
            let foot = format!("f.o:{o}");
            node_types.insert(foot.clone(), format!("fo|{o}"));
            nodes.insert(foot.clone());
            add_edge(
                &mut edges,
                &mut edge_types,
                foot,
                format!("{layer}.n:{n}"),
                format!("{layer}|out"),
            );
        }
    }
    for (leg, layer, hom) in [("u", "t", &s.up.apex), ("d", "b", &s.down.apex)] {
        for (x, y) in &hom.node_map {
            add_edge(
                &mut edges,
                &mut edge_types,
                format!("m.n:{x}"),
                format!("{layer}.n:{y}"),
                format!("{leg}|n"),
            );
        }
        for (x, y) in &hom.edge_map {
            add_edge(
                &mut edges,
                &mut edge_types,
                format!("m.e:{x}"),
                format!("{layer}.e:{y}"),
                format!("{leg}|e"),
            );
        }
    }
    Graph {
        nodes,
        edges,
        typing: Some(Typing {
            type_graph: format!("square:{}", s.middle.apex.type_graph_name().unwrap_or("")),
            node_types,
            edge_types,
        }),
    }
}

pub fn squares_isomorphic(a: &Square, b: &Square) -> Result<bool, Error> {
    Ok(a.certificate()? == b.certificate()?)
}

/// Pointwise pushout of a row pair over the shared feet, keeping the
/// injections for the induced vertical homs.
fn compose_rows(
    c1: &StructuredCospan,
    c2: &StructuredCospan,
) -> Result<(StructuredCospan, PushoutResult), Error> {
    if c1.outputs != c2.inputs {
        return Err(Error::BoundaryMismatch(format!(
            "row outputs {:?} != inputs {:?}",
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
    let po = pushout(&span)?;
    let composite = StructuredCospan {
        inputs: c1.inputs.clone(),
        outputs: c2.outputs.clone(),
        input_map: c1
            .input_map
            .iter()
            .map(|(i, n)| (i.clone(), po.inj_left.node_map[n].clone()))
            .collect(),
        output_map: c2
            .output_map
            .iter()
            .map(|(o, n)| (o.clone(), po.inj_right.node_map[n].clone()))
            .collect(),
        apex: po.object.clone(),
    };
    Ok((composite, po))
}

/// Horizontal composition: glue the three rows pointwise over the shared
/// interface column; vertical homs are induced by the pushouts.
pub fn hcompose(s1: &Square, s2: &Square) -> Result<Square, Error> {
    let s1 = s1.normalize()?;
    let s2 = s2.normalize()?;
    if s1.output_set() != s2.input_set() {
        return Err(Error::BoundaryMismatch(format!(
            "right column {:?} != left column {:?}",
            s1.output_set(),
            s2.input_set()
        )));
    }
    let (top, top_po) = compose_rows(&s1.top, &s2.top)?;
    let (middle, mid_po) = compose_rows(&s1.middle, &s2.middle)?;
    let (bottom, bot_po) = compose_rows(&s1.bottom, &s2.bottom)?;

    let induce = |target_po: &PushoutResult,
                  left_leg: &GraphHom,
                  right_leg: &GraphHom|
     -> Result<GraphHom, Error> {
        mid_po.mediator(
            &compose_homs(left_leg, &target_po.inj_left)?,
            &compose_homs(right_leg, &target_po.inj_right)?,
        )
    };
    let up_apex = induce(&top_po, &s1.up.apex, &s2.up.apex)?;
    let down_apex = induce(&bot_po, &s1.down.apex, &s2.down.apex)?;

    let fi: BTreeMap<String, String> =
        middle.inputs.iter().map(|x| (x.clone(), x.clone())).collect();
    let fo: BTreeMap<String, String> =
        middle.outputs.iter().map(|x| (x.clone(), x.clone())).collect();
    let square = Square {
        up: CospanMorphism {
            source: middle.clone(),
            target: top.clone(),
            inputs: fi.clone(),
            apex: up_apex,
            outputs: fo.clone(),
        },
        down: CospanMorphism {
            source: middle.clone(),
            target: bottom.clone(),
            inputs: fi,
            apex: down_apex,
            outputs: fo,
        },
        top,
        middle,
        bottom,
    };
    let report = square.validate();
    if !report.is_valid() {
        return Err(Error::Invalid(format!(
            "horizontal composite is not a square: {report}"
        )));
    }
    Ok(square)
}

/// Vertical composition: the new middle is the pointwise pullback of the
/// two middles over the shared row.
pub fn vcompose(s1: &Square, s2: &Square) -> Result<Square, Error> {
    let s1 = s1.normalize()?;
    let s2 = s2.normalize()?;
    let Some(transport) = find_cospan_iso(&s2.top, &s1.bottom) else {
        return Err(Error::BoundaryMismatch(
            "bottom row of the first square does not match the top row of the second".into(),
        ));
    };
    let pb = pullback(&Cospan {
        apex: s1.bottom.apex.clone(),
        left: s1.down.apex.clone(),
        right: compose_homs(&s2.up.apex, &transport.apex)?,
    })?;

    // the pulled-back feet are the diagonal pairs; relabel them back to
    // the shared interface names
    let mut input_map = BTreeMap::new();
    for i in &s1.middle.inputs {
        let pair = format!("({},{})", s1.middle.input_map[i], s2.middle.input_map[i]);
        if !pb.object.nodes.contains(&pair) {
            return Err(Error::CertificationFailed(format!(
                "pullback lost interface element {i}"
            )));
        }
        input_map.insert(i.clone(), pair);
    }
    let mut output_map = BTreeMap::new();
    for o in &s1.middle.outputs {
        let pair = format!("({},{})", s1.middle.output_map[o], s2.middle.output_map[o]);
        if !pb.object.nodes.contains(&pair) {
            return Err(Error::CertificationFailed(format!(
                "pullback lost interface element {o}"
            )));
        }
        output_map.insert(o.clone(), pair);
    }
    let middle = StructuredCospan {
        inputs: s1.middle.inputs.clone(),
        outputs: s1.middle.outputs.clone(),
        apex: pb.object.clone(),
        input_map,
        output_map,
    };
    let fi: BTreeMap<String, String> =
        middle.inputs.iter().map(|x| (x.clone(), x.clone())).collect();
    let fo: BTreeMap<String, String> =
        middle.outputs.iter().map(|x| (x.clone(), x.clone())).collect();
    let square = Square {
        up: CospanMorphism {
            source: middle.clone(),
            target: s1.top.clone(),
            inputs: fi.clone(),
            apex: compose_homs(&pb.proj_left, &s1.up.apex)?,
            outputs: fo.clone(),
        },
        down: CospanMorphism {
            source: middle.clone(),
            target: s2.bottom.clone(),
            inputs: fi,
            apex: compose_homs(&pb.proj_right, &s2.down.apex)?,
            outputs: fo,
        },
        top: s1.top.clone(),
        middle,
        bottom: s2.bottom.clone(),
    };
    let report = square.validate();
    if !report.is_valid() {
        return Err(Error::Invalid(format!(
            "vertical composite is not a square: {report}"
        )));
    }
    Ok(square)
}

/// Interchange: composing a 2x2 arrangement horizontally first then
/// vertically agrees, up to square isomorphism, with the other order.
pub fn interchange_check(a: &Square, b: &Square, c: &Square, d: &Square) -> Result<bool, Error> {
    let h_then_v = vcompose(&hcompose(a, b)?, &hcompose(c, d)?)?;
    let v_then_h = hcompose(&vcompose(a, c)?, &vcompose(b, d)?)?;
    squares_isomorphic(&h_then_v, &v_then_h)
}

/// A cospan-level match: a morphism from the rule's top row into the
/// target, annotated with componentwise applicability.
#[derive(Debug, Clone)]
pub struct CospanMatch {
    pub morphism: CospanMorphism,
    pub applicable: bool,
    pub gluing: GluingReport,
    /// interface images of the target must survive the apex deletion
    pub interface_ok: bool,
}

/// Enumerate matches of a rule's top row into a target cospan.
/// Applicability is the apex gluing condition plus survival of the
/// target's interface under deletion (the interface components are maps
/// of finite sets along bijective legs, always pushout-complementable).
pub fn find_cospan_matches(
    rule: &Square,
    target: &StructuredCospan,
    mono_only: bool,
) -> Result<Vec<CospanMatch>, Error> {
    let rule = rule.normalize()?;
    let mut out = Vec::new();
    for morphism in enumerate_cospan_morphisms(&rule.top, target, mono_only) {
        let gluing = gluing_check(&rule.up.apex, &morphism.apex)?;
        let kept_nodes: BTreeSet<&String> = rule.up.apex.node_map.values().collect();
        let deleted: BTreeSet<&String> = rule
            .top
            .apex
            .nodes
            .iter()
            .filter(|n| !kept_nodes.contains(*n))
            .filter_map(|n| morphism.apex.node_map.get(n))
            .collect();
        let interface_ok = target
            .input_map
            .values()
            .chain(target.output_map.values())
            .all(|n| !deleted.contains(n));
        out.push(CospanMatch {
            applicable: gluing.ok() && interface_ok,
            gluing,
            interface_ok,
            morphism,
        });
    }
    Ok(out)
}

/// One cospan-level DPO step: pointwise pushout complement, then
/// pointwise pushout. The derived square is a rule again.
#[derive(Debug, Clone)]
pub struct CospanDerivation {
    pub rule_name: String,
    pub complement: StructuredCospan,
    pub result: StructuredCospan,
    pub derived: Square,
}

pub fn apply_cospan_rule(
    rule: &Square,
    target: &StructuredCospan,
    matching: &CospanMorphism,
) -> Result<CospanDerivation, Error> {
    apply_cospan_rule_named(rule, target, matching, "rule")
}

pub fn apply_cospan_rule_named(
    rule: &Square,
    target: &StructuredCospan,
    matching: &CospanMorphism,
    rule_name: &str,
) -> Result<CospanDerivation, Error> {
    let rule = rule.normalize()?;
    if matching.source != rule.top || &matching.target != target {
        return Err(Error::BadMatch);
    }
    let complement = pushout_complement(&rule.up.apex, &matching.apex)?;
    // interface survival: the target's feet must factor through the
    // complement
    for (label, map) in [("input", &target.input_map), ("output", &target.output_map)] {
        for (i, n) in map {
            if !complement.complement.nodes.contains(n) {
                return Err(Error::InterfaceMismatch(format!(
                    "{label} {i} maps to deleted node {n}"
                )));
            }
        }
    }
    let complement_row = StructuredCospan {
        inputs: target.inputs.clone(),
        outputs: target.outputs.clone(),
        apex: complement.complement.clone(),
        input_map: target.input_map.clone(),
        output_map: target.output_map.clone(),
    };
    let po = pushout(&Span {
        apex: rule.middle.apex.clone(),
        left: complement.to_complement.clone(),
        right: rule.down.apex.clone(),
    })?;
    let result_row = StructuredCospan {
        inputs: target.inputs.clone(),
        outputs: target.outputs.clone(),
        apex: po.object.clone(),
        input_map: target
            .input_map
            .iter()
            .map(|(i, n)| (i.clone(), po.inj_left.node_map[n].clone()))
            .collect(),
        output_map: target
            .output_map
            .iter()
            .map(|(o, n)| (o.clone(), po.inj_left.node_map[n].clone()))
            .collect(),
    };
    let fi: BTreeMap<String, String> = target
        .inputs
        .iter()
        .map(|x| (x.clone(), x.clone()))
        .collect();
    let fo: BTreeMap<String, String> = target
        .outputs
        .iter()
        .map(|x| (x.clone(), x.clone()))
        .collect();
    let derived = Square {
        up: CospanMorphism {
            source: complement_row.clone(),
            target: target.clone(),
            inputs: fi.clone(),
            apex: complement.inclusion.clone(),
            outputs: fo.clone(),
        },
        down: CospanMorphism {
            source: complement_row.clone(),
            target: result_row.clone(),
            inputs: fi,
            apex: po.inj_left.clone(),
            outputs: fo,
        },
        top: target.clone(),
        middle: complement_row.clone(),
        bottom: result_row.clone(),
    };
    let report = validate_cospan_rule(&derived);
    if !report.is_valid() {
        return Err(Error::CertificationFailed(format!(
            "derived square is not a rule: {report}"
        )));
    }
    Ok(CospanDerivation {
        rule_name: rule_name.to_string(),
        complement: complement_row,
        result: result_row,
        derived,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ClosureLimits {
    pub max_squares: usize,
    pub max_apex_nodes: usize,
    pub max_apex_edges: usize,
}

impl Default for ClosureLimits {
    fn default() -> Self {
        ClosureLimits {
            max_squares: 600,
            max_apex_nodes: 10,
            max_apex_edges: 16,
        }
    }
}

/// Bounded generated language: identity squares on every horizontal
/// arrow encountered, rules derived at matches into those arrows, closed
/// under horizontal saturation and one vertical pass per round.
#[derive(Debug, Default)]
pub struct LangClosure {
    pub squares: Vec<Square>,
    /// row certificates cached per square, in step with `squares`
    top_certs: Vec<Vec<u8>>,
    bottom_certs: Vec<Vec<u8>>,
    pub certs: BTreeSet<Vec<u8>>,
    pub rows: BTreeMap<Vec<u8>, StructuredCospan>,
    pub complete: bool,
}

impl LangClosure {
    pub fn contains_square(&self, s: &Square) -> Result<bool, Error> {
        Ok(self.certs.contains(&s.certificate()?))
    }

    /// Squares whose top and bottom rows match the given cospans up to
    /// iso with interfaces fixed.
    pub fn squares_between(
        &self,
        top: &StructuredCospan,
        bottom: &StructuredCospan,
    ) -> Vec<&Square> {
        let top_cert = top.certificate();
        let bottom_cert = bottom.certificate();
        self.squares
            .iter()
            .enumerate()
            .filter(|(i, _)| self.top_certs[*i] == top_cert && self.bottom_certs[*i] == bottom_cert)
            .map(|(_, s)| s)
            .collect()
    }
}

struct ClosureBuilder {
    closure: LangClosure,
    // rows waiting for their identity/derivation pass
    row_queue: Vec<StructuredCospan>,
    limits: ClosureLimits,
    tried_h: BTreeSet<(usize, usize)>,
    tried_v: BTreeSet<(usize, usize)>,
}

impl ClosureBuilder {
    fn add_row(&mut self, row: &StructuredCospan) {
        let cert = row.certificate();
        if self.closure.rows.contains_key(&cert) {
            return;
        }
        self.closure.rows.insert(cert, row.clone());
        self.row_queue.push(row.clone());
    }

    fn within_limits(&mut self, s: &Square) -> bool {
        for row in [&s.top, &s.middle, &s.bottom] {
            if row.apex.node_count() > self.limits.max_apex_nodes
                || row.apex.edge_count() > self.limits.max_apex_edges
            {
                self.closure.complete = false;
                return false;
            }
        }
        true
    }

    fn add_square(&mut self, s: Square) -> Result<bool, Error> {
        if !self.within_limits(&s) {
            return Ok(false);
        }
        if self.closure.squares.len() >= self.limits.max_squares {
            self.closure.complete = false;
            return Ok(false);
        }
        let s = s.normalize()?;
        let cert = s.certificate()?;
        if !self.closure.certs.insert(cert) {
            return Ok(false);
        }
        self.add_row(&s.top.clone());
        self.add_row(&s.middle.clone());
        self.add_row(&s.bottom.clone());
        self.closure.top_certs.push(s.top.certificate());
        self.closure.bottom_certs.push(s.bottom.certificate());
        self.closure.squares.push(s);
        Ok(true)
    }
}

pub fn lang_closure(
    grammar: &CospanGrammar,
    seeds: &[StructuredCospan],
    rounds: usize,
    limits: ClosureLimits,
) -> Result<LangClosure, Error> {
    let mut b = ClosureBuilder {
        closure: LangClosure {
            complete: true,
            ..Default::default()
        },
        row_queue: Vec::new(),
        limits,
        tried_h: BTreeSet::new(),
        tried_v: BTreeSet::new(),
    };
    for seed in seeds {
        b.add_row(seed);
    }
    for rule in &grammar.rules {
        let s = rule.square.normalize()?;
        b.add_square(s)?;
    }

    for _round in 0..rounds.max(1) {
        // identity and derivation pass over rows known at round start
        let batch = std::mem::take(&mut b.row_queue);
        for row in &batch {
            b.add_square(Square::identity(row))?;
            for rule in &grammar.rules {
                for cand in find_cospan_matches(&rule.square, row, true)? {
                    if !cand.applicable {
                        continue;
                    }
                    let derivation =
                        apply_cospan_rule_named(&rule.square, row, &cand.morphism, &rule.name)?;
                    b.add_square(derivation.derived)?;
                }
            }
        }

        // horizontal saturation
        loop {
            let n = b.closure.squares.len();
            let mut added = false;
            for i in 0..n {
                for j in 0..n {
                    if !b.tried_h.insert((i, j)) {
                        continue;
                    }
                    let (s1, s2) = (&b.closure.squares[i], &b.closure.squares[j]);
                    if s1.output_set() != s2.input_set() {
                        continue;
                    }
                    // the shared feet are discrete, so composite rows
                    // have exactly the sum of the edge counts
                    let oversized = [
                        (&s1.top, &s2.top),
                        (&s1.middle, &s2.middle),
                        (&s1.bottom, &s2.bottom),
                    ]
                    .iter()
                    .any(|(r1, r2)| {
                        r1.apex.edge_count() + r2.apex.edge_count() > b.limits.max_apex_edges
                    });
                    if oversized {
                        b.closure.complete = false;
                        continue;
                    }
                    let composite = hcompose(s1, s2)?;
                    if b.add_square(composite)? {
                        added = true;
                    }
                }
            }
            if !added || b.closure.squares.len() >= b.limits.max_squares {
                break;
            }
        }

        // one vertical pass
        let n = b.closure.squares.len();
        for i in 0..n {
            for j in 0..n {
                if !b.tried_v.insert((i, j)) {
                    continue;
                }
                if b.closure.bottom_certs[i] != b.closure.top_certs[j] {
                    continue;
                }
                let composite = vcompose(&b.closure.squares[i], &b.closure.squares[j])?;
                b.add_square(composite)?;
            }
        }
    }
    Ok(b.closure)
}

/// Loop-removal fixtures shared by the test suites: the one-node cospan
/// rule and the worked two-loop open graph with a decomposition that
/// exposes its loop nodes on an interface.
pub mod fixtures {
    use super::*;

    pub fn loop_cospan_rule() -> CospanRule {
        let pt = Graph::from_parts(["u"], Vec::<(&str, &str, &str)>::new());
        let lp = Graph::from_parts(["u"], [("loop", "u", "u")]);
        let foot = |apex: &Graph| StructuredCospan {
            inputs: ["p".to_string()].into(),
            outputs: ["p".to_string()].into(),
            apex: apex.clone(),
            input_map: [("p".to_string(), "u".to_string())].into(),
            output_map: [("p".to_string(), "u".to_string())].into(),
        };
        let top = foot(&lp);
        let middle = foot(&pt);
        let bottom = foot(&pt);
        let counit = GraphHom {
            source: pt.clone(),
            target: lp,
            node_map: [("u".into(), "u".into())].into(),
            edge_map: BTreeMap::new(),
        };
        let feet: BTreeMap<String, String> = [("p".to_string(), "p".to_string())].into();
        CospanRule {
            name: "drop-loop".into(),
            square: Square {
                up: CospanMorphism {
                    source: middle.clone(),
                    target: top.clone(),
                    inputs: feet.clone(),
                    apex: counit,
                    outputs: feet.clone(),
                },
                down: CospanMorphism {
                    source: middle.clone(),
                    target: bottom.clone(),
                    inputs: feet.clone(),
                    apex: GraphHom::identity(&pt),
                    outputs: feet,
                },
                top,
                middle,
                bottom,
            },
        }
    }

    pub fn loop_cospan_grammar() -> CospanGrammar {
        CospanGrammar::new(vec![loop_cospan_rule()]).unwrap()
    }

    fn cospan(inputs: &[(&str, &str)], apex: Graph, outputs: &[(&str, &str)]) -> StructuredCospan {
        StructuredCospan {
            inputs: inputs.iter().map(|(i, _)| i.to_string()).collect(),
            outputs: outputs.iter().map(|(o, _)| o.to_string()).collect(),
            apex,
            input_map: inputs.iter().map(|(i, n)| (i.to_string(), n.to_string())).collect(),
            output_map: outputs.iter().map(|(o, n)| (o.to_string(), n.to_string())).collect(),
        }
    }

    /// Top row of the worked two-loop square: four nodes, loops on b and
    /// c, two inputs and one output.
    pub fn two_loop_open_graph() -> StructuredCospan {
        cospan(
            &[("i1", "a"), ("i2", "b")],
            Graph::from_parts(
                ["a", "b", "c", "d"],
                [
                    ("loopb", "b", "b"),
                    ("loopc", "c", "c"),
                    ("ac", "a", "c"),
                    ("bc", "b", "c"),
                    ("cd", "c", "d"),
                ],
            ),
            &[("o1", "d")],
        )
    }

    /// Its loop-free form: the bottom row of the worked square.
    pub fn loop_free_open_graph() -> StructuredCospan {
        cospan(
            &[("i1", "a"), ("i2", "b")],
            Graph::from_parts(
                ["a", "b", "c", "d"],
                [("ac", "a", "c"), ("bc", "b", "c"), ("cd", "c", "d")],
            ),
            &[("o1", "d")],
        )
    }

    /// A three-piece decomposition of the two-loop open graph whose
    /// middle piece exposes both loop nodes on its interface, so the
    /// loop rule can act there.
    pub fn two_loop_decomposition() -> (StructuredCospan, StructuredCospan, StructuredCospan) {
        let left = cospan(
            &[("i1", "a"), ("i2", "b")],
            Graph::from_parts(["a", "b", "c"], [("ac", "a", "c")]),
            &[("q", "b"), ("s", "c")],
        );
        let mid = cospan(
            &[("q", "b"), ("s", "c")],
            Graph::from_parts(
                ["b", "c"],
                [("loopb", "b", "b"), ("loopc", "c", "c"), ("bc", "b", "c")],
            ),
            &[("q", "b"), ("s", "c")],
        );
        let right = cospan(
            &[("q", "b"), ("s", "c")],
            Graph::from_parts(["b", "c", "d"], [("cd", "c", "d")]),
            &[("o1", "d")],
        );
        (left, mid, right)
    }
}
