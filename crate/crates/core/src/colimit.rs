//! Pushouts, pullbacks, coproducts, pushout complements, and the
//! gluing condition in (typed) Graph.
//!
//! Pushout ids follow a fixed scheme: elements of the two legs are
//! tagged `l:`/`r:` and each glued equivalence class is named by its
//! least member, so results are deterministic and diffable.

use crate::error::Error;
use crate::graph::{
    compose_homs, enumerate_homs, Edge, EdgeId, Graph, GraphHom, NodeId, Typing,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A span `L <- apex -> R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub apex: Graph,
    pub left: GraphHom,
    pub right: GraphHom,
}

impl Span {
    pub fn new(left: GraphHom, right: GraphHom) -> Result<Span, Error> {
        if left.source != right.source {
            return Err(Error::Invalid("span legs have different sources".into()));
        }
        Ok(Span {
            apex: left.source.clone(),
            left,
            right,
        })
    }
}

/// A cospan `L -> apex <- R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cospan {
    pub apex: Graph,
    pub left: GraphHom,
    pub right: GraphHom,
}

impl Cospan {
    pub fn new(left: GraphHom, right: GraphHom) -> Result<Cospan, Error> {
        if left.target != right.target {
            return Err(Error::Invalid("cospan legs have different targets".into()));
        }
        Ok(Cospan {
            apex: left.target.clone(),
            left,
            right,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PushoutResult {
    pub span: Span,
    pub object: Graph,
    pub inj_left: GraphHom,
    pub inj_right: GraphHom,
}

impl PushoutResult {
    /// Mediating hom for a commuting cocone `(f: L -> Z, g: R -> Z)`.
    /// The mediator is unique when it exists; a non-commuting cocone or
    /// an inconsistent assignment is an error.
    pub fn mediator(&self, f: &GraphHom, g: &GraphHom) -> Result<GraphHom, Error> {
        if f.source != self.span.left.target || g.source != self.span.right.target {
            return Err(Error::EndpointMismatch);
        }
        if f.target != g.target {
            return Err(Error::EndpointMismatch);
        }
        if compose_homs(&self.span.left, f)? != compose_homs(&self.span.right, g)? {
            return Err(Error::Invalid("cocone does not commute".into()));
        }
        let mut node_map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut edge_map: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
        let assign = |map: &mut BTreeMap<String, String>, key: &str, value: &str| {
            match map.get(key) {
                None => {
                    map.insert(key.to_string(), value.to_string());
                    Ok(())
                }
                Some(prev) if prev == value => Ok(()),
                Some(_) => Err(Error::Invalid(
                    "cocone is inconsistent on a glued class".into(),
                )),
            }
        };
        for (x, p) in &self.inj_left.node_map {
            assign(&mut node_map, p, &f.node_map[x])?;
        }
        for (y, p) in &self.inj_right.node_map {
            assign(&mut node_map, p, &g.node_map[y])?;
        }
        for (x, p) in &self.inj_left.edge_map {
            assign(&mut edge_map, p, &f.edge_map[x])?;
        }
        for (y, p) in &self.inj_right.edge_map {
            assign(&mut edge_map, p, &g.edge_map[y])?;
        }
        Ok(GraphHom {
            source: self.object.clone(),
            target: f.target.clone(),
            node_map,
            edge_map,
        })
    }
}

fn tag_left(id: &str) -> String {
    format!("l:{id}")
}

fn tag_right(id: &str) -> String {
    format!("r:{id}")
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<String, String>,
}

impl UnionFind {
    fn add(&mut self, x: &str) {
        self.parent.entry(x.to_string()).or_insert_with(|| x.to_string());
    }

    fn find(&mut self, x: &str) -> String {
        let p = self.parent[x].clone();
        if p == x {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(x.to_string(), root.clone());
        root
    }

    fn union(&mut self, x: &str, y: &str) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx != ry {
            // least id wins as representative
            if rx < ry {
                self.parent.insert(ry, rx);
            } else {
                self.parent.insert(rx, ry);
            }
        }
    }
}

fn merge_typing(l: &Graph, r: &Graph) -> bool {
    matches!(
        (l.type_graph_name(), r.type_graph_name()),
        (Some(a), Some(b)) if a == b
    )
}

/// Pushout of a span: the coproduct of the two legs' targets quotiented
/// by the equivalence generated by gluing along the apex.
pub fn pushout(span: &Span) -> Result<PushoutResult, Error> {
    let l_obj = &span.left.target;
    let r_obj = &span.right.target;

    let mut nodes_uf = UnionFind::default();
    let mut edges_uf = UnionFind::default();
    for n in &l_obj.nodes {
        nodes_uf.add(&tag_left(n));
    }
    for n in &r_obj.nodes {
        nodes_uf.add(&tag_right(n));
    }
    for e in l_obj.edges.keys() {
        edges_uf.add(&tag_left(e));
    }
    for e in r_obj.edges.keys() {
        edges_uf.add(&tag_right(e));
    }
    for k in &span.apex.nodes {
        let ln = span
            .left
            .node_map
            .get(k)
            .ok_or_else(|| Error::Invalid(format!("span left leg unmapped node {k}")))?;
        let rn = span
            .right
            .node_map
            .get(k)
            .ok_or_else(|| Error::Invalid(format!("span right leg unmapped node {k}")))?;
        nodes_uf.union(&tag_left(ln), &tag_right(rn));
    }
    for k in span.apex.edges.keys() {
        let le = span
            .left
            .edge_map
            .get(k)
            .ok_or_else(|| Error::Invalid(format!("span left leg unmapped edge {k}")))?;
        let re = span
            .right
            .edge_map
            .get(k)
            .ok_or_else(|| Error::Invalid(format!("span right leg unmapped edge {k}")))?;
        edges_uf.union(&tag_left(le), &tag_right(re));
    }

    let node_rep = |uf: &mut UnionFind, tagged: &str| uf.find(tagged);

    let mut nodes: BTreeSet<NodeId> = BTreeSet::new();
    let mut inj_left_nodes = BTreeMap::new();
    let mut inj_right_nodes = BTreeMap::new();
    for n in &l_obj.nodes {
        let rep = node_rep(&mut nodes_uf, &tag_left(n));
        inj_left_nodes.insert(n.clone(), rep.clone());
        nodes.insert(rep);
    }
    for n in &r_obj.nodes {
        let rep = node_rep(&mut nodes_uf, &tag_right(n));
        inj_right_nodes.insert(n.clone(), rep.clone());
        nodes.insert(rep);
    }

    let mut edges: BTreeMap<EdgeId, Edge> = BTreeMap::new();
    let mut inj_left_edges = BTreeMap::new();
    let mut inj_right_edges = BTreeMap::new();
    for (id, e) in &l_obj.edges {
        let rep = edges_uf.find(&tag_left(id));
        inj_left_edges.insert(id.clone(), rep.clone());
        edges.insert(
            rep,
            Edge {
                src: inj_left_nodes[&e.src].clone(),
                tgt: inj_left_nodes[&e.tgt].clone(),
            },
        );
    }
    for (id, e) in &r_obj.edges {
        let rep = edges_uf.find(&tag_right(id));
        inj_right_edges.insert(id.clone(), rep.clone());
        edges.insert(
            rep,
            Edge {
                src: inj_right_nodes[&e.src].clone(),
                tgt: inj_right_nodes[&e.tgt].clone(),
            },
        );
    }

    let typing = if merge_typing(l_obj, r_obj) {
        let mut node_types = BTreeMap::new();
        let mut edge_types = BTreeMap::new();
        for (n, rep) in &inj_left_nodes {
            if let Some(t) = l_obj.node_type(n) {
                node_types.insert(rep.clone(), t.to_string());
            }
        }
        for (n, rep) in &inj_right_nodes {
            if let Some(t) = r_obj.node_type(n) {
                node_types.insert(rep.clone(), t.to_string());
            }
        }
        for (e, rep) in &inj_left_edges {
            if let Some(t) = l_obj.edge_type(e) {
                edge_types.insert(rep.clone(), t.to_string());
            }
        }
        for (e, rep) in &inj_right_edges {
            if let Some(t) = r_obj.edge_type(e) {
                edge_types.insert(rep.clone(), t.to_string());
            }
        }
        Some(Typing {
            type_graph: l_obj.type_graph_name().unwrap().to_string(),
            node_types,
            edge_types,
        })
    } else {
        None
    };

    let object = Graph {
        nodes,
        edges,
        typing,
    };
    Ok(PushoutResult {
        span: span.clone(),
        inj_left: GraphHom {
            source: l_obj.clone(),
            target: object.clone(),
            node_map: inj_left_nodes,
            edge_map: inj_left_edges,
        },
        inj_right: GraphHom {
            source: r_obj.clone(),
            target: object.clone(),
            node_map: inj_right_nodes,
            edge_map: inj_right_edges,
        },
        object,
    })
}

/// Disjoint union with `l:`/`r:`-tagged ids: the pushout over the empty
/// apex.
pub fn coproduct(g: &Graph, h: &Graph) -> Result<PushoutResult, Error> {
    let empty = Graph::empty();
    let span = Span {
        apex: empty.clone(),
        left: GraphHom {
            source: empty.clone(),
            target: g.clone(),
            node_map: BTreeMap::new(),
            edge_map: BTreeMap::new(),
        },
        right: GraphHom {
            source: empty,
            target: h.clone(),
            node_map: BTreeMap::new(),
            edge_map: BTreeMap::new(),
        },
    };
    pushout(&span)
}

#[derive(Debug, Clone)]
pub struct PullbackResult {
    pub cospan: Cospan,
    pub object: Graph,
    pub proj_left: GraphHom,
    pub proj_right: GraphHom,
}

fn pair_id(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Pullback of a cospan: pairs of elements agreeing in the apex.
pub fn pullback(cospan: &Cospan) -> Result<PullbackResult, Error> {
    let l_obj = &cospan.left.source;
    let r_obj = &cospan.right.source;

    let mut nodes = BTreeSet::new();
    let mut proj_left_nodes = BTreeMap::new();
    let mut proj_right_nodes = BTreeMap::new();
    for x in &l_obj.nodes {
        for y in &r_obj.nodes {
            if cospan.left.node_map.get(x) == cospan.right.node_map.get(y) {
                let id = pair_id(x, y);
                proj_left_nodes.insert(id.clone(), x.clone());
                proj_right_nodes.insert(id.clone(), y.clone());
                nodes.insert(id);
            }
        }
    }
    let mut edges = BTreeMap::new();
    let mut proj_left_edges = BTreeMap::new();
    let mut proj_right_edges = BTreeMap::new();
    for (ex, e) in &l_obj.edges {
        for (ey, d) in &r_obj.edges {
            if cospan.left.edge_map.get(ex) == cospan.right.edge_map.get(ey) {
                let id = pair_id(ex, ey);
                proj_left_edges.insert(id.clone(), ex.clone());
                proj_right_edges.insert(id.clone(), ey.clone());
                edges.insert(
                    id,
                    Edge {
                        src: pair_id(&e.src, &d.src),
                        tgt: pair_id(&e.tgt, &d.tgt),
                    },
                );
            }
        }
    }

    let typing = if merge_typing(l_obj, r_obj) {
        Some(Typing {
            type_graph: l_obj.type_graph_name().unwrap().to_string(),
            node_types: proj_left_nodes
                .iter()
                .filter_map(|(id, x)| l_obj.node_type(x).map(|t| (id.clone(), t.to_string())))
                .collect(),
            edge_types: proj_left_edges
                .iter()
                .filter_map(|(id, x)| l_obj.edge_type(x).map(|t| (id.clone(), t.to_string())))
                .collect(),
        })
    } else {
        None
    };

    let object = Graph {
        nodes,
        edges,
        typing,
    };
    Ok(PullbackResult {
        cospan: cospan.clone(),
        proj_left: GraphHom {
            source: object.clone(),
            target: l_obj.clone(),
            node_map: proj_left_nodes,
            edge_map: proj_left_edges,
        },
        proj_right: GraphHom {
            source: object.clone(),
            target: r_obj.clone(),
            node_map: proj_right_nodes,
            edge_map: proj_right_edges,
        },
        object,
    })
}

/// Identification and dangling conditions for a pushout complement of
/// `m . l_inc`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GluingReport {
    pub identification_ok: bool,
    pub dangling_ok: bool,
    /// pairs of distinct elements of the left side identified by the
    /// match outside the interface image
    pub identification_offenders: Vec<(String, String)>,
    /// edges of the host graph left unanchored by a node deletion
    pub dangling_offenders: Vec<EdgeId>,
}

impl GluingReport {
    pub fn ok(&self) -> bool {
        self.identification_ok && self.dangling_ok
    }
}

impl fmt::Display for GluingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "gluing condition holds");
        }
        let mut parts = Vec::new();
        if !self.identification_ok {
            parts.push(format!(
                "identification fails on {:?}",
                self.identification_offenders
            ));
        }
        if !self.dangling_ok {
            parts.push(format!("dangling edges {:?}", self.dangling_offenders));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Check the gluing condition for applying a rule with interface
/// inclusion `l_inc: k >-> l` at a match `m: l -> g`.
pub fn gluing_check(l_inc: &GraphHom, m: &GraphHom) -> Result<GluingReport, Error> {
    if l_inc.target != m.source {
        return Err(Error::EndpointMismatch);
    }
    if !l_inc.classify().is_mono {
        return Err(Error::Invalid("interface leg must be monic".into()));
    }
    let l_obj = &m.source;
    let g = &m.target;
    let k_nodes: BTreeSet<&NodeId> = l_inc.node_map.values().collect();
    let k_edges: BTreeSet<&EdgeId> = l_inc.edge_map.values().collect();

    let mut report = GluingReport {
        identification_ok: true,
        dangling_ok: true,
        ..Default::default()
    };

    // identification: elements of l identified by m must come from k
    let l_node_list: Vec<&NodeId> = l_obj.nodes.iter().collect();
    for (i, x) in l_node_list.iter().enumerate() {
        for y in &l_node_list[i + 1..] {
            if m.node_map.get(*x) == m.node_map.get(*y)
                && !(k_nodes.contains(*x) && k_nodes.contains(*y))
            {
                report.identification_ok = false;
                report
                    .identification_offenders
                    .push(((*x).clone(), (*y).clone()));
            }
        }
    }
    let l_edge_list: Vec<&EdgeId> = l_obj.edges.keys().collect();
    for (i, x) in l_edge_list.iter().enumerate() {
        for y in &l_edge_list[i + 1..] {
            if m.edge_map.get(*x) == m.edge_map.get(*y)
                && !(k_edges.contains(*x) && k_edges.contains(*y))
            {
                report.identification_ok = false;
                report
                    .identification_offenders
                    .push(((*x).clone(), (*y).clone()));
            }
        }
    }

    // dangling: edges of g incident to a deleted node must themselves be
    // matched (hence deleted)
    let deleted_nodes: BTreeSet<&NodeId> = l_obj
        .nodes
        .iter()
        .filter(|n| !k_nodes.contains(*n))
        .filter_map(|n| m.node_map.get(n))
        .collect();
    let matched_edges: BTreeSet<&EdgeId> = m.edge_map.values().collect();
    for (id, e) in &g.edges {
        if (deleted_nodes.contains(&e.src) || deleted_nodes.contains(&e.tgt))
            && !matched_edges.contains(id)
        {
            report.dangling_ok = false;
            report.dangling_offenders.push(id.clone());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ComplementResult {
    /// the context graph `k'`
    pub complement: Graph,
    /// `k -> k'`
    pub to_complement: GraphHom,
    /// `k' -> g`
    pub inclusion: GraphHom,
}

/// Pushout complement of `k >-l_inc-> l -m-> g`: delete the matched
/// image of `l` outside the interface, keep everything else. The
/// returned square is certified to be a pushout.
pub fn pushout_complement(l_inc: &GraphHom, m: &GraphHom) -> Result<ComplementResult, Error> {
    let report = gluing_check(l_inc, m)?;
    if !report.ok() {
        return Err(Error::GluingViolation(report));
    }
    let l_obj = &m.source;
    let g = &m.target;
    let k_nodes: BTreeSet<&NodeId> = l_inc.node_map.values().collect();
    let k_edges: BTreeSet<&EdgeId> = l_inc.edge_map.values().collect();

    let deleted_nodes: BTreeSet<NodeId> = l_obj
        .nodes
        .iter()
        .filter(|n| !k_nodes.contains(*n))
        .filter_map(|n| m.node_map.get(n).cloned())
        .collect();
    let deleted_edges: BTreeSet<EdgeId> = l_obj
        .edges
        .keys()
        .filter(|e| !k_edges.contains(*e))
        .filter_map(|e| m.edge_map.get(e).cloned())
        .collect();

    let complement = Graph {
        nodes: g.nodes.iter().filter(|n| !deleted_nodes.contains(*n)).cloned().collect(),
        edges: g
            .edges
            .iter()
            .filter(|(id, _)| !deleted_edges.contains(*id))
            .map(|(id, e)| (id.clone(), e.clone()))
            .collect(),
        typing: g.typing.as_ref().map(|t| Typing {
            type_graph: t.type_graph.clone(),
            node_types: t
                .node_types
                .iter()
                .filter(|(n, _)| !deleted_nodes.contains(*n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
            edge_types: t
                .edge_types
                .iter()
                .filter(|(e, _)| !deleted_edges.contains(*e))
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect(),
        }),
    };

    let to_complement = GraphHom {
        source: l_inc.source.clone(),
        target: complement.clone(),
        node_map: l_inc
            .source
            .nodes
            .iter()
            .map(|z| (z.clone(), m.node_map[&l_inc.node_map[z]].clone()))
            .collect(),
        edge_map: l_inc
            .source
            .edges
            .keys()
            .map(|z| (z.clone(), m.edge_map[&l_inc.edge_map[z]].clone()))
            .collect(),
    };
    let inclusion = GraphHom {
        source: complement.clone(),
        target: g.clone(),
        node_map: complement.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
        edge_map: complement.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
    };

    // exact certificate: re-pushing the span must reproduce g up to the
    // canonical mediator being an iso
    let span = Span {
        apex: l_inc.source.clone(),
        left: l_inc.clone(),
        right: to_complement.clone(),
    };
    if !certify_pushout_square(&span, m, &inclusion)? {
        return Err(Error::CertificationFailed(
            "pushout complement square failed certification".into(),
        ));
    }

    Ok(ComplementResult {
        complement,
        to_complement,
        inclusion,
    })
}

/// Exact pushout check: recompute the pushout of the span and require
/// the canonical mediator into the candidate cocone to be an iso.
pub fn certify_pushout_square(
    span: &Span,
    cocone_left: &GraphHom,
    cocone_right: &GraphHom,
) -> Result<bool, Error> {
    let fresh = pushout(span)?;
    match fresh.mediator(cocone_left, cocone_right) {
        Ok(u) => Ok(u.is_valid() && u.classify().is_iso),
        Err(_) => Ok(false),
    }
}

/// A candidate pushout square: a span plus a cocone on it.
#[derive(Debug, Clone)]
pub struct CommutingSquare {
    pub span: Span,
    pub cocone_left: GraphHom,
    pub cocone_right: GraphHom,
}

impl CommutingSquare {
    pub fn object(&self) -> &Graph {
        &self.cocone_left.target
    }

    pub fn commutes(&self) -> bool {
        self.cocone_left.target == self.cocone_right.target
            && self.span.left.target == self.cocone_left.source
            && self.span.right.target == self.cocone_right.source
            && matches!(
                (
                    compose_homs(&self.span.left, &self.cocone_left),
                    compose_homs(&self.span.right, &self.cocone_right)
                ),
                (Ok(a), Ok(b)) if a == b
            )
    }
}

const VERIFY_NODE_BOUND: usize = 14;

fn chaotic(n: usize) -> Graph {
    let nodes: Vec<String> = (0..n).map(|i| format!("z{i}")).collect();
    let mut g = Graph::discrete(nodes.clone());
    for (i, s) in nodes.iter().enumerate() {
        for (j, t) in nodes.iter().enumerate() {
            g.edges.insert(
                format!("z{i}>z{j}"),
                Edge {
                    src: s.clone(),
                    tgt: t.clone(),
                },
            );
        }
    }
    g
}

fn probe_targets(sq: &CommutingSquare) -> Result<Vec<Graph>, Error> {
    let mut probes = vec![
        sq.span.apex.clone(),
        sq.span.left.target.clone(),
        sq.span.right.target.clone(),
        sq.object().clone(),
        // the recomputed pushout is just another probe target: any graph
        // is a legitimate cocone codomain
        pushout(&sq.span)?.object,
        Graph::discrete(["z0".to_string()]),
        Graph::discrete(["z0".to_string(), "z1".to_string()]),
        Graph::discrete(["z0".to_string(), "z1".to_string(), "z2".to_string()]),
        chaotic(1),
        chaotic(2),
        chaotic(3),
        Graph::from_parts(["z0", "z1"], [("w", "z0", "z1")]),
        Graph::from_parts(["z0"], [("w", "z0", "z0")]),
    ];
    let mut seen = BTreeSet::new();
    probes.retain(|p| seen.insert(crate::canon::canonical_form(p)));
    Ok(probes)
}

fn hom_key(h: &GraphHom) -> String {
    let mut s = String::new();
    for (a, b) in &h.node_map {
        s.push_str(a);
        s.push('\u{1}');
        s.push_str(b);
        s.push('\u{2}');
    }
    s.push('\u{3}');
    for (a, b) in &h.edge_map {
        s.push_str(a);
        s.push('\u{1}');
        s.push_str(b);
        s.push('\u{2}');
    }
    s
}

/// Mediators for one cocone, counted up to 2. A mediator is pinned on
/// the injection images by the cocone; only elements outside both
/// images remain free, and the count caps out as soon as two distinct
/// completions exist.
fn mediator_count(sq: &CommutingSquare, z: &Graph, h1: &GraphHom, h2: &GraphHom) -> usize {
    let p = sq.object();
    let mut node_map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut edge_map: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    // pin the assignment along both injections; any disagreement means
    // no mediator at all
    let mut pin = |inj: &GraphHom, cocone: &GraphHom| -> bool {
        for (x, px) in &inj.node_map {
            let want = &cocone.node_map[x];
            if let Some(prev) = node_map.get(px) {
                if prev != want {
                    return false;
                }
            } else {
                node_map.insert(px.clone(), want.clone());
            }
        }
        for (x, px) in &inj.edge_map {
            let want = &cocone.edge_map[x];
            if let Some(prev) = edge_map.get(px) {
                if prev != want {
                    return false;
                }
            } else {
                edge_map.insert(px.clone(), want.clone());
            }
        }
        true
    };
    if !pin(&sq.cocone_left, h1) || !pin(&sq.cocone_right, h2) {
        return 0;
    }
    // free parts: branch and count completions, stopping at 2
    let free_nodes: Vec<&NodeId> = p.nodes.iter().filter(|n| !node_map.contains_key(*n)).collect();
    let free_edges: Vec<&EdgeId> = p
        .edges
        .keys()
        .filter(|e| !edge_map.contains_key(*e))
        .collect();

    fn complete(
        p: &Graph,
        z: &Graph,
        free_nodes: &[&NodeId],
        free_edges: &[&EdgeId],
        node_map: &mut BTreeMap<NodeId, NodeId>,
        edge_map: &mut BTreeMap<EdgeId, EdgeId>,
        found: &mut usize,
    ) {
        if *found >= 2 {
            return;
        }
        if let Some((n, rest)) = free_nodes.split_first() {
            for cand in &z.nodes {
                node_map.insert((*n).clone(), cand.clone());
                complete(p, z, rest, free_edges, node_map, edge_map, found);
                node_map.remove(*n);
                if *found >= 2 {
                    return;
                }
            }
            return;
        }
        if let Some((e, rest)) = free_edges.split_first() {
            let edge = &p.edges[*e];
            let (Some(s), Some(t)) = (
                node_map.get(&edge.src).cloned(),
                node_map.get(&edge.tgt).cloned(),
            ) else {
                return;
            };
            for (cand, ze) in &z.edges {
                if ze.src == s && ze.tgt == t {
                    edge_map.insert((*e).clone(), cand.clone());
                    complete(p, z, free_nodes, rest, node_map, edge_map, found);
                    edge_map.remove(*e);
                    if *found >= 2 {
                        return;
                    }
                }
            }
            return;
        }
        // full assignment: valid iff it is a hom
        let candidate = GraphHom {
            source: p.clone(),
            target: z.clone(),
            node_map: node_map.clone(),
            edge_map: edge_map.clone(),
        };
        if candidate.is_valid() {
            *found += 1;
        }
    }

    let mut found = 0;
    complete(p, z, &free_nodes, &free_edges, &mut node_map, &mut edge_map, &mut found);
    found
}

/// Brute-force universal-property oracle: the square commutes and every
/// commuting cocone into the probe targets admits exactly one mediator.
/// Probe targets are the square's own graphs, the recomputed pushout,
/// and a fixed family of graphs on up to three nodes; probes whose
/// cocone space would blow past the enumeration cap are skipped.
pub fn verify_pushout(sq: &CommutingSquare) -> Result<bool, Error> {
    if !sq.commutes() {
        return Ok(false);
    }
    if !sq.span.left.is_valid()
        || !sq.span.right.is_valid()
        || !sq.cocone_left.is_valid()
        || !sq.cocone_right.is_valid()
    {
        return Ok(false);
    }
    let p = sq.object();
    if p.node_count() > VERIFY_NODE_BOUND {
        return Err(Error::BoundExceeded(format!(
            "verify_pushout object has {} nodes (bound {VERIFY_NODE_BOUND})",
            p.node_count()
        )));
    }

    const COCONE_CAP: usize = 300_000;
    for z in probe_targets(sq)? {
        let legs = sq.span.left.target.node_count().max(sq.span.right.target.node_count());
        if z.node_count().max(1).saturating_pow(legs as u32) > COCONE_CAP {
            continue;
        }
        let homs_l = enumerate_homs(&sq.span.left.target, &z, false);
        let homs_r = enumerate_homs(&sq.span.right.target, &z, false);

        // group cocone halves by their composite along the span legs
        let mut right_by_apex: BTreeMap<String, Vec<&GraphHom>> = BTreeMap::new();
        for h2 in &homs_r {
            let key = hom_key(&compose_homs(&sq.span.right, h2)?);
            right_by_apex.entry(key).or_default().push(h2);
        }
        for h1 in &homs_l {
            let key = hom_key(&compose_homs(&sq.span.left, h1)?);
            let Some(partners) = right_by_apex.get(&key) else {
                continue;
            };
            for h2 in partners {
                if mediator_count(sq, &z, h1, h2) != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;
    use crate::graph::are_isomorphic;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pt() -> Graph {
        Graph::from_parts(["u"], Vec::<(&str, &str, &str)>::new())
    }

    fn loop1() -> Graph {
        Graph::from_parts(["u"], [("loop", "u", "u")])
    }

    fn g3() -> Graph {
        Graph::from_parts(
            ["a", "b", "c"],
            [("e1", "a", "c"), ("e2", "b", "c"), ("e3", "c", "c")],
        )
    }

    fn h3() -> Graph {
        Graph::from_parts(["a", "b", "c"], [("e1", "a", "c"), ("e2", "b", "c")])
    }

    fn hom(src: &Graph, tgt: &Graph, nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> GraphHom {
        let h = GraphHom {
            source: src.clone(),
            target: tgt.clone(),
            node_map: nodes.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            edge_map: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        };
        assert!(h.is_valid(), "fixture hom invalid: {}", h.validate());
        h
    }

    /// Example 3.1 open-graph apexes.
    pub fn x1() -> Graph {
        Graph::from_parts(
            ["a", "b", "c", "d", "e"],
            [
                ("x1", "a", "b"),
                ("x2", "b", "d"),
                ("x3", "d", "a"),
                ("x4", "e", "d"),
                ("x5", "d", "c"),
                ("x6", "c", "b"),
            ],
        )
    }

    pub fn x2() -> Graph {
        Graph::from_parts(
            ["d", "e", "f"],
            [("y1", "d", "e"), ("y2", "e", "f"), ("y3", "f", "d")],
        )
    }

    #[test]
    fn coproduct_examples() {
        let r = coproduct(&pt(), &pt()).unwrap();
        assert_eq!(r.object.node_count(), 2);
        assert_eq!(r.object.edge_count(), 0);

        let r = coproduct(&g3(), &h3()).unwrap();
        assert_eq!(r.object.node_count(), 6);
        assert_eq!(r.object.edge_count(), 5);
        assert!(r.inj_left.classify().is_mono);
        assert!(r.inj_right.classify().is_mono);

        let r = coproduct(&Graph::empty(), &g3()).unwrap();
        assert!(are_isomorphic(&r.object, &g3()));
    }

    #[test]
    fn pushout_over_empty_apex_is_coproduct() {
        let p = pushout(&Span {
            apex: Graph::empty(),
            left: hom(&Graph::empty(), &g3(), &[], &[]),
            right: hom(&Graph::empty(), &h3(), &[], &[]),
        })
        .unwrap();
        assert_eq!(
            canonical_form(&p.object),
            canonical_form(&coproduct(&g3(), &h3()).unwrap().object)
        );
    }

    #[test]
    fn pushout_open_graph_composition() {
        // gluing the two open graphs over their shared nodes d, e
        let feet = Graph::discrete(["d".to_string(), "e".to_string()]);
        let span = Span {
            apex: feet.clone(),
            left: hom(&feet, &x1(), &[("d", "d"), ("e", "e")], &[]),
            right: hom(&feet, &x2(), &[("d", "d"), ("e", "e")], &[]),
        };
        let p = pushout(&span).unwrap();
        assert_eq!(p.object.node_count(), 6);
        assert_eq!(p.object.edge_count(), 9);
        assert!(verify_pushout(&CommutingSquare {
            span,
            cocone_left: p.inj_left.clone(),
            cocone_right: p.inj_right.clone(),
        })
        .unwrap());
    }

    #[test]
    fn pushout_identifies_along_non_mono_leg() {
        // oracle: hand-computed on a 2-node example; the right leg is
        // constant so the pushout merges the two nodes of the left side
        let two = Graph::discrete(["x".to_string(), "y".to_string()]);
        let apex = Graph::discrete(["k1".to_string(), "k2".to_string()]);
        let span = Span {
            apex: apex.clone(),
            left: hom(&apex, &two, &[("k1", "x"), ("k2", "y")], &[]),
            right: hom(&apex, &pt(), &[("k1", "u"), ("k2", "u")], &[]),
        };
        let p = pushout(&span).unwrap();
        assert_eq!(p.object.node_count(), 1);
        assert_eq!(p.inj_left.node_map["x"], p.inj_left.node_map["y"]);
    }

    #[test]
    fn mediator_is_unique_and_correct() {
        let feet = Graph::discrete(["d".to_string(), "e".to_string()]);
        let span = Span {
            apex: feet.clone(),
            left: hom(&feet, &x1(), &[("d", "d"), ("e", "e")], &[]),
            right: hom(&feet, &x2(), &[("d", "d"), ("e", "e")], &[]),
        };
        let p = pushout(&span).unwrap();
        let u = p.mediator(&p.inj_left, &p.inj_right).unwrap();
        assert!(u.classify().is_iso);
    }

    #[test]
    fn pullback_right_identity_gives_left() {
        let inc = hom(
            &h3(),
            &g3(),
            &[("a", "a"), ("b", "b"), ("c", "c")],
            &[("e1", "e1"), ("e2", "e2")],
        );
        let pb = pullback(&Cospan {
            apex: g3(),
            left: inc,
            right: GraphHom::identity(&g3()),
        })
        .unwrap();
        assert!(are_isomorphic(&pb.object, &h3()));
    }

    #[test]
    fn pullback_of_disjoint_inclusions() {
        // oracle: pairs agreeing at c, no common edges
        let h_inc = hom(
            &h3(),
            &g3(),
            &[("a", "a"), ("b", "b"), ("c", "c")],
            &[("e1", "e1"), ("e2", "e2")],
        );
        let loop_inc = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let pb = pullback(&Cospan {
            apex: g3(),
            left: h_inc,
            right: loop_inc,
        })
        .unwrap();
        assert_eq!(pb.object.node_count(), 1);
        assert_eq!(pb.object.edge_count(), 0);
    }

    #[test]
    fn pullback_over_terminal_is_product() {
        // oracle: 2-node discrete x 2-node discrete = 4 pairs; with one
        // edge each, the product has one edge pair
        let terminal = loop1();
        let a = Graph::from_parts(["p", "q"], [("e", "p", "q")]);
        let b = Graph::from_parts(["s", "t"], [("f", "s", "t")]);
        let to_t = |g: &Graph| GraphHom {
            source: g.clone(),
            target: terminal.clone(),
            node_map: g.nodes.iter().map(|n| (n.clone(), "u".to_string())).collect(),
            edge_map: g.edges.keys().map(|e| (e.clone(), "loop".to_string())).collect(),
        };
        let pb = pullback(&Cospan {
            apex: terminal.clone(),
            left: to_t(&a),
            right: to_t(&b),
        })
        .unwrap();
        assert_eq!(pb.object.node_count(), 4);
        assert_eq!(pb.object.edge_count(), 1);
        assert!(pb.proj_left.is_valid() && pb.proj_right.is_valid());
    }

    #[test]
    fn pullback_projections_mono_for_mono_legs() {
        let h_inc = hom(
            &h3(),
            &g3(),
            &[("a", "a"), ("b", "b"), ("c", "c")],
            &[("e1", "e1"), ("e2", "e2")],
        );
        let loop_inc = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let pb = pullback(&Cospan {
            apex: g3(),
            left: h_inc,
            right: loop_inc,
        })
        .unwrap();
        assert!(pb.proj_left.classify().is_mono);
        assert!(pb.proj_right.classify().is_mono);
    }

    #[test]
    fn gluing_examples() {
        // loop rule left leg at the only match into G3: both conditions hold
        let l_inc = hom(&pt(), &loop1(), &[("u", "u")], &[]);
        let m = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let report = gluing_check(&l_inc, &m).unwrap();
        assert!(report.ok());

        // deleting a node with incident edges dangles them
        let del_inc = hom(&Graph::empty(), &pt(), &[], &[]);
        let at_c = hom(&pt(), &g3(), &[("u", "c")], &[]);
        let report = gluing_check(&del_inc, &at_c).unwrap();
        assert!(report.identification_ok);
        assert!(!report.dangling_ok);
        assert_eq!(report.dangling_offenders, ["e1", "e2", "e3"]);

        // nothing deleted: monic match with k = l
        let report = gluing_check(&GraphHom::identity(&loop1()), &m).unwrap();
        assert!(report.ok());
    }

    #[test]
    fn complement_of_loop_rule_on_g3() {
        let l_inc = hom(&pt(), &loop1(), &[("u", "u")], &[]);
        let m = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let c = pushout_complement(&l_inc, &m).unwrap();
        assert_eq!(c.complement.node_count(), 3);
        assert_eq!(c.complement.edge_count(), 2);
        assert_eq!(canonical_form(&c.complement), canonical_form(&h3()));
        assert_eq!(c.to_complement.node_map["u"], "c");
    }

    #[test]
    fn complement_of_iso_is_whole_graph() {
        let m = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let c = pushout_complement(&GraphHom::identity(&loop1()), &m).unwrap();
        assert!(are_isomorphic(&c.complement, &g3()));
    }

    #[test]
    fn complement_rejects_dangling_deletion() {
        let del_inc = hom(&Graph::empty(), &pt(), &[], &[]);
        let at_c = hom(&pt(), &g3(), &[("u", "c")], &[]);
        match pushout_complement(&del_inc, &at_c) {
            Err(Error::GluingViolation(report)) => {
                assert!(!report.dangling_ok);
            }
            other => panic!("expected gluing violation, got {other:?}"),
        }
    }

    #[test]
    fn complement_round_trip() {
        let l_inc = hom(&pt(), &loop1(), &[("u", "u")], &[]);
        let m = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let c = pushout_complement(&l_inc, &m).unwrap();
        let p = pushout(&Span {
            apex: pt(),
            left: l_inc,
            right: c.to_complement.clone(),
        })
        .unwrap();
        assert!(are_isomorphic(&p.object, &g3()));
    }

    #[test]
    fn verify_accepts_constructed_pushouts() {
        let feet = Graph::discrete(["d".to_string(), "e".to_string()]);
        let span = Span {
            apex: feet.clone(),
            left: hom(&feet, &x1(), &[("d", "d"), ("e", "e")], &[]),
            right: hom(&feet, &x2(), &[("d", "d"), ("e", "e")], &[]),
        };
        let p = pushout(&span).unwrap();
        assert!(verify_pushout(&CommutingSquare {
            span,
            cocone_left: p.inj_left,
            cocone_right: p.inj_right,
        })
        .unwrap());
    }

    #[test]
    fn verify_rejects_unglued_union() {
        // same span, but the "pushout" is the plain disjoint union: the
        // square does not even commute, so the oracle must say no
        let feet = Graph::discrete(["d".to_string(), "e".to_string()]);
        let span = Span {
            apex: feet.clone(),
            left: hom(&feet, &x1(), &[("d", "d"), ("e", "e")], &[]),
            right: hom(&feet, &x2(), &[("d", "d"), ("e", "e")], &[]),
        };
        let dis = coproduct(&x1(), &x2()).unwrap();
        assert!(!verify_pushout(&CommutingSquare {
            span,
            cocone_left: dis.inj_left,
            cocone_right: dis.inj_right,
        })
        .unwrap());
    }

    #[test]
    fn verify_rejects_extra_node() {
        let feet = Graph::discrete(["d".to_string(), "e".to_string()]);
        let span = Span {
            apex: feet.clone(),
            left: hom(&feet, &x1(), &[("d", "d"), ("e", "e")], &[]),
            right: hom(&feet, &x2(), &[("d", "d"), ("e", "e")], &[]),
        };
        let p = pushout(&span).unwrap();
        let mut bigger = p.object.clone();
        bigger.nodes.insert("stray".into());
        let retarget = |h: &GraphHom| GraphHom {
            source: h.source.clone(),
            target: bigger.clone(),
            node_map: h.node_map.clone(),
            edge_map: h.edge_map.clone(),
        };
        assert!(!verify_pushout(&CommutingSquare {
            span,
            cocone_left: retarget(&p.inj_left),
            cocone_right: retarget(&p.inj_right),
        })
        .unwrap());
    }

    #[test]
    fn verify_accepts_paper_left_square() {
        // left pushout square of the worked loop-removal derivation
        let l_inc = hom(&pt(), &loop1(), &[("u", "u")], &[]);
        let m = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let c = pushout_complement(&l_inc, &m).unwrap();
        assert!(verify_pushout(&CommutingSquare {
            span: Span {
                apex: pt(),
                left: l_inc,
                right: c.to_complement.clone(),
            },
            cocone_left: m,
            cocone_right: c.inclusion.clone(),
        })
        .unwrap());
    }

    #[test]
    fn pushout_symmetric_in_legs() {
        let feet = Graph::discrete(["d".to_string(), "e".to_string()]);
        let left = hom(&feet, &x1(), &[("d", "d"), ("e", "e")], &[]);
        let right = hom(&feet, &x2(), &[("d", "d"), ("e", "e")], &[]);
        let p = pushout(&Span {
            apex: feet.clone(),
            left: left.clone(),
            right: right.clone(),
        })
        .unwrap();
        let q = pushout(&Span {
            apex: feet,
            left: right,
            right: left,
        })
        .unwrap();
        assert_eq!(canonical_form(&p.object), canonical_form(&q.object));
    }

    #[test]
    fn monos_stable_under_pushout() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..25 {
            let apex_n = rng.gen_range(1..=3);
            let apex = Graph::discrete((0..apex_n).map(|i| format!("k{i}")));
            let l_n = rng.gen_range(apex_n..=4);
            let left_obj = {
                let mut g = Graph::discrete((0..l_n).map(|i| format!("a{i}")));
                for i in 0..rng.gen_range(0..=3) {
                    let s = format!("a{}", rng.gen_range(0..l_n));
                    let t = format!("a{}", rng.gen_range(0..l_n));
                    g.edges.insert(format!("le{i}"), Edge { src: s, tgt: t });
                }
                g
            };
            let r_n = rng.gen_range(1..=4);
            let right_obj = {
                let mut g = Graph::discrete((0..r_n).map(|i| format!("b{i}")));
                for i in 0..rng.gen_range(0..=3) {
                    let s = format!("b{}", rng.gen_range(0..r_n));
                    let t = format!("b{}", rng.gen_range(0..r_n));
                    g.edges.insert(format!("re{i}"), Edge { src: s, tgt: t });
                }
                g
            };
            // left leg: mono on distinct targets; right leg: arbitrary
            let left = GraphHom {
                source: apex.clone(),
                target: left_obj.clone(),
                node_map: (0..apex_n).map(|i| (format!("k{i}"), format!("a{i}"))).collect(),
                edge_map: BTreeMap::new(),
            };
            let right = GraphHom {
                source: apex.clone(),
                target: right_obj.clone(),
                node_map: (0..apex_n)
                    .map(|i| (format!("k{i}"), format!("b{}", rng.gen_range(0..r_n))))
                    .collect(),
                edge_map: BTreeMap::new(),
            };
            let p = pushout(&Span {
                apex,
                left,
                right,
            })
            .unwrap();
            assert!(
                p.inj_right.classify().is_mono,
                "mono not preserved by pushout"
            );
        }
    }

    #[test]
    fn complements_unique_up_to_iso_small() {
        // exhaustive complement search on a small instance agrees with
        // the deletion formula up to iso
        let l_inc = hom(&pt(), &loop1(), &[("u", "u")], &[]);
        let m = hom(&loop1(), &g3(), &[("u", "c")], &[("loop", "e3")]);
        let formula = pushout_complement(&l_inc, &m).unwrap();
        let mut found = 0;
        for sub in crate::graph::all_subgraphs(&g3()) {
            let candidate = sub.to_graph();
            let inclusion = sub.inclusion();
            for to_candidate in enumerate_homs(&pt(), &candidate, false) {
                let sq = CommutingSquare {
                    span: Span {
                        apex: pt(),
                        left: l_inc.clone(),
                        right: to_candidate.clone(),
                    },
                    cocone_left: m.clone(),
                    cocone_right: inclusion.clone(),
                };
                if sq.commutes()
                    && certify_pushout_square(&sq.span, &sq.cocone_left, &sq.cocone_right).unwrap()
                {
                    found += 1;
                    assert!(are_isomorphic(&candidate, &formula.complement));
                }
            }
        }
        assert!(found >= 1);
    }
}
