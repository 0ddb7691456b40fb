//! Finite directed multigraphs, their homomorphisms, and subgraph lattices.
//!
//! Node and edge identifiers are opaque strings; equality is string
//! equality. Typing is optional: a typed graph carries total maps into a
//! named type graph, and an untyped graph behaves as if typed over the
//! terminal type graph (one node, one loop).

use crate::error::Error;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type NodeId = String;
pub type EdgeId = String;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub src: NodeId,
    pub tgt: NodeId,
}

/// Type assignment into a named type graph. The maps must form a graph
/// homomorphism into the type graph; [`Graph::validate_against`] checks
/// that part when the type graph is at hand.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Typing {
    pub type_graph: String,
    pub node_types: BTreeMap<NodeId, NodeId>,
    pub edge_types: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Graph {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeMap<EdgeId, Edge>,
    pub typing: Option<Typing>,
}

/// Report-style validation output: empty means every invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

impl Graph {
    pub fn empty() -> Graph {
        Graph::default()
    }

    /// Discrete graph on the given node set.
    pub fn discrete<I: IntoIterator<Item = NodeId>>(nodes: I) -> Graph {
        Graph {
            nodes: nodes.into_iter().collect(),
            edges: BTreeMap::new(),
            typing: None,
        }
    }

    /// Convenience builder from literal parts; does not validate.
    pub fn from_parts(
        nodes: impl IntoIterator<Item = impl Into<NodeId>>,
        edges: impl IntoIterator<Item = (impl Into<EdgeId>, impl Into<NodeId>, impl Into<NodeId>)>,
    ) -> Graph {
        Graph {
            nodes: nodes.into_iter().map(Into::into).collect(),
            edges: edges
                .into_iter()
                .map(|(id, s, t)| {
                    (
                        id.into(),
                        Edge {
                            src: s.into(),
                            tgt: t.into(),
                        },
                    )
                })
                .collect(),
            typing: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Type label of a node; `None` when the graph is untyped (terminal
    /// type graph, a single node type).
    pub fn node_type(&self, n: &str) -> Option<&str> {
        self.typing
            .as_ref()
            .and_then(|t| t.node_types.get(n).map(String::as_str))
    }

    pub fn edge_type(&self, e: &str) -> Option<&str> {
        self.typing
            .as_ref()
            .and_then(|t| t.edge_types.get(e).map(String::as_str))
    }

    pub fn type_graph_name(&self) -> Option<&str> {
        self.typing.as_ref().map(|t| t.type_graph.as_str())
    }

    /// Structural validation. The homomorphism condition on the typing
    /// maps needs the type graph itself; see [`Graph::validate_against`].
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (id, e) in &self.edges {
            if !self.nodes.contains(&e.src) {
                report
                    .violations
                    .push(format!("edge {id}: source {} missing", e.src));
            }
            if !self.nodes.contains(&e.tgt) {
                report
                    .violations
                    .push(format!("edge {id}: target {} missing", e.tgt));
            }
        }
        if let Some(t) = &self.typing {
            for n in &self.nodes {
                if !t.node_types.contains_key(n) {
                    report.violations.push(format!("node {n}: no type assigned"));
                }
            }
            for extra in t.node_types.keys().filter(|n| !self.nodes.contains(*n)) {
                report
                    .violations
                    .push(format!("typing names unknown node {extra}"));
            }
            for e in self.edges.keys() {
                if !t.edge_types.contains_key(e) {
                    report.violations.push(format!("edge {e}: no type assigned"));
                }
            }
            for extra in t.edge_types.keys().filter(|e| !self.edges.contains_key(*e)) {
                report
                    .violations
                    .push(format!("typing names unknown edge {extra}"));
            }
        }
        report
    }

    /// Full validation against the fixed type graph of the run.
    pub fn validate_against(&self, type_graph: &Graph) -> ValidationReport {
        let mut report = self.validate();
        if let Some(t) = &self.typing {
            for (n, tn) in &t.node_types {
                if !type_graph.nodes.contains(tn) {
                    report
                        .violations
                        .push(format!("node {n}: type {tn} not in type graph"));
                }
            }
            for (id, te) in &t.edge_types {
                match (self.edges.get(id), type_graph.edges.get(te)) {
                    (Some(e), Some(type_edge)) => {
                        if t.node_types.get(&e.src) != Some(&type_edge.src) {
                            report.violations.push(format!(
                                "edge {id}: typing does not commute with source"
                            ));
                        }
                        if t.node_types.get(&e.tgt) != Some(&type_edge.tgt) {
                            report.violations.push(format!(
                                "edge {id}: typing does not commute with target"
                            ));
                        }
                    }
                    (Some(_), None) => report
                        .violations
                        .push(format!("edge {id}: type {te} not in type graph")),
                    _ => {}
                }
            }
        }
        report
    }

    pub fn out_degree(&self, n: &str) -> usize {
        self.edges.values().filter(|e| e.src == n).count()
    }

    pub fn in_degree(&self, n: &str) -> usize {
        self.edges.values().filter(|e| e.tgt == n).count()
    }

    /// Edges incident to a node (as source or target).
    pub fn incident_edges<'a>(&'a self, n: &'a str) -> impl Iterator<Item = &'a EdgeId> {
        self.edges
            .iter()
            .filter(move |(_, e)| e.src == n || e.tgt == n)
            .map(|(id, _)| id)
    }

    /// Rename every node and edge id through the given injective maps.
    /// Ids not mentioned are kept.
    pub fn relabeled(
        &self,
        node_names: &BTreeMap<NodeId, NodeId>,
        edge_names: &BTreeMap<EdgeId, EdgeId>,
    ) -> Graph {
        let ren_n = |n: &NodeId| node_names.get(n).unwrap_or(n).clone();
        let ren_e = |e: &EdgeId| edge_names.get(e).unwrap_or(e).clone();
        Graph {
            nodes: self.nodes.iter().map(&ren_n).collect(),
            edges: self
                .edges
                .iter()
                .map(|(id, e)| {
                    (
                        ren_e(id),
                        Edge {
                            src: ren_n(&e.src),
                            tgt: ren_n(&e.tgt),
                        },
                    )
                })
                .collect(),
            typing: self.typing.as_ref().map(|t| Typing {
                type_graph: t.type_graph.clone(),
                node_types: t.node_types.iter().map(|(n, v)| (ren_n(n), v.clone())).collect(),
                edge_types: t.edge_types.iter().map(|(e, v)| (ren_e(e), v.clone())).collect(),
            }),
        }
    }
}

/// A structure- and type-preserving map between graphs. Owns copies of
/// its endpoints so values stay self-contained.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphHom {
    pub source: Graph,
    pub target: Graph,
    pub node_map: BTreeMap<NodeId, NodeId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomClass {
    pub is_mono: bool,
    pub is_epi: bool,
    pub is_iso: bool,
}

impl GraphHom {
    pub fn identity(g: &Graph) -> GraphHom {
        GraphHom {
            source: g.clone(),
            target: g.clone(),
            node_map: g.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
            edge_map: g.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
        }
    }

    pub fn apply_node(&self, n: &str) -> Option<&NodeId> {
        self.node_map.get(n)
    }

    pub fn apply_edge(&self, e: &str) -> Option<&EdgeId> {
        self.edge_map.get(e)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for n in &self.source.nodes {
            match self.node_map.get(n) {
                None => report.violations.push(format!("node {n}: unmapped")),
                Some(m) if !self.target.nodes.contains(m) => report
                    .violations
                    .push(format!("node {n}: image {m} not in target")),
                _ => {}
            }
        }
        for (id, e) in &self.source.edges {
            match self.edge_map.get(id) {
                None => report.violations.push(format!("edge {id}: unmapped")),
                Some(m) => match self.target.edges.get(m) {
                    None => report
                        .violations
                        .push(format!("edge {id}: image {m} not in target")),
                    Some(te) => {
                        if self.node_map.get(&e.src) != Some(&te.src) {
                            report
                                .violations
                                .push(format!("edge {id}: does not commute with source"));
                        }
                        if self.node_map.get(&e.tgt) != Some(&te.tgt) {
                            report
                                .violations
                                .push(format!("edge {id}: does not commute with target"));
                        }
                    }
                },
            }
        }
        // type preservation applies only when both sides are typed over
        // the same type graph
        if let (Some(st), Some(tt)) = (&self.source.typing, &self.target.typing) {
            if st.type_graph == tt.type_graph {
                for (n, m) in &self.node_map {
                    if st.node_types.get(n) != tt.node_types.get(m) {
                        report
                            .violations
                            .push(format!("node {n}: type not preserved"));
                    }
                }
                for (e, m) in &self.edge_map {
                    if st.edge_types.get(e) != tt.edge_types.get(m) {
                        report
                            .violations
                            .push(format!("edge {e}: type not preserved"));
                    }
                }
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    pub fn classify(&self) -> HomClass {
        let node_images: BTreeSet<_> = self.node_map.values().collect();
        let edge_images: BTreeSet<_> = self.edge_map.values().collect();
        let is_mono =
            node_images.len() == self.node_map.len() && edge_images.len() == self.edge_map.len();
        let is_epi = node_images.len() == self.target.nodes.len()
            && edge_images.len() == self.target.edges.len();
        HomClass {
            is_mono,
            is_epi,
            is_iso: is_mono && is_epi,
        }
    }

    /// Inverse of an iso.
    pub fn invert(&self) -> Result<GraphHom, Error> {
        if !self.classify().is_iso {
            return Err(Error::Invalid("hom is not an isomorphism".into()));
        }
        Ok(GraphHom {
            source: self.target.clone(),
            target: self.source.clone(),
            node_map: self.node_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            edge_map: self.edge_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        })
    }
}

/// Compose two homs: `f` then `g`.
pub fn compose_homs(f: &GraphHom, g: &GraphHom) -> Result<GraphHom, Error> {
    if f.target != g.source {
        return Err(Error::EndpointMismatch);
    }
    let node_map = f
        .node_map
        .iter()
        .map(|(a, b)| {
            g.node_map
                .get(b)
                .map(|c| (a.clone(), c.clone()))
                .ok_or(Error::EndpointMismatch)
        })
        .collect::<Result<_, _>>()?;
    let edge_map = f
        .edge_map
        .iter()
        .map(|(a, b)| {
            g.edge_map
                .get(b)
                .map(|c| (a.clone(), c.clone()))
                .ok_or(Error::EndpointMismatch)
        })
        .collect::<Result<_, _>>()?;
    Ok(GraphHom {
        source: f.source.clone(),
        target: g.target.clone(),
        node_map,
        edge_map,
    })
}

pub fn classify_hom(f: &GraphHom) -> HomClass {
    f.classify()
}

fn types_compatible(g: &Graph, h: &Graph, gt: Option<&str>, ht: Option<&str>) -> bool {
    match (g.type_graph_name(), h.type_graph_name()) {
        (Some(a), Some(b)) if a == b => gt == ht,
        _ => true,
    }
}

/// Exhaustively enumerate all homomorphisms `g -> h` (monic ones when
/// `mono_only`), in lexicographic order over sorted node and edge ids.
pub fn enumerate_homs(g: &Graph, h: &Graph, mono_only: bool) -> Vec<GraphHom> {
    let src_nodes: Vec<&NodeId> = g.nodes.iter().collect();
    let tgt_nodes: Vec<&NodeId> = h.nodes.iter().collect();
    let src_edges: Vec<(&EdgeId, &Edge)> = g.edges.iter().collect();

    let mut out = Vec::new();
    let mut node_assign: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut used_nodes: BTreeSet<NodeId> = BTreeSet::new();

    // candidate target edges per source edge, given a full node assignment
    fn edge_candidates<'h>(
        g: &Graph,
        h: &'h Graph,
        e: &Edge,
        ety: Option<&str>,
        node_assign: &BTreeMap<NodeId, NodeId>,
    ) -> Vec<&'h EdgeId> {
        let (Some(s), Some(t)) = (node_assign.get(&e.src), node_assign.get(&e.tgt)) else {
            return Vec::new();
        };
        h.edges
            .iter()
            .filter(|(id, he)| {
                he.src == *s && he.tgt == *t && types_compatible(g, h, ety, h.edge_type(id))
            })
            .map(|(id, _)| id)
            .collect()
    }

    fn assign_edges(
        g: &Graph,
        h: &Graph,
        src_edges: &[(&EdgeId, &Edge)],
        idx: usize,
        mono_only: bool,
        node_assign: &BTreeMap<NodeId, NodeId>,
        edge_assign: &mut BTreeMap<EdgeId, EdgeId>,
        used_edges: &mut BTreeSet<EdgeId>,
        out: &mut Vec<GraphHom>,
    ) {
        if idx == src_edges.len() {
            out.push(GraphHom {
                source: g.clone(),
                target: h.clone(),
                node_map: node_assign.clone(),
                edge_map: edge_assign.clone(),
            });
            return;
        }
        let (id, e) = src_edges[idx];
        for cand in edge_candidates(g, h, e, g.edge_type(id), node_assign) {
            if mono_only && used_edges.contains(cand) {
                continue;
            }
            edge_assign.insert(id.clone(), cand.clone());
            used_edges.insert(cand.clone());
            assign_edges(
                g, h, src_edges, idx + 1, mono_only, node_assign, edge_assign, used_edges, out,
            );
            used_edges.remove(cand);
            edge_assign.remove(id);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_nodes(
        g: &Graph,
        h: &Graph,
        src_nodes: &[&NodeId],
        tgt_nodes: &[&NodeId],
        src_edges: &[(&EdgeId, &Edge)],
        idx: usize,
        mono_only: bool,
        node_assign: &mut BTreeMap<NodeId, NodeId>,
        used_nodes: &mut BTreeSet<NodeId>,
        out: &mut Vec<GraphHom>,
    ) {
        if idx == src_nodes.len() {
            // every source edge must have at least one candidate
            if src_edges
                .iter()
                .all(|(id, e)| !edge_candidates(g, h, e, g.edge_type(id), node_assign).is_empty())
            {
                let mut edge_assign = BTreeMap::new();
                let mut used_edges = BTreeSet::new();
                assign_edges(
                    g,
                    h,
                    src_edges,
                    0,
                    mono_only,
                    node_assign,
                    &mut edge_assign,
                    &mut used_edges,
                    out,
                );
            }
            return;
        }
        let n = src_nodes[idx];
        for cand in tgt_nodes {
            if mono_only && used_nodes.contains(*cand) {
                continue;
            }
            if !types_compatible(g, h, g.node_type(n), h.node_type(cand)) {
                continue;
            }
            node_assign.insert((*n).clone(), (*cand).clone());
            // prune: edges whose endpoints are both assigned need a candidate
            let consistent = g.edges.iter().all(|(id, e)| {
                if node_assign.contains_key(&e.src) && node_assign.contains_key(&e.tgt) {
                    !edge_candidates(g, h, e, g.edge_type(id), node_assign).is_empty()
                } else {
                    true
                }
            });
            if consistent {
                used_nodes.insert((*cand).clone());
                assign_nodes(
                    g, h, src_nodes, tgt_nodes, src_edges, idx + 1, mono_only, node_assign,
                    used_nodes, out,
                );
                used_nodes.remove(*cand);
            }
            node_assign.remove(n.as_str());
        }
    }

    assign_nodes(
        g,
        h,
        &src_nodes,
        &tgt_nodes,
        &src_edges,
        0,
        mono_only,
        &mut node_assign,
        &mut used_nodes,
        &mut out,
    );
    out
}

/// First isomorphism `g -> h` extending the forced node assignments, if
/// any. Edge bijections are paired per parallel class, so bundles of
/// interchangeable edges cost nothing.
pub fn find_iso_with(
    g: &Graph,
    h: &Graph,
    forced: &BTreeMap<NodeId, NodeId>,
) -> Option<GraphHom> {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let key = |gr: &Graph, n: &str| {
        (
            gr.out_degree(n),
            gr.in_degree(n),
            gr.node_type(n).unwrap_or("").to_string(),
        )
    };
    let src_nodes: Vec<&NodeId> = g.nodes.iter().collect();

    fn edge_classes(gr: &Graph) -> BTreeMap<(NodeId, NodeId, String), usize> {
        let mut out = BTreeMap::new();
        for (id, e) in &gr.edges {
            *out.entry((
                e.src.clone(),
                e.tgt.clone(),
                gr.edge_type(id).unwrap_or("").to_string(),
            ))
            .or_insert(0) += 1;
        }
        out
    }

    fn extend(
        g: &Graph,
        h: &Graph,
        src_nodes: &[&NodeId],
        idx: usize,
        assign: &mut BTreeMap<NodeId, NodeId>,
        used: &mut BTreeSet<NodeId>,
        forced: &BTreeMap<NodeId, NodeId>,
        key: &dyn Fn(&Graph, &str) -> (usize, usize, String),
    ) -> Option<BTreeMap<NodeId, NodeId>> {
        if idx == src_nodes.len() {
            // node map fixed: an edge bijection exists iff every parallel
            // class matches in size
            let mut image_classes: BTreeMap<(NodeId, NodeId, String), usize> = BTreeMap::new();
            for (id, e) in &g.edges {
                *image_classes
                    .entry((
                        assign[&e.src].clone(),
                        assign[&e.tgt].clone(),
                        g.edge_type(id).unwrap_or("").to_string(),
                    ))
                    .or_insert(0) += 1;
            }
            if image_classes == edge_classes(h) {
                return Some(assign.clone());
            }
            return None;
        }
        let n = src_nodes[idx];
        let candidates: Vec<NodeId> = match forced.get(n) {
            Some(f) => vec![f.clone()],
            None => h.nodes.iter().cloned().collect(),
        };
        for cand in candidates {
            if used.contains(&cand) || key(g, n) != key(h, &cand) {
                continue;
            }
            assign.insert(n.clone(), cand.clone());
            used.insert(cand.clone());
            if let Some(found) = extend(g, h, src_nodes, idx + 1, assign, used, forced, key) {
                return Some(found);
            }
            used.remove(&cand);
            assign.remove(n);
        }
        None
    }

    let mut assign = BTreeMap::new();
    let mut used = BTreeSet::new();
    let node_map = extend(g, h, &src_nodes, 0, &mut assign, &mut used, forced, &key)?;

    // pair edges within each parallel class in sorted order
    let mut buckets: BTreeMap<(NodeId, NodeId, String), Vec<EdgeId>> = BTreeMap::new();
    for (id, e) in &h.edges {
        buckets
            .entry((
                e.src.clone(),
                e.tgt.clone(),
                h.edge_type(id).unwrap_or("").to_string(),
            ))
            .or_default()
            .push(id.clone());
    }
    let mut edge_map = BTreeMap::new();
    for (id, e) in &g.edges {
        let bucket = buckets.get_mut(&(
            node_map[&e.src].clone(),
            node_map[&e.tgt].clone(),
            g.edge_type(id).unwrap_or("").to_string(),
        ))?;
        edge_map.insert(id.clone(), bucket.pop()?);
    }
    let iso = GraphHom {
        source: g.clone(),
        target: h.clone(),
        node_map,
        edge_map,
    };
    debug_assert!(iso.is_valid() && iso.classify().is_iso);
    Some(iso)
}

/// Enumerate isomorphisms `g -> h`.
pub fn enumerate_isos(g: &Graph, h: &Graph) -> Vec<GraphHom> {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return Vec::new();
    }
    enumerate_homs(g, h, true)
        .into_iter()
        .filter(|f| f.classify().is_iso)
        .collect()
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    crate::canon::canonical_form(g) == crate::canon::canonical_form(h)
}

/// A subgraph of an ambient graph: node and edge subsets closed under
/// endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgraph {
    pub ambient: Graph,
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Subgraph {
    pub fn full(ambient: &Graph) -> Subgraph {
        Subgraph {
            ambient: ambient.clone(),
            nodes: ambient.nodes.clone(),
            edges: ambient.edges.keys().cloned().collect(),
        }
    }

    pub fn empty(ambient: &Graph) -> Subgraph {
        Subgraph {
            ambient: ambient.clone(),
            nodes: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for n in &self.nodes {
            if !self.ambient.nodes.contains(n) {
                report.violations.push(format!("node {n} not in ambient"));
            }
        }
        for e in &self.edges {
            match self.ambient.edges.get(e) {
                None => report.violations.push(format!("edge {e} not in ambient")),
                Some(edge) => {
                    if !self.nodes.contains(&edge.src) || !self.nodes.contains(&edge.tgt) {
                        report
                            .violations
                            .push(format!("edge {e}: endpoint outside node subset"));
                    }
                }
            }
        }
        report
    }

    /// The subgraph realized as a graph in its own right, with typing
    /// restricted from the ambient graph.
    pub fn to_graph(&self) -> Graph {
        Graph {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .filter_map(|e| self.ambient.edges.get(e).map(|edge| (e.clone(), edge.clone())))
                .collect(),
            typing: self.ambient.typing.as_ref().map(|t| Typing {
                type_graph: t.type_graph.clone(),
                node_types: t
                    .node_types
                    .iter()
                    .filter(|(n, _)| self.nodes.contains(*n))
                    .map(|(n, v)| (n.clone(), v.clone()))
                    .collect(),
                edge_types: t
                    .edge_types
                    .iter()
                    .filter(|(e, _)| self.edges.contains(*e))
                    .map(|(e, v)| (e.clone(), v.clone()))
                    .collect(),
            }),
        }
    }

    /// Inclusion hom of this subgraph into its ambient graph.
    pub fn inclusion(&self) -> GraphHom {
        GraphHom {
            source: self.to_graph(),
            target: self.ambient.clone(),
            node_map: self.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
            edge_map: self.edges.iter().map(|e| (e.clone(), e.clone())).collect(),
        }
    }
}

/// Pointwise intersection in the subobject lattice.
pub fn lattice_meet(a: &Subgraph, b: &Subgraph) -> Result<Subgraph, Error> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch);
    }
    Ok(Subgraph {
        ambient: a.ambient.clone(),
        nodes: a.nodes.intersection(&b.nodes).cloned().collect(),
        edges: a.edges.intersection(&b.edges).cloned().collect(),
    })
}

/// Pointwise union in the subobject lattice.
pub fn lattice_join(a: &Subgraph, b: &Subgraph) -> Result<Subgraph, Error> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch);
    }
    Ok(Subgraph {
        ambient: a.ambient.clone(),
        nodes: a.nodes.union(&b.nodes).cloned().collect(),
        edges: a.edges.union(&b.edges).cloned().collect(),
    })
}

/// All subgraphs of an ambient graph, smallest first. Exponential; meant
/// for desk-scale exhaustive checks.
pub fn all_subgraphs(ambient: &Graph) -> Vec<Subgraph> {
    let nodes: Vec<&NodeId> = ambient.nodes.iter().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << nodes.len()) {
        let node_set: BTreeSet<NodeId> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, n)| (*n).clone())
            .collect();
        let candidate_edges: Vec<&EdgeId> = ambient
            .edges
            .iter()
            .filter(|(_, e)| node_set.contains(&e.src) && node_set.contains(&e.tgt))
            .map(|(id, _)| id)
            .collect();
        for emask in 0u64..(1 << candidate_edges.len()) {
            let edge_set: BTreeSet<EdgeId> = candidate_edges
                .iter()
                .enumerate()
                .filter(|(i, _)| emask & (1 << i) != 0)
                .map(|(_, e)| (*e).clone())
                .collect();
            out.push(Subgraph {
                ambient: ambient.clone(),
                nodes: node_set.clone(),
                edges: edge_set,
            });
        }
    }
    out
}
