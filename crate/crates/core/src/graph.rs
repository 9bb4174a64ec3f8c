//! Finite multigraphs carrying a real structure.
//!
//! A real structure is a pair of involutions on vertices and edges that is
//! compatible with incidence. Loops and parallel edges are allowed. Vertex
//! and edge ids are opaque strings; internally every id is replaced by its
//! position in sorted id order, so all iteration is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::calculus::DisjointSets;
use crate::error::{Error, Result};

/// Edge record of the JSON interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: String,
    pub ends: [String; 2],
    /// Rational length `"p/q"`; only present in metric graphs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<String>,
    /// `"reflected"` for fixed edges between conjugate vertices of a metric graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

/// The JSON interchange format, before validation.
///
/// Omitted `sigma_v` / `sigma_e` entries default to the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<RawEdge>,
    #[serde(default)]
    pub sigma_v: BTreeMap<String, String>,
    #[serde(default)]
    pub sigma_e: BTreeMap<String, String>,
}

impl RawGraph {
    pub fn add_vertex(&mut self, id: impl Into<String>) {
        self.vertices.push(id.into());
    }

    pub fn add_edge(&mut self, id: impl Into<String>, a: impl Into<String>, b: impl Into<String>) {
        self.edges.push(RawEdge { id: id.into(), ends: [a.into(), b.into()], length: None, kind: None });
    }

    /// Declare `x` and `y` conjugate (both directions).
    pub fn conj_vertices(&mut self, x: impl Into<String>, y: impl Into<String>) {
        let (x, y) = (x.into(), y.into());
        self.sigma_v.insert(x.clone(), y.clone());
        self.sigma_v.insert(y, x);
    }

    pub fn conj_edges(&mut self, x: impl Into<String>, y: impl Into<String>) {
        let (x, y) = (x.into(), y.into());
        self.sigma_e.insert(x.clone(), y.clone());
        self.sigma_e.insert(y, x);
    }
}

/// A validated connected multigraph with a real structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealGraph {
    vertex_ids: Vec<String>,
    edge_ids: Vec<String>,
    ends: Vec<(usize, usize)>,
    sigma_v: Vec<usize>,
    sigma_e: Vec<usize>,
    vertex_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    incident: Vec<Vec<usize>>,
}

/// Check every real-structure axiom and build the graph.
pub fn validate(raw: &RawGraph) -> Result<RealGraph> {
    RealGraph::from_raw(raw)
}

fn index_ids<'a>(
    kind: &'static str,
    ids: impl Iterator<Item = &'a String>,
) -> Result<(Vec<String>, BTreeMap<String, usize>)> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId { kind, id: id.clone() });
        }
    }
    let sorted: Vec<String> = seen.into_iter().collect();
    let index = sorted.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    Ok((sorted, index))
}

fn build_involution(
    map_name: &'static str,
    ids: &[String],
    index: &BTreeMap<String, usize>,
    raw: &BTreeMap<String, String>,
) -> Result<Vec<usize>> {
    let mut sigma: Vec<usize> = (0..ids.len()).collect();
    for (k, v) in raw {
        let ki = *index.get(k).ok_or_else(|| Error::UnknownId { map: map_name, id: k.clone() })?;
        let vi = *index.get(v).ok_or_else(|| Error::UnknownId { map: map_name, id: v.clone() })?;
        sigma[ki] = vi;
    }
    for (i, &j) in sigma.iter().enumerate() {
        if sigma[j] != i {
            return Err(Error::NotInvolutive { map: map_name, element: ids[i].clone(), image: ids[j].clone() });
        }
    }
    Ok(sigma)
}

impl RealGraph {
    pub fn from_raw(raw: &RawGraph) -> Result<Self> {
        if raw.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let (vertex_ids, vertex_index) = index_ids("vertex", raw.vertices.iter())?;
        let (edge_ids, edge_index) = index_ids("edge", raw.edges.iter().map(|e| &e.id))?;

        let mut ends = vec![(0, 0); edge_ids.len()];
        for e in &raw.edges {
            let lookup = |v: &String| {
                vertex_index
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::DanglingIncidence { edge: e.id.clone(), vertex: v.clone() })
            };
            ends[edge_index[&e.id]] = (lookup(&e.ends[0])?, lookup(&e.ends[1])?);
        }

        let sigma_v = build_involution("sigma_v", &vertex_ids, &vertex_index, &raw.sigma_v)?;
        let sigma_e = build_involution("sigma_e", &edge_ids, &edge_index, &raw.sigma_e)?;

        for (e, &(a, b)) in ends.iter().enumerate() {
            let (c, d) = ends[sigma_e[e]];
            let (sa, sb) = (sigma_v[a], sigma_v[b]);
            let same = (sa == c && sb == d) || (sa == d && sb == c);
            if !same {
                return Err(Error::IncompatibleInvolution { edge: edge_ids[e].clone() });
            }
        }

        let mut incident = vec![Vec::new(); vertex_ids.len()];
        for (e, &(a, b)) in ends.iter().enumerate() {
            incident[a].push(e);
            if b != a {
                incident[b].push(e);
            }
        }

        let g = RealGraph { vertex_ids, edge_ids, ends, sigma_v, sigma_e, vertex_index, edge_index, incident };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let mut sets = DisjointSets::new(self.n_vertices());
        for &(a, b) in &self.ends {
            sets.union(a, b);
        }
        let root = sets.find(0);
        if let Some(v) = (0..self.n_vertices()).find(|&v| sets.find(v) != root) {
            return Err(Error::Disconnected { root: self.vertex_ids[0].clone(), vertex: self.vertex_ids[v].clone() });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawGraph = serde_json::from_str(text)?;
        Self::from_raw(&raw)
    }

    /// Interchange form with vertices and edges in sorted id order and
    /// explicit (total) involution maps.
    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self.vertex_ids.clone(),
            edges: (0..self.n_edges())
                .map(|e| {
                    let (a, b) = self.ends[e];
                    RawEdge {
                        id: self.edge_ids[e].clone(),
                        ends: [self.vertex_ids[a].clone(), self.vertex_ids[b].clone()],
                        length: None,
                        kind: None,
                    }
                })
                .collect(),
            sigma_v: (0..self.n_vertices())
                .map(|v| (self.vertex_ids[v].clone(), self.vertex_ids[self.sigma_v[v]].clone()))
                .collect(),
            sigma_e: (0..self.n_edges())
                .map(|e| (self.edge_ids[e].clone(), self.edge_ids[self.sigma_e[e]].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("graph serialization cannot fail")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("graph serialization cannot fail")
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edge_ids[e]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.edge_ids
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Ends of `e` in stored order; equal for a loop.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.ends[e];
        a == b
    }

    /// Edges incident to `v`; a loop is listed once.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// The end of `e` opposite to `v` (`v` itself for loops).
    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn conj_vertex(&self, v: usize) -> usize {
        self.sigma_v[v]
    }

    pub fn conj_edge(&self, e: usize) -> usize {
        self.sigma_e[e]
    }

    pub fn is_real_vertex(&self, v: usize) -> bool {
        self.sigma_v[v] == v
    }

    pub fn is_real_edge(&self, e: usize) -> bool {
        self.sigma_e[e] == e
    }

    /// A real edge with at least one non-real end (its ends are then a
    /// conjugate pair).
    pub fn is_isolated_real_edge(&self, e: usize) -> bool {
        let (a, b) = self.ends[e];
        self.is_real_edge(e) && !(self.is_real_vertex(a) && self.is_real_vertex(b))
    }

    pub fn real_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_vertices()).filter(|&v| self.is_real_vertex(v))
    }

    /// Valence with loops counted twice.
    pub fn valence(&self, v: usize) -> i64 {
        self.incident[v].iter().map(|&e| if self.is_loop(e) { 2 } else { 1 }).sum()
    }

    /// `1 + e(G) - v(G)`; the graph is connected.
    pub fn genus(&self) -> i64 {
        1 + self.n_edges() as i64 - self.n_vertices() as i64
    }

    /// The identity map on the same underlying graph.
    pub fn with_trivial_structure(&self) -> RealGraph {
        let mut g = self.clone();
        g.sigma_v = (0..self.n_vertices()).collect();
        g.sigma_e = (0..self.n_edges()).collect();
        g
    }
}

/// A subgraph of some [`RealGraph`], given by sorted vertex and edge indices
/// into the parent graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Genus `c + e - v` (zero for the empty subgraph).
    pub fn genus(&self, g: &RealGraph) -> i64 {
        self.to_multigraph(g).genus()
    }

    /// Whether every edge has both ends inside the vertex set.
    pub fn is_well_formed(&self, g: &RealGraph) -> bool {
        self.edges.iter().all(|&e| {
            let (a, b) = g.ends(e);
            self.contains_vertex(a) && self.contains_vertex(b)
        })
    }

    /// Relabel into a standalone multigraph; vertex `i` of the result is
    /// `self.vertices[i]`.
    pub fn to_multigraph(&self, g: &RealGraph) -> crate::calculus::Multigraph {
        let pos: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges
            .iter()
            .map(|&e| {
                let (a, b) = g.ends(e);
                (pos[&a], pos[&b])
            })
            .collect();
        crate::calculus::Multigraph::new(self.vertices.len(), edges)
    }

    pub fn vertex_ids(&self, g: &RealGraph) -> Vec<String> {
        self.vertices.iter().map(|&v| g.vertex_id(v).to_owned()).collect()
    }

    pub fn edge_ids(&self, g: &RealGraph) -> Vec<String> {
        self.edges.iter().map(|&e| g.edge_id(e).to_owned()).collect()
    }
}

/// Real vertices together with the non-isolated real edges.
pub fn real_locus(g: &RealGraph) -> Subgraph {
    Subgraph {
        vertices: g.real_vertices().collect(),
        edges: (0..g.n_edges()).filter(|&e| g.is_real_edge(e) && !g.is_isolated_real_edge(e)).collect(),
    }
}

/// Connected components of the real locus, ordered by least vertex index.
pub fn real_locus_components(g: &RealGraph) -> Vec<Subgraph> {
    let locus = real_locus(g);
    let mut sets = DisjointSets::new(g.n_vertices());
    for &e in &locus.edges {
        let (a, b) = g.ends(e);
        sets.union(a, b);
    }
    let mut by_root: BTreeMap<usize, Subgraph> = BTreeMap::new();
    let mut order = Vec::new();
    for &v in &locus.vertices {
        let r = sets.find(v);
        by_root.entry(r).or_insert_with(|| {
            order.push(r);
            Subgraph::default()
        });
        by_root.get_mut(&r).unwrap().vertices.push(v);
    }
    for &e in &locus.edges {
        let r = sets.find(g.ends(e).0);
        by_root.get_mut(&r).unwrap().edges.push(e);
    }
    order.into_iter().map(|r| by_root.remove(&r).unwrap()).collect()
}

/// The numbers g, s', e^i, s and a of a graph with real structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub genus: i64,
    pub s_prime: i64,
    pub isolated_real_edge_count: i64,
    pub s: i64,
    pub a: u8,
    pub components_of_real_locus: Vec<Subgraph>,
}

impl InvariantReport {
    /// Every violated constraint among: s ≡ g+1 (mod 2), 0 ≤ s ≤ g+1,
    /// a=1 ⇒ s ≤ g−1, a=0 ⇒ s ≥ 1.
    pub fn bound_violations(&self) -> Vec<String> {
        let (g, s) = (self.genus, self.s);
        let mut out = Vec::new();
        if (s - g - 1).rem_euclid(2) != 0 {
            out.push(format!("parity: s={s} g={g}"));
        }
        if s < 0 || s > g + 1 {
            out.push(format!("range: s={s} g={g}"));
        }
        if self.a == 1 && s > g - 1 {
            out.push(format!("a=1 but s={s} > g-1={}", g - 1));
        }
        if self.a == 0 && s < 1 {
            out.push(format!("a=0 but s={s}"));
        }
        out
    }

    pub fn bounds_hold(&self) -> bool {
        self.bound_violations().is_empty()
    }

    /// `(g, s, a)`.
    pub fn triple(&self) -> (i64, i64, u8) {
        (self.genus, self.s, self.a)
    }
}

/// Whether some non-real vertex reaches its conjugate avoiding every real
/// vertex and every real edge.
pub fn conjugate_connected(g: &RealGraph) -> bool {
    let mut sets = DisjointSets::new(g.n_vertices());
    for e in 0..g.n_edges() {
        let (a, b) = g.ends(e);
        if !g.is_real_edge(e) && !g.is_real_vertex(a) && !g.is_real_vertex(b) {
            sets.union(a, b);
        }
    }
    (0..g.n_vertices()).any(|v| !g.is_real_vertex(v) && sets.find(v) == sets.find(g.conj_vertex(v)))
}

pub fn invariants(g: &RealGraph) -> InvariantReport {
    let components = real_locus_components(g);
    let isolated = (0..g.n_edges()).filter(|&e| g.is_isolated_real_edge(e)).count() as i64;
    let s = isolated + components.iter().map(|c| c.genus(g) + 1).sum::<i64>();
    InvariantReport {
        genus: g.genus(),
        s_prime: components.len() as i64,
        isolated_real_edge_count: isolated,
        s,
        a: conjugate_connected(g) as u8,
        components_of_real_locus: components,
    }
}
