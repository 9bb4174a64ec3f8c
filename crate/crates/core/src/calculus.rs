//! Plain-graph operations used when decomposing a graph: induced subgraphs,
//! edge spans, edge deletion and contraction of the complement of an edge set.
//! None of these carry a real structure, and results may be disconnected.

use std::collections::BTreeSet;

use crate::graph::{RealGraph, Subgraph};

/// Union-find over `0..n` with path halving.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller index as root so labels are deterministic
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// An unlabeled multigraph on vertices `0..n_vertices`, possibly disconnected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        Multigraph { n_vertices, edges }
    }

    /// Component label of every vertex, labels numbered by first occurrence.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut sets = DisjointSets::new(self.n_vertices);
        for &(a, b) in &self.edges {
            sets.union(a, b);
        }
        let mut label = vec![usize::MAX; self.n_vertices];
        let mut next = 0;
        let mut root_label = vec![usize::MAX; self.n_vertices];
        for v in 0..self.n_vertices {
            let r = sets.find(v);
            if root_label[r] == usize::MAX {
                root_label[r] = next;
                next += 1;
            }
            label[v] = root_label[r];
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().into_iter().max().map_or(0, |m| m + 1)
    }

    /// `c + e - v`; isolated vertices contribute nothing.
    pub fn genus(&self) -> i64 {
        self.component_count() as i64 + self.edges.len() as i64 - self.n_vertices as i64
    }
}

fn as_set(items: &[usize]) -> BTreeSet<usize> {
    items.iter().copied().collect()
}

/// G[W]: vertices `W`, and every edge with both ends in `W`.
pub fn induced_subgraph(g: &RealGraph, w: &[usize]) -> Subgraph {
    let vertices = as_set(w);
    let edges = (0..g.n_edges())
        .filter(|&e| {
            let (a, b) = g.ends(e);
            vertices.contains(&a) && vertices.contains(&b)
        })
        .collect();
    Subgraph { vertices: vertices.into_iter().collect(), edges }
}

/// G[S]: edges `S` and the union of their ends.
pub fn edge_span(g: &RealGraph, s: &[usize]) -> Subgraph {
    let edges = as_set(s);
    let vertices: BTreeSet<usize> = edges
        .iter()
        .flat_map(|&e| {
            let (a, b) = g.ends(e);
            [a, b]
        })
        .collect();
    Subgraph { vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect() }
}

/// G∖S: all vertices, the edges outside `S`. Vertex `i` is vertex `i` of `g`.
pub fn delete_edges(g: &RealGraph, s: &[usize]) -> Multigraph {
    let removed = as_set(s);
    Multigraph::new(g.n_vertices(), (0..g.n_edges()).filter(|e| !removed.contains(e)).map(|e| g.ends(e)).collect())
}

/// G(S): every edge outside `S` contracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub graph: Multigraph,
    /// Vertex of the contracted graph that each original vertex lands on.
    pub class_of: Vec<usize>,
    /// Original edge behind each edge of `graph`.
    pub kept_edges: Vec<usize>,
}

/// Contract every edge not in `s`: vertices of the result are the connected
/// components of G∖S and the edges are exactly `s`.
pub fn contract_complement(g: &RealGraph, s: &[usize]) -> Contraction {
    let class_of = delete_edges(g, s).component_labels();
    let n = class_of.iter().max().map_or(0, |m| m + 1);
    let kept_edges: Vec<usize> = as_set(s).into_iter().collect();
    let edges = kept_edges
        .iter()
        .map(|&e| {
            let (a, b) = g.ends(e);
            (class_of[a], class_of[b])
        })
        .collect();
    Contraction { graph: Multigraph::new(n, edges), class_of, kept_edges }
}

/// Whether g(G) = g(G(S)) + g(G∖S).
pub fn genus_decomposition_check(g: &RealGraph, s: &[usize]) -> bool {
    g.genus() == contract_complement(g, s).graph.genus() + delete_edges(g, s).genus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate, RawGraph};

    fn triangle() -> RealGraph {
        let mut raw = RawGraph::default();
        for v in ["a", "b", "c"] {
            raw.add_vertex(v);
        }
        raw.add_edge("ab", "a", "b");
        raw.add_edge("bc", "b", "c");
        raw.add_edge("ca", "c", "a");
        validate(&raw).unwrap()
    }

    #[test]
    fn deleting_nothing_keeps_the_graph() {
        let g = triangle();
        let d = delete_edges(&g, &[]);
        assert_eq!(d.n_vertices, 3);
        assert_eq!(d.edges.len(), 3);
        assert_eq!(d.genus(), 1);
    }

    #[test]
    fn contracting_nothing_outside_all_edges_is_identity() {
        let g = triangle();
        let all: Vec<usize> = (0..3).collect();
        let c = contract_complement(&g, &all);
        assert_eq!(c.graph.n_vertices, 3);
        assert_eq!(c.class_of, vec![0, 1, 2]);
        assert_eq!(c.graph.edges, (0..3).map(|e| g.ends(e)).collect::<Vec<_>>());
    }

    #[test]
    fn triangle_keeping_one_edge_is_a_loop() {
        let g = triangle();
        let c = contract_complement(&g, &[0]);
        assert_eq!(c.graph.n_vertices, 1);
        assert_eq!(c.graph.edges, vec![(0, 0)]);
        assert_eq!(c.graph.genus(), 1);
        assert_eq!(delete_edges(&g, &[0]).genus(), 0);
        assert!(genus_decomposition_check(&g, &[0]));
    }

    #[test]
    fn empty_edge_set_contracts_to_a_point() {
        let g = triangle();
        let c = contract_complement(&g, &[]);
        assert_eq!(c.graph.n_vertices, 1);
        assert_eq!(c.graph.genus(), 0);
        assert!(genus_decomposition_check(&g, &[]));
    }

    #[test]
    fn induced_and_span() {
        let g = triangle();
        let a = g.vertex_index("a").unwrap();
        let b = g.vertex_index("b").unwrap();
        let sub = induced_subgraph(&g, &[a, b]);
        assert_eq!(sub.edges, vec![g.edge_index("ab").unwrap()]);
        let span = edge_span(&g, &[g.edge_index("bc").unwrap()]);
        assert_eq!(span.vertex_ids(&g), vec!["b", "c"]);
        assert!(span.is_well_formed(&g));
    }

    #[test]
    fn isolated_vertices_do_not_contribute_genus() {
        let m = Multigraph::new(4, vec![(0, 1), (1, 0)]);
        assert_eq!(m.component_count(), 3);
        assert_eq!(m.genus(), 1);
    }
}
