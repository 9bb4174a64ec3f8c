//! Deterministic constructors for graphs with real structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::DisjointSets;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{validate, RawGraph, RealGraph};

/// Realize `(g, s, a)` by the matching explicit family:
///
/// * `a = 0`: real vertices `v1..vs` on a path of doubled (conjugate) edges,
///   plus two conjugate tails `w1..wx`, `w1c..wxc` of doubled edges hanging
///   off `v1`, where `g + 1 − s = 2x`;
/// * `s = 0`: two conjugate vertices joined by `g + 1` edges in conjugate pairs;
/// * `s ≠ 0, a = 1`: the same real path, then `vs` joined to a conjugate pair
///   `u`, `uc` that is itself joined by `x ≥ 1` conjugate edge pairs.
pub fn example1(g: i64, s: i64, a: u8) -> Result<RealGraph> {
    if g < 0 || s < 0 {
        return Err(Error::InadmissibleTriple(format!("negative entries g={g} s={s}")));
    }
    if s > g + 1 {
        return Err(Error::InadmissibleTriple(format!("s={s} exceeds g+1={}", g + 1)));
    }
    if (g + 1 - s) % 2 != 0 {
        return Err(Error::InadmissibleTriple(format!("s={s} and g+1={} differ in parity", g + 1)));
    }
    match a {
        0 if s == 0 => Err(Error::InadmissibleTriple("a=0 requires s ≥ 1".into())),
        1 if s == g + 1 => Err(Error::InadmissibleTriple("a=1 requires s ≤ g−1".into())),
        0 | 1 => Ok(()),
        _ => Err(Error::InadmissibleTriple(format!("a={a} is not 0 or 1"))),
    }?;
    let x = (g + 1 - s) / 2;
    let mut raw = RawGraph::default();

    let real_path = |raw: &mut RawGraph| {
        for i in 1..=s {
            raw.add_vertex(format!("v{i}"));
        }
        for i in 1..s {
            let (p, q) = (format!("v{i}"), format!("v{}", i + 1));
            raw.add_edge(format!("e{i}"), p.clone(), q.clone());
            raw.add_edge(format!("e{i}c"), p, q);
            raw.conj_edges(format!("e{i}"), format!("e{i}c"));
        }
    };

    if a == 0 {
        real_path(&mut raw);
        for i in 1..=x {
            raw.add_vertex(format!("w{i}"));
            raw.add_vertex(format!("w{i}c"));
            raw.conj_vertices(format!("w{i}"), format!("w{i}c"));
            let (prev, prevc) = if i == 1 {
                ("v1".to_owned(), "v1".to_owned())
            } else {
                (format!("w{}", i - 1), format!("w{}c", i - 1))
            };
            raw.add_edge(format!("f{i}"), prev.clone(), format!("w{i}"));
            raw.add_edge(format!("h{i}"), prev, format!("w{i}"));
            raw.add_edge(format!("f{i}c"), prevc.clone(), format!("w{i}c"));
            raw.add_edge(format!("h{i}c"), prevc, format!("w{i}c"));
            raw.conj_edges(format!("f{i}"), format!("f{i}c"));
            raw.conj_edges(format!("h{i}"), format!("h{i}c"));
        }
    } else if s == 0 {
        raw.add_vertex("v");
        raw.add_vertex("vc");
        raw.conj_vertices("v", "vc");
        for i in 1..=(g + 1) / 2 {
            raw.add_edge(format!("e{i}"), "v", "vc");
            raw.add_edge(format!("e{i}c"), "v", "vc");
            raw.conj_edges(format!("e{i}"), format!("e{i}c"));
        }
    } else {
        real_path(&mut raw);
        raw.add_vertex("u");
        raw.add_vertex("uc");
        raw.conj_vertices("u", "uc");
        let last = format!("v{s}");
        raw.add_edge("f", last.clone(), "u");
        raw.add_edge("fc", last, "uc");
        raw.conj_edges("f", "fc");
        for i in 1..=x {
            raw.add_edge(format!("f{i}"), "u", "uc");
            raw.add_edge(format!("f{i}c"), "u", "uc");
            raw.conj_edges(format!("f{i}"), format!("f{i}c"));
        }
    }
    validate(&raw)
}

/// The cycle `c0 … c(n−1)` with edges `c_i c_(i+1)` named `x{i}` and the
/// identity involution; `n = 1` is a loop and `n = 2` a doubled edge.
pub fn cycle_graph(n: usize) -> Result<RealGraph> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut raw = RawGraph::default();
    for i in 0..n {
        raw.add_vertex(format!("c{i}"));
    }
    for i in 0..n {
        raw.add_edge(format!("x{i}"), format!("c{i}"), format!("c{}", (i + 1) % n));
    }
    validate(&raw)
}

/// Two copies of `base` (its real structure is ignored) swapped by the
/// involution and joined through a new real vertex `v` by edges `e1`, `e2`
/// to the two copies of `attach`. Returns the graph and the divisor `v`.
pub fn example2(base: &RealGraph, attach: usize) -> Result<(RealGraph, Divisor)> {
    if base.genus() < 1 {
        return Err(Error::GenusTooSmall(base.genus()));
    }
    let copy = |side: &str, id: &str| format!("{side}:{id}");
    let mut raw = RawGraph::default();
    raw.add_vertex("v");
    for id in base.vertex_ids() {
        raw.add_vertex(copy("a", id));
        raw.add_vertex(copy("b", id));
        raw.conj_vertices(copy("a", id), copy("b", id));
    }
    for e in 0..base.n_edges() {
        let (x, y) = base.ends(e);
        let (eid, xid, yid) = (base.edge_id(e), base.vertex_id(x), base.vertex_id(y));
        raw.add_edge(copy("a", eid), copy("a", xid), copy("a", yid));
        raw.add_edge(copy("b", eid), copy("b", xid), copy("b", yid));
        raw.conj_edges(copy("a", eid), copy("b", eid));
    }
    let attach_id = base.vertex_id(attach);
    raw.add_edge("e1", "v", copy("a", attach_id));
    raw.add_edge("e2", "v", copy("b", attach_id));
    raw.conj_edges("e1", "e2");
    let g = validate(&raw)?;
    let d = Divisor::unit(g.n_vertices(), g.vertex_index("v").expect("v was added"));
    Ok((g, d))
}

/// Id of the vertex at position `i` along edge `e` cut into `parts` pieces,
/// counted from the stored start of `e`.
pub fn chain_vertex_id(g: &RealGraph, e: usize, i: usize, parts: usize) -> String {
    let (a, b) = g.ends(e);
    if i == 0 {
        g.vertex_id(a).to_owned()
    } else if i == parts {
        g.vertex_id(b).to_owned()
    } else {
        format!("{}#{i}", g.edge_id(e))
    }
}

/// Id of piece `i` (`1..=parts`, joining positions `i−1` and `i`) of edge `e`.
pub fn chain_edge_id(g: &RealGraph, e: usize, i: usize, parts: usize) -> String {
    if parts == 1 {
        g.edge_id(e).to_owned()
    } else {
        format!("{}#{i}", g.edge_id(e))
    }
}

/// Whether the conjugate edge runs in the same direction as `e`, i.e. its
/// stored start is the conjugate of the stored start of `e`.
pub fn conj_aligned(g: &RealGraph, e: usize) -> bool {
    g.ends(g.conj_edge(e)).0 == g.conj_vertex(g.ends(e).0)
}

/// Cut every edge `e` into `parts(e)` pieces, with conjugation carried along
/// the chains: conjugate edges give conjugate chains, real edges between real
/// vertices give real chains, and isolated real edges are reflected about
/// their middle. `parts` must agree on conjugate edges and be at least 1.
pub fn subdivide_with(g: &RealGraph, parts: impl Fn(usize) -> usize) -> Result<RealGraph> {
    let mut raw = RawGraph::default();
    for id in g.vertex_ids() {
        raw.add_vertex(id.clone());
        let v = g.vertex_index(id).expect("own id");
        raw.sigma_v.insert(id.clone(), g.vertex_id(g.conj_vertex(v)).to_owned());
    }
    for e in 0..g.n_edges() {
        let n = parts(e);
        let ebar = g.conj_edge(e);
        if n == 0 || parts(ebar) != n {
            return Err(Error::PreconditionViolated(format!(
                "edge `{}` needs a positive piece count shared with its conjugate",
                g.edge_id(e)
            )));
        }
        let aligned = conj_aligned(g, e);
        for i in 1..n {
            let id = chain_vertex_id(g, e, i, n);
            let j = if aligned { i } else { n - i };
            raw.sigma_v.insert(id.clone(), chain_vertex_id(g, ebar, j, n));
            raw.add_vertex(id);
        }
        for i in 1..=n {
            let id = chain_edge_id(g, e, i, n);
            let j = if aligned { i } else { n + 1 - i };
            raw.sigma_e.insert(id.clone(), chain_edge_id(g, ebar, j, n));
            raw.add_edge(id, chain_vertex_id(g, e, i - 1, n), chain_vertex_id(g, e, i, n));
        }
    }
    validate(&raw)
}

/// Cut every edge into `d` pieces; `d = 1` returns the graph unchanged.
pub fn subdivide(g: &RealGraph, d: usize) -> Result<RealGraph> {
    if d == 0 {
        return Err(Error::PreconditionViolated("subdivision factor must be ≥ 1".into()));
    }
    subdivide_with(g, |_| d)
}

/// Replace each isolated real edge by a real midpoint and two conjugate edges.
pub fn edge_split(g: &RealGraph) -> RealGraph {
    subdivide_with(g, |e| if g.is_isolated_real_edge(e) { 2 } else { 1 })
        .expect("splitting isolated real edges preserves validity")
}

/// Shape bias of [`random_real_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphProfile {
    /// Any mix of real vertices, conjugate pairs and edge orbits.
    Mixed,
    /// Grown by moves that keep `s = g + 1` and avoid isolated real edges.
    MGraph,
    /// Like `MGraph`, with every real locus component a tree.
    StrongMGraph,
    /// No real vertices at all.
    EmptyRealLocus,
    /// Trivial involution.
    Identity,
}

impl GraphProfile {
    pub const ALL: [GraphProfile; 5] = [
        GraphProfile::Mixed,
        GraphProfile::MGraph,
        GraphProfile::StrongMGraph,
        GraphProfile::EmptyRealLocus,
        GraphProfile::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphProfile::Mixed => "mixed",
            GraphProfile::MGraph => "m-graph",
            GraphProfile::StrongMGraph => "strong-m-graph",
            GraphProfile::EmptyRealLocus => "empty-real-locus",
            GraphProfile::Identity => "identity",
        }
    }
}

impl std::str::FromStr for GraphProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        GraphProfile::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown profile `{s}`"))
    }
}

/// Incremental construction of a raw graph whose involution is valid by
/// construction: every vertex and edge is added together with its orbit.
struct Grower {
    raw: RawGraph,
    /// conjugate index per vertex
    conj: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Grower {
    fn new() -> Self {
        Grower { raw: RawGraph::default(), conj: Vec::new(), edges: Vec::new() }
    }

    fn nv(&self) -> usize {
        self.conj.len()
    }

    fn ne(&self) -> usize {
        self.edges.len()
    }

    fn name(&self, v: usize) -> String {
        self.raw.vertices[v].clone()
    }

    fn real_vertex(&mut self) -> usize {
        let v = self.nv();
        self.raw.add_vertex(format!("r{v}"));
        self.conj.push(v);
        v
    }

    fn vertex_pair(&mut self) -> (usize, usize) {
        let v = self.nv();
        self.raw.add_vertex(format!("p{v}"));
        self.raw.add_vertex(format!("q{v}"));
        self.raw.conj_vertices(format!("p{v}"), format!("q{v}"));
        self.conj.push(v + 1);
        self.conj.push(v);
        (v, v + 1)
    }

    fn edge_name(&self) -> String {
        format!("e{}", self.ne())
    }

    /// A fixed edge; its ends must be both real or a conjugate pair.
    fn fixed_edge(&mut self, a: usize, b: usize) {
        debug_assert!((self.conj[a] == a && self.conj[b] == b) || self.conj[a] == b);
        let id = self.edge_name();
        self.raw.add_edge(id, self.name(a), self.name(b));
        self.edges.push((a, b));
    }

    /// An edge `{a, b}` and its conjugate `{ā, b̄}` as two distinct edges.
    fn edge_pair(&mut self, a: usize, b: usize) {
        let first = self.edge_name();
        self.raw.add_edge(first.clone(), self.name(a), self.name(b));
        self.edges.push((a, b));
        let second = self.edge_name();
        let (ca, cb) = (self.conj[a], self.conj[b]);
        self.raw.add_edge(second.clone(), self.name(ca), self.name(cb));
        self.edges.push((ca, cb));
        self.raw.conj_edges(first, second);
    }

    fn components(&self) -> DisjointSets {
        let mut sets = DisjointSets::new(self.nv());
        for &(a, b) in &self.edges {
            sets.union(a, b);
        }
        sets
    }

    fn finish(self) -> RealGraph {
        validate(&self.raw).expect("generator builds valid real structures")
    }
}

/// Random link between orbit representatives `x` and `y` (distinct orbits).
fn link_orbits(rng: &mut ChaCha8Rng, gr: &mut Grower, x: usize, y: usize, edges_left: usize) {
    let (xr, yr) = (gr.conj[x] == x, gr.conj[y] == y);
    match (xr, yr) {
        (true, true) if edges_left < 2 || rng.random_bool(0.5) => gr.fixed_edge(x, y),
        (false, false) if rng.random_bool(0.5) => gr.edge_pair(x, gr.conj[y]),
        _ => gr.edge_pair(x, y),
    }
}

fn grow_mixed(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize, profile: GraphProfile) -> RealGraph {
    let max_vertices = max_vertices.max(1);
    let n = rng.random_range(1..=max_vertices);
    let (mut real, mut pairs) = match profile {
        GraphProfile::Identity => (n, 0),
        GraphProfile::EmptyRealLocus if max_vertices >= 2 => (0, (n / 2).max(1)),
        _ => {
            let p = rng.random_range(0..=n / 2);
            (n - 2 * p, p)
        }
    };
    if real + pairs == 0 {
        real = 1;
    }
    // the spanning structure needs ≤ 2 edges per orbit link plus 2 to join halves
    let needed = |r: usize, p: usize| 2 * (r + p).saturating_sub(1) + if p > 0 { 2 } else { 0 };
    while needed(real, pairs) > max_edges && real + pairs > 1 {
        if real > 0 && (pairs == 0 || profile != GraphProfile::EmptyRealLocus) && real >= pairs {
            real -= 1;
        } else {
            pairs -= 1;
        }
    }
    if needed(real, pairs) > max_edges {
        // a lone conjugate pair without two spare edges: fall back to a point
        real = 1;
        pairs = 0;
    }

    let mut gr = Grower::new();
    let mut orbits = Vec::new();
    for _ in 0..real {
        orbits.push(gr.real_vertex());
    }
    for _ in 0..pairs {
        orbits.push(gr.vertex_pair().0);
    }
    // shuffle orbit order so links are not biased by kind
    for i in (1..orbits.len()).rev() {
        let j = rng.random_range(0..=i);
        orbits.swap(i, j);
    }
    for i in 1..orbits.len() {
        let j = rng.random_range(0..i);
        let left = max_edges - gr.ne();
        link_orbits(rng, &mut gr, orbits[i], orbits[j], left);
    }
    // at most two conjugate halves remain; join them through some pair
    let mut sets = gr.components();
    if let Some(v) = (0..gr.nv()).find(|&v| sets.find(v) != sets.find(gr.conj[v])) {
        if profile != GraphProfile::MGraph && rng.random_bool(0.5) {
            gr.fixed_edge(v, gr.conj[v]);
        } else {
            gr.edge_pair(v, gr.conj[v]);
        }
    }

    let extra_target = rng.random_range(0..=max_edges.saturating_sub(gr.ne()));
    let mut attempts = 0;
    while gr.ne() < extra_target && attempts < 4 * max_edges + 8 {
        attempts += 1;
        let left = max_edges - gr.ne();
        let x = rng.random_range(0..gr.nv());
        let y = rng.random_range(0..gr.nv());
        let (xr, yr) = (gr.conj[x] == x, gr.conj[y] == y);
        let single_ok = left >= 1;
        let pair_ok = left >= 2;
        if x == y || gr.conj[x] == y {
            // loops, or edges inside one orbit
            match (xr, rng.random_range(0..3)) {
                (true, 0) | (true, 1) if single_ok => gr.fixed_edge(x, x),
                (true, _) if pair_ok => gr.edge_pair(x, x),
                (false, 0) if single_ok => gr.fixed_edge(x, gr.conj[x]),
                (false, 1) if pair_ok => gr.edge_pair(x, x),
                (false, _) if pair_ok => gr.edge_pair(x, gr.conj[x]),
                _ => {}
            }
        } else if xr && yr && (rng.random_bool(0.5) || !pair_ok) && single_ok {
            gr.fixed_edge(x, y);
        } else if pair_ok {
            gr.edge_pair(x, y);
        }
    }
    gr.finish()
}

/// Growth by moves that keep `s = g + 1` with no isolated real edges.
fn grow_m_graph(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize, strong: bool) -> RealGraph {
    let mut gr = Grower::new();
    let first = gr.real_vertex();
    let mut comp_of: Vec<(usize, usize)> = vec![(first, 0)];
    let mut n_comps = 1;
    let steps = rng.random_range(0..=max_vertices + max_edges);
    for _ in 0..steps {
        let v_left = max_vertices.saturating_sub(gr.nv());
        let e_left = max_edges.saturating_sub(gr.ne());
        let x = comp_of[rng.random_range(0..comp_of.len())];
        match rng.random_range(0..5) {
            // real leaf in the same component
            0 if v_left >= 1 && e_left >= 1 => {
                let y = gr.real_vertex();
                gr.fixed_edge(x.0, y);
                comp_of.push((y, x.1));
            }
            // extra real edge or loop inside one component
            1 if !strong && e_left >= 1 => {
                let same: Vec<usize> = comp_of.iter().filter(|c| c.1 == x.1).map(|c| c.0).collect();
                let y = same[rng.random_range(0..same.len())];
                gr.fixed_edge(x.0, y);
            }
            // new component hung off by two conjugate paths
            2 => {
                let len = rng.random_range(1..=3usize);
                if v_left > 2 * (len - 1) && e_left >= 2 * len {
                    let y = gr.real_vertex();
                    let mut prev = x.0;
                    for _ in 1..len {
                        let (p, _) = gr.vertex_pair();
                        gr.edge_pair(prev, p);
                        prev = p;
                    }
                    gr.edge_pair(prev, y);
                    comp_of.push((y, n_comps));
                    n_comps += 1;
                }
            }
            // conjugate tail hanging off any vertex
            _ if v_left >= 2 && e_left >= 2 => {
                let anchor = rng.random_range(0..gr.nv());
                let (p, _) = gr.vertex_pair();
                gr.edge_pair(anchor, p);
            }
            _ => {}
        }
    }
    gr.finish()
}

/// A connected graph with a valid real structure, deterministic in `seed`.
/// Vertex counts never exceed `max_vertices`; edge counts never exceed
/// `max_edges` except that a single vertex is always produced when nothing
/// else fits.
pub fn random_real_graph(seed: u64, max_vertices: usize, max_edges: usize, profile: GraphProfile) -> RealGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match profile {
        GraphProfile::MGraph => grow_m_graph(&mut rng, max_vertices.max(1), max_edges, false),
        GraphProfile::StrongMGraph => grow_m_graph(&mut rng, max_vertices.max(1), max_edges, true),
        _ => grow_mixed(&mut rng, max_vertices, max_edges, profile),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::invariants;

    #[test]
    fn cycles() {
        for n in 1..=5 {
            let c = cycle_graph(n).unwrap();
            assert_eq!((c.n_vertices(), c.n_edges(), c.genus()), (n, n, 1));
            assert_eq!(invariants(&c).triple(), (1, 2, 0));
        }
        assert!(cycle_graph(0).is_err());
    }

    #[test]
    fn example1_families() {
        let g = example1(4, 3, 0).unwrap();
        assert_eq!(invariants(&g).triple(), (4, 3, 0));
        assert_eq!(g.n_vertices(), 5);
        let g = example1(3, 0, 1).unwrap();
        assert_eq!(invariants(&g).triple(), (3, 0, 1));
        assert_eq!((g.n_vertices(), g.n_edges()), (2, 4));
        let g = example1(5, 2, 1).unwrap();
        assert_eq!(invariants(&g).triple(), (5, 2, 1));
    }

    #[test]
    fn example1_rejects_inadmissible() {
        for (g, s, a) in [(3, 1, 0), (2, 5, 0), (3, 0, 0), (3, 4, 1), (2, 1, 2), (-1, 0, 1)] {
            assert!(matches!(example1(g, s, a), Err(Error::InadmissibleTriple(_))), "{g} {s} {a}");
        }
    }

    #[test]
    fn example2_rejects_trees() {
        let tree = validate(&{
            let mut raw = RawGraph::default();
            raw.add_vertex("a");
            raw.add_vertex("b");
            raw.add_edge("x", "a", "b");
            raw
        })
        .unwrap();
        assert!(matches!(example2(&tree, 0), Err(Error::GenusTooSmall(0))));
    }

    fn isolated_edge_graph() -> RealGraph {
        let mut raw = RawGraph::default();
        raw.add_vertex("v");
        raw.add_vertex("w");
        raw.conj_vertices("v", "w");
        raw.add_edge("e", "v", "w");
        validate(&raw).unwrap()
    }

    #[test]
    fn subdividing_an_isolated_real_edge() {
        let g = isolated_edge_graph();
        let g2 = subdivide(&g, 2).unwrap();
        let mid = g2.vertex_index("e#1").unwrap();
        assert!(g2.is_real_vertex(mid));
        assert_eq!(g2.n_edges(), 2);
        assert!((0..2).all(|e| !g2.is_real_edge(e)));

        let g3 = subdivide(&g, 3).unwrap();
        let middle = g3.edge_index("e#2").unwrap();
        assert!(g3.is_isolated_real_edge(middle));
        assert_eq!(g3.vertex_index("e#1").map(|v| g3.conj_vertex(v)), g3.vertex_index("e#2"));

        assert_eq!(subdivide(&g, 1).unwrap(), g);
    }

    #[test]
    fn edge_split_gives_real_midpoint() {
        let g = isolated_edge_graph();
        let split = edge_split(&g);
        let inv = invariants(&split);
        assert_eq!((inv.isolated_real_edge_count, inv.s, inv.s_prime), (0, 1, 1));
        assert_eq!(split.n_vertices(), 3);
        let plain = example1(4, 3, 0).unwrap();
        assert_eq!(edge_split(&plain), plain);
    }

    #[test]
    fn tiny_bounds_give_a_point() {
        for seed in 0..20 {
            let g = random_real_graph(seed, 1, 0, GraphProfile::Mixed);
            assert_eq!((g.n_vertices(), g.n_edges()), (1, 0));
            assert!(g.is_real_vertex(0));
        }
    }

    #[test]
    fn generator_is_deterministic() {
        for profile in GraphProfile::ALL {
            let a = random_real_graph(7, 8, 12, profile);
            let b = random_real_graph(7, 8, 12, profile);
            assert_eq!(a.to_json(), b.to_json());
        }
    }
}
