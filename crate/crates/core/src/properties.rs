//! Executable versions of the structural theorems, run against seeded random
//! instances, with greedy shrinking of failing instances.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::builders::{edge_split, random_real_graph, subdivide, GraphProfile};
use crate::calculus::genus_decomposition_check;
use crate::divisor::{
    canonical_divisor, is_q_reduced, laplacian, linearly_equivalent, rank, Divisor, PotentialFunction, Reducer,
    BASE_VERTEX,
};
use crate::enumerate::Budget;
use crate::error::{Error, Result};
use crate::graph::{invariants, RawGraph, RealGraph};
use crate::metric::{
    is_m_metric_graph, is_strong_m_metric_graph, metric_equivalent, metric_find_real_g12, metric_invariants,
    metric_parity_signature, metric_rank_refined, metric_real_rank_refined, metric_totally_real_reduction,
    random_metric_graph, reduce_to_model, reduce_to_model_refined, QDivisor, QMetricGraph, QPoint,
};
use crate::real::{
    find_real_g12, is_m_graph, is_real, is_real_potential, is_strong_m_graph, is_totally_real, parity_signature,
    real_rank, real_witness, symmetrize, totally_real_reduction, vertex_orbits,
};

macro_rules! properties {
    ($($variant:ident => $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Property {
            $($variant,)*
        }

        impl Property {
            pub const ALL: &'static [Property] = &[$(Property::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Property::$variant => $name,)*
                }
            }
        }
    };
}

properties! {
    InvariantBounds => "invariant-bounds",
    GenusDecomposition => "genus-decomposition",
    WitnessReality => "witness-reality",
    ParityInvariance => "parity-invariance",
    CanonicalParity => "canonical-parity",
    RealRankBound => "real-rank-bound",
    Symmetrize => "symmetrize",
    TotallyRealReduction => "totally-real-reduction",
    RealPencil => "real-pencil",
    Subdivision => "subdivision",
    EdgeSplit => "edge-split",
    JsonRoundTrip => "json-round-trip",
    RiemannRoch => "riemann-roch",
    ReductionInvariance => "reduction-invariance",
    MetricInvariantBounds => "metric-invariant-bounds",
    MetricRefinement => "metric-refinement",
    MetricParity => "metric-parity",
    MetricTotallyReal => "metric-totally-real",
    MetricRealPencil => "metric-real-pencil",
}

impl Property {
    /// Whether instances are metric graphs rather than plain graphs.
    pub fn is_metric(self) -> bool {
        self >= Property::MetricInvariantBounds
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Property::ALL.iter().copied().find(|p| p.name() == s).ok_or_else(|| format!("unknown property `{s}`"))
    }
}

/// Parse `all` or a comma-separated list of property names.
pub fn parse_property_list(text: &str) -> std::result::Result<Vec<Property>, String> {
    if text.trim() == "all" {
        return Ok(Property::ALL.to_vec());
    }
    let mut out: Vec<Property> = text.split(',').map(|s| s.trim().parse()).collect::<std::result::Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Result of a single trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Preconditions not met, or the enumeration budget ran out.
    Skip(String),
    Fail(String),
}

/// Size bounds of generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: 10, max_edges: 16 }
    }
}

impl Property {
    /// Enumeration-heavy properties run on smaller instances.
    fn limits(self, requested: Limits) -> Limits {
        let cap = |v: usize, e: usize| Limits {
            max_vertices: requested.max_vertices.min(v),
            max_edges: requested.max_edges.min(e),
        };
        match self {
            Property::RealRankBound | Property::Symmetrize => cap(6, 8),
            Property::RiemannRoch => cap(5, 7),
            Property::TotallyRealReduction | Property::RealPencil => cap(10, 12),
            Property::MetricRefinement => cap(4, 5),
            Property::MetricParity | Property::MetricTotallyReal | Property::MetricRealPencil => cap(5, 6),
            _ => requested,
        }
    }

    fn profile(self, trial: u64) -> GraphProfile {
        match self {
            Property::TotallyRealReduction | Property::MetricTotallyReal => {
                if trial.is_multiple_of(3) {
                    GraphProfile::StrongMGraph
                } else {
                    GraphProfile::MGraph
                }
            }
            Property::RealPencil | Property::MetricRealPencil => GraphProfile::StrongMGraph,
            _ => match trial % 8 {
                5 => GraphProfile::MGraph,
                6 => GraphProfile::EmptyRealLocus,
                7 => GraphProfile::Identity,
                _ => GraphProfile::Mixed,
            },
        }
    }

    /// The instance for `seed`, in the JSON interchange format.
    pub fn generate(self, seed: u64, limits: Limits) -> RawGraph {
        let limits = self.limits(limits);
        let profile = self.profile(seed);
        if self.is_metric() {
            random_metric_graph(seed, limits.max_vertices, limits.max_edges, profile, 4).to_raw()
        } else {
            random_real_graph(seed, limits.max_vertices, limits.max_edges, profile).to_raw()
        }
    }

    /// Run the property on `raw`, drawing auxiliary data from `seed`.
    pub fn check(self, raw: &RawGraph, seed: u64, budget: &Budget) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ 0xa5a5_a5a5));
        let verdict = if self.is_metric() {
            match QMetricGraph::from_raw(raw) {
                Ok(gamma) => check_metric(self, &gamma, &mut rng, budget),
                Err(e) => return Outcome::Skip(format!("invalid instance: {e}")),
            }
        } else {
            match RealGraph::from_raw(raw) {
                Ok(g) => check_graph(self, &g, &mut rng, budget),
                Err(e) => return Outcome::Skip(format!("invalid instance: {e}")),
            }
        };
        match verdict {
            Ok(outcome) => outcome,
            Err(e) if e.is_budget() => Outcome::Skip(e.to_string()),
            Err(e) => Outcome::Fail(e.to_string()),
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of trial `index` of `property` in a run seeded by `base`.
pub fn trial_seed(base: u64, property: Property, index: u64) -> u64 {
    let tag = Property::ALL.iter().position(|&p| p == property).expect("listed") as u64;
    splitmix(base ^ splitmix((tag << 40) ^ index))
}

fn fail(msg: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Fail(msg.into()))
}

fn skip(msg: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Skip(msg.into()))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<Outcome> {
    if ok {
        Ok(Outcome::Pass)
    } else {
        fail(msg())
    }
}

pub fn random_divisor(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Divisor {
    Divisor::from_vec((0..n).map(|_| rng.random_range(lo..=hi)).collect())
}

pub fn random_potential(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> PotentialFunction {
    PotentialFunction::from_vec((0..n).map(|_| rng.random_range(lo..=hi)).collect())
}

/// Coefficients drawn per vertex orbit.
pub fn random_real_divisor(g: &RealGraph, rng: &mut impl Rng, lo: i64, hi: i64) -> Divisor {
    let mut d = Divisor::zero(g.n_vertices());
    for (v, w) in vertex_orbits(g) {
        let c = rng.random_range(lo..=hi);
        d.set(v, c);
        d.set(w, c);
    }
    d
}

pub fn random_real_potential(g: &RealGraph, rng: &mut impl Rng, lo: i64, hi: i64) -> PotentialFunction {
    let d = random_real_divisor(g, rng, lo, hi);
    PotentialFunction::from_vec(d.into_vec())
}

/// A real effective divisor of degree `degree`, or `degree − 1` when the
/// real locus is empty and `degree` is odd.
pub fn random_real_effective(g: &RealGraph, rng: &mut impl Rng, degree: i64) -> Divisor {
    let orbits = vertex_orbits(g);
    let real: Vec<usize> = g.real_vertices().collect();
    let mut d = Divisor::zero(g.n_vertices());
    let mut left = degree;
    while left > 0 {
        let &(v, w) = orbits.choose(rng).expect("graphs are nonempty");
        if v == w {
            d.add_at(v, 1);
            left -= 1;
        } else if left >= 2 {
            d.add_at(v, 1);
            d.add_at(w, 1);
            left -= 2;
        } else if let Some(&r) = real.choose(rng) {
            d.add_at(r, 1);
            left -= 1;
        } else {
            break;
        }
    }
    d
}

fn check_graph(p: Property, g: &RealGraph, rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Outcome> {
    let n = g.n_vertices();
    match p {
        Property::InvariantBounds => {
            let inv = invariants(g);
            let v = inv.bound_violations();
            ensure(v.is_empty(), || format!("{v:?} for {:?}", inv.triple()))
        }
        Property::GenusDecomposition => {
            let s: Vec<usize> = (0..g.n_edges()).filter(|_| rng.random_bool(0.5)).collect();
            ensure(genus_decomposition_check(g, &s), || format!("edge set {s:?}"))
        }
        Property::WitnessReality => {
            let d = random_real_divisor(g, rng, -3, 3);
            let f0 = if rng.random_bool(0.5) {
                let c = rng.random_range(-5..=5);
                let f = random_real_potential(g, rng, -4, 4);
                PotentialFunction::from_vec(f.iter().map(|x| x + c).collect())
            } else {
                random_potential(rng, n, -4, 4)
            };
            let d2 = &d + &laplacian(g, &f0);
            if !is_real(g, &d2) {
                return skip("D + Δ(f₀) is not real");
            }
            let f = real_witness(g, &d, &d2)?;
            ensure(is_real_potential(g, &f) && &d + &laplacian(g, &f) == d2, || {
                format!("witness {:?} for D={:?}", f.as_slice(), d.as_slice())
            })
        }
        Property::ParityInvariance => {
            let d = random_real_divisor(g, rng, -3, 3);
            let f = random_real_potential(g, rng, -3, 3);
            let moved = &d + &laplacian(g, &f);
            let (a, b) = (parity_signature(g, &d)?, parity_signature(g, &moved)?);
            ensure(a == b, || format!("D={:?} f={:?}: {:?} vs {:?}", d.as_slice(), f.as_slice(), a.0, b.0))
        }
        Property::CanonicalParity => {
            let sig = parity_signature(g, &canonical_divisor(g))?;
            ensure(sig.is_all_even(), || format!("signature {:?}", sig.0))
        }
        Property::RealRankBound => {
            let d = random_real_divisor(g, rng, -1, 2);
            if d.degree() > 4 {
                return skip("degree too large");
            }
            let (r, rr) = (rank(g, &d, budget)?, real_rank(g, &d, budget)?);
            ensure(rr >= r, || format!("D={:?}: real rank {rr} < rank {r}", d.as_slice()))
        }
        Property::Symmetrize => {
            let d = random_real_divisor(g, rng, -1, 3);
            let degree = rng.random_range(0..=2);
            let e = random_real_effective(g, rng, degree);
            let f = if rng.random_bool(0.7) {
                let reducer = Reducer::new(g, BASE_VERTEX);
                let (reduced, f) = reducer.reduce(&(&d - &e));
                if reduced.divisor[BASE_VERTEX] < 0 {
                    return skip("no member above E");
                }
                f
            } else {
                random_potential(rng, n, -2, 2)
            };
            let moved = &d + &laplacian(g, &f);
            if !moved.is_effective() || !moved.dominates(&e) {
                return skip("precondition D + Δ(f) ≥ E fails");
            }
            let (sym, out) = symmetrize(g, &d, &f, &e)?;
            ensure(
                is_real(g, &out) && out.is_effective() && out.dominates(&e) && &d + &laplacian(g, &sym) == out,
                || format!("D={:?} f={:?} E={:?}", d.as_slice(), f.as_slice(), e.as_slice()),
            )
        }
        Property::TotallyRealReduction => {
            if !is_m_graph(g) {
                return skip("not an M-graph");
            }
            if g.genus() > 6 {
                return skip("genus above 6");
            }
            let degree = rng.random_range(0..=4);
            let d = random_real_effective(g, rng, degree);
            let (out, f) = totally_real_reduction(g, &d)?;
            let equivalent = linearly_equivalent(g, &d, &out).is_some();
            ensure(
                is_totally_real(g, &out)
                    && out.is_effective()
                    && &d + &laplacian(g, &f) == out
                    && equivalent
                    && is_real_potential(g, &f),
                || format!("D={:?} gave {:?}", d.as_slice(), out.as_slice()),
            )
        }
        Property::RealPencil => {
            if !is_strong_m_graph(g) {
                return skip("not a strong M-graph");
            }
            let (d, r) = find_real_g12(g, budget)?;
            let checked = rank(g, &d, budget)?;
            ensure(r >= 1 && checked == r && d.degree() == 2 && is_real(g, &d) && d.is_effective(), || {
                format!("candidate {:?} has rank {checked}", d.as_slice())
            })
        }
        Property::Subdivision => {
            let d = rng.random_range(2..=4);
            let sub = subdivide(g, d)?;
            let (a, b) = (invariants(g), invariants(&sub));
            let same = a.triple() == b.triple();
            if !same {
                return fail(format!("d={d}: {:?} vs {:?}", a.triple(), b.triple()));
            }
            let loop_free = (0..g.n_edges()).all(|e| !g.is_loop(e));
            let plain_ids = g.edge_ids().iter().all(|id| !id.contains('#'));
            if loop_free && plain_ids {
                let composed = flatten_chains(&subdivide(&subdivide(g, 2)?, 3)?, 3);
                let direct = subdivide(g, 6)?;
                return ensure(composed == direct.to_raw(), || "composition 2·3 differs from 6".into());
            }
            Ok(Outcome::Pass)
        }
        Property::EdgeSplit => {
            let split = edge_split(g);
            let (a, b) = (invariants(g), invariants(&split));
            ensure(b.isolated_real_edge_count == 0 && (a.genus, a.s, a.a) == (b.genus, b.s, b.a), || {
                format!("{:?} vs {:?}", a.triple(), b.triple())
            })
        }
        Property::JsonRoundTrip => {
            let text = g.to_json();
            let back = RealGraph::from_json(&text)?;
            ensure(&back == g && back.to_json() == text, || "round trip changed the graph".into())
        }
        Property::RiemannRoch => {
            if (0..g.n_edges()).any(|e| g.is_loop(e)) {
                return skip("graph has loops");
            }
            let genus = g.genus();
            let k = canonical_divisor(g);
            let degree = rng.random_range(-1..=(2 * genus - 1).max(0));
            let mut d = random_divisor(rng, n, -1, 2);
            // move the degree to the requested value at a random vertex
            let v = rng.random_range(0..n);
            d.add_at(v, degree - d.degree());
            let lhs = rank(g, &d, budget)? - rank(g, &(&k - &d), budget)?;
            ensure(lhs == d.degree() + 1 - genus, || format!("D={:?}: r(D) − r(K−D) = {lhs}", d.as_slice()))
        }
        Property::ReductionInvariance => {
            let d = random_divisor(rng, n, -3, 3);
            let f = random_potential(rng, n, -3, 3);
            let q = rng.random_range(0..n);
            let reducer = Reducer::new(g, q);
            let (a, fa) = reducer.reduce(&d);
            let (b, _) = reducer.reduce(&(&d + &laplacian(g, &f)));
            ensure(a == b && is_q_reduced(g, &a.divisor, q) && &d + &laplacian(g, &fa) == a.divisor, || {
                format!("D={:?} f={:?} q={q}", d.as_slice(), f.as_slice())
            })
        }
        _ => unreachable!("metric property on a plain graph"),
    }
}

/// A random point of `gamma` whose offset has denominator dividing `den`.
fn random_point(gamma: &QMetricGraph, rng: &mut impl Rng, den: i64) -> QPoint {
    let g = gamma.graph();
    if g.n_edges() == 0 || rng.random_bool(0.3) {
        return QPoint::Vertex(rng.random_range(0..g.n_vertices()));
    }
    let e = rng.random_range(0..g.n_edges());
    let len = gamma.length(e);
    let steps = (len * Rational64::from_integer(den)).ceil().to_integer().max(1);
    let t = Rational64::new(rng.random_range(0..=steps), den).min(len);
    gamma.edge_point(e, t).expect("offset within the edge")
}

fn random_real_qdivisor(gamma: &QMetricGraph, rng: &mut impl Rng, terms: usize, lo: i64, hi: i64) -> QDivisor {
    let mut d = QDivisor::new();
    for _ in 0..terms {
        let den = rng.random_range(1..=4);
        let p = random_point(gamma, rng, den);
        let c = rng.random_range(lo..=hi);
        let pbar = gamma.conjugate_point(&p);
        d.add(p, c);
        if pbar != p {
            d.add(pbar, c);
        }
    }
    d
}

fn check_metric(p: Property, gamma: &QMetricGraph, rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Outcome> {
    let g = gamma.graph();
    match p {
        Property::MetricInvariantBounds => {
            let inv = metric_invariants(gamma);
            let refine = rng.random_range(1..=3);
            let red = reduce_to_model_refined(gamma, &[], refine, budget)?;
            let model = invariants(&red.model);
            let v = inv.bound_violations();
            ensure(v.is_empty() && (inv.genus, inv.s, inv.a) == (model.genus, model.s, model.a), || {
                format!("{v:?}; metric {:?} vs model {:?}", inv.triple(), model.triple())
            })
        }
        Property::MetricRefinement => {
            // vertex-supported divisors of degree ≤ 2, some of them real
            let mut d = QDivisor::new();
            for _ in 0..rng.random_range(1..=2) {
                let v = rng.random_range(0..g.n_vertices());
                let c = rng.random_range(-1..=2);
                d.add(QPoint::Vertex(v), c);
                if rng.random_bool(0.5) && g.conj_vertex(v) != v {
                    d.add(QPoint::Vertex(g.conj_vertex(v)), c);
                }
            }
            if d.degree() > 2 {
                return skip("degree too large");
            }
            let ranks: Vec<i64> = (1..=3).map(|k| metric_rank_refined(gamma, &d, k, budget)).collect::<Result<_>>()?;
            if ranks.iter().any(|&r| r != ranks[0]) {
                return fail(format!("ranks across refinements {ranks:?} for {}", d.to_json(gamma)));
            }
            if d.is_real(gamma) {
                let real: Vec<i64> =
                    (1..=3).map(|k| metric_real_rank_refined(gamma, &d, k, budget)).collect::<Result<_>>()?;
                if real.iter().any(|&r| r != real[0]) {
                    return fail(format!("real ranks across refinements {real:?} for {}", d.to_json(gamma)));
                }
                if real[0] < ranks[0] {
                    return fail(format!("real rank {} below rank {}", real[0], ranks[0]));
                }
            }
            Ok(Outcome::Pass)
        }
        Property::MetricParity => {
            let terms = rng.random_range(0..=3);
            let d = random_real_qdivisor(gamma, rng, terms, -2, 2);
            let red = reduce_to_model(gamma, &d.support(), budget)?;
            let model = &red.model;
            let f = random_real_potential(model, rng, -2, 2);
            let moved = red.lift(&(&red.push(gamma, &d)? + &laplacian(model, &f)));
            let (a, b) = (metric_parity_signature(gamma, &d)?, metric_parity_signature(gamma, &moved)?);
            let witness = metric_equivalent(gamma, &d, &moved, budget)?;
            let witness_real = witness.as_ref().is_some_and(|w| w.is_real(gamma));
            ensure(a == b && witness_real, || {
                format!("{} vs {}: {:?} vs {:?}", d.to_json(gamma), moved.to_json(gamma), a.0, b.0)
            })
        }
        Property::MetricTotallyReal => {
            if !is_m_metric_graph(gamma) {
                return skip("not an M-metric graph");
            }
            let terms = rng.random_range(0..=2);
            let mut d = random_real_qdivisor(gamma, rng, terms, 0, 1);
            if d.degree() > 4 {
                d = QDivisor::new();
            }
            let (out, f) = metric_totally_real_reduction(gamma, &d, budget)?;
            let equivalent = metric_equivalent(gamma, &d, &out, budget)?.is_some();
            ensure(out.is_totally_real(gamma) && out.is_effective() && equivalent && f.is_real(gamma), || {
                format!("{} gave {}", d.to_json(gamma), out.to_json(gamma))
            })
        }
        Property::MetricRealPencil => {
            if !is_strong_m_metric_graph(gamma) {
                return skip("not a strong M-metric graph");
            }
            let (d, r) = metric_find_real_g12(gamma, budget)?;
            ensure(r >= 1 && d.degree() == 2 && d.is_real(gamma) && d.is_effective(), || {
                format!("{} has rank {r}", d.to_json(gamma))
            })
        }
        _ => unreachable!("graph property on a metric graph"),
    }
}

/// Rename the chains of a twice-subdivided graph, where the second pass cut
/// every edge into `inner` pieces, to the ids a single subdivision uses.
pub fn flatten_chains(g: &RealGraph, inner: usize) -> RawGraph {
    let rename_vertex = |id: &str| -> String {
        let parts: Vec<&str> = id.split('#').collect();
        match parts.as_slice() {
            [base, i] => format!("{base}#{}", i.parse::<usize>().expect("chain index") * inner),
            [base, i, j] => {
                let (i, j): (usize, usize) = (i.parse().expect("chain index"), j.parse().expect("chain index"));
                format!("{base}#{}", (i - 1) * inner + j)
            }
            _ => id.to_owned(),
        }
    };
    let rename_edge = |id: &str| -> String {
        let parts: Vec<&str> = id.split('#').collect();
        match parts.as_slice() {
            [base, i, j] => {
                let (i, j): (usize, usize) = (i.parse().expect("chain index"), j.parse().expect("chain index"));
                format!("{base}#{}", (i - 1) * inner + j)
            }
            _ => id.to_owned(),
        }
    };
    let raw = g.to_raw();
    let mut out = RawGraph::default();
    for v in &raw.vertices {
        out.add_vertex(rename_vertex(v));
    }
    for e in &raw.edges {
        out.add_edge(rename_edge(&e.id), rename_vertex(&e.ends[0]), rename_vertex(&e.ends[1]));
    }
    out.sigma_v = raw.sigma_v.iter().map(|(a, b)| (rename_vertex(a), rename_vertex(b))).collect();
    out.sigma_e = raw.sigma_e.iter().map(|(a, b)| (rename_edge(a), rename_edge(b))).collect();
    RealGraph::from_raw(&out).expect("renaming keeps validity").to_raw()
}

/// Instances obtained by deleting one edge orbit or one vertex orbit (with
/// its incident edges), in that order; invalid results are dropped.
pub fn shrink_candidates(raw: &RawGraph) -> Vec<RawGraph> {
    let sigma_e = |id: &String| raw.sigma_e.get(id).cloned().unwrap_or_else(|| id.clone());
    let sigma_v = |id: &String| raw.sigma_v.get(id).cloned().unwrap_or_else(|| id.clone());
    let mut out = Vec::new();
    let without = |vertices: &[String], edges: &[String]| {
        let mut next = raw.clone();
        next.vertices.retain(|v| !vertices.contains(v));
        next.edges
            .retain(|e| !edges.contains(&e.id) && !vertices.contains(&e.ends[0]) && !vertices.contains(&e.ends[1]));
        let kept_edges: Vec<String> = next.edges.iter().map(|e| e.id.clone()).collect();
        next.sigma_v.retain(|k, _| !vertices.contains(k));
        next.sigma_e.retain(|k, _| kept_edges.contains(k));
        next
    };
    let mut seen = Vec::new();
    for e in &raw.edges {
        let pair = vec![e.id.clone(), sigma_e(&e.id)];
        if !seen.contains(&e.id) {
            seen.extend(pair.iter().cloned());
            out.push(without(&[], &pair));
        }
    }
    let mut seen = Vec::new();
    for v in &raw.vertices {
        if !seen.contains(v) {
            let pair = vec![v.clone(), sigma_v(v)];
            seen.extend(pair.iter().cloned());
            out.push(without(&pair, &[]));
        }
    }
    out.retain(|c| RealGraph::from_raw(c).is_ok());
    out
}

/// Greedy shrinking: repeatedly take the first candidate that still fails.
pub fn shrink(property: Property, raw: &RawGraph, seed: u64, budget: &Budget) -> (RawGraph, String) {
    let mut current = raw.clone();
    let mut reason = match property.check(&current, seed, budget) {
        Outcome::Fail(r) => r,
        _ => return (current, String::new()),
    };
    'outer: loop {
        for candidate in shrink_candidates(&current) {
            if let Outcome::Fail(r) = property.check(&candidate, seed, budget) {
                current = candidate;
                reason = r;
                continue 'outer;
            }
        }
        return (current, reason);
    }
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: u64,
    pub limits: Limits,
    pub properties: Vec<Property>,
    /// Worker threads; 0 uses the rayon default, 1 runs serially.
    pub jobs: usize,
    pub budget: Budget,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            trials: 100,
            limits: Limits::default(),
            properties: Property::ALL.to_vec(),
            jobs: 0,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyTally {
    pub passed: u64,
    pub skipped: u64,
    pub failed: u64,
}

/// A shrunk failing instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub property: Property,
    pub trial: u64,
    pub seed: u64,
    pub instance: RawGraph,
    pub reason: String,
}

impl Counterexample {
    pub fn to_json_value(&self) -> Value {
        json!({
            "property": self.property.name(),
            "trial": self.trial,
            "seed": self.seed,
            "reason": self.reason,
            "instance": serde_json::to_value(&self.instance).expect("graphs serialize"),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FuzzSummary {
    pub tallies: BTreeMap<Property, PropertyTally>,
    /// The first failure in (property, trial) order, shrunk.
    pub counterexample: Option<Counterexample>,
}

impl FuzzSummary {
    pub fn failed(&self) -> u64 {
        self.tallies.values().map(|t| t.failed).sum()
    }

    pub fn to_json_value(&self) -> Value {
        let tallies: serde_json::Map<String, Value> = self
            .tallies
            .iter()
            .map(|(p, t)| {
                (p.name().to_owned(), json!({ "passed": t.passed, "skipped": t.skipped, "failed": t.failed }))
            })
            .collect();
        json!({
            "properties": tallies,
            "failed": self.failed(),
            "counterexample": self.counterexample.as_ref().map(Counterexample::to_json_value),
        })
    }
}

/// Run every `(property, trial)` pair; the summary does not depend on the
/// number of worker threads.
pub fn run_fuzz(config: &FuzzConfig) -> Result<FuzzSummary> {
    let tasks: Vec<(Property, u64)> =
        config.properties.iter().flat_map(|&p| (0..config.trials).map(move |i| (p, i))).collect();
    let run = |&(p, i): &(Property, u64)| {
        let seed = trial_seed(config.seed, p, i);
        let raw = p.generate(seed, config.limits);
        (p, i, seed, p.check(&raw, seed, &config.budget), raw)
    };
    let results: Vec<_> = if config.jobs == 1 {
        tasks.iter().map(run).collect()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if config.jobs > 0 {
            builder = builder.num_threads(config.jobs);
        }
        let pool = builder.build().map_err(|e| Error::PreconditionViolated(e.to_string()))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };

    let mut summary = FuzzSummary::default();
    for &p in &config.properties {
        summary.tallies.insert(p, PropertyTally::default());
    }
    for (p, i, seed, outcome, raw) in results {
        let tally = summary.tallies.get_mut(&p).expect("initialized");
        match outcome {
            Outcome::Pass => tally.passed += 1,
            Outcome::Skip(_) => tally.skipped += 1,
            Outcome::Fail(_) => {
                tally.failed += 1;
                if summary.counterexample.is_none() {
                    let (instance, reason) = shrink(p, &raw, seed, &config.budget);
                    summary.counterexample = Some(Counterexample { property: p, trial: i, seed, instance, reason });
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for &p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
        }
        assert_eq!(parse_property_list("all").unwrap().len(), Property::ALL.len());
        assert_eq!(
            parse_property_list("edge-split,subdivision,edge-split").unwrap(),
            vec![Property::Subdivision, Property::EdgeSplit]
        );
        assert!(parse_property_list("nope").is_err());
    }

    #[test]
    fn a_short_run_passes() {
        let config = FuzzConfig { trials: 5, ..FuzzConfig::default() };
        let summary = run_fuzz(&config).unwrap();
        assert_eq!(summary.failed(), 0, "{}", summary.to_json_value());
    }

    #[test]
    fn serial_and_parallel_runs_agree() {
        let base = FuzzConfig { trials: 4, seed: 11, ..FuzzConfig::default() };
        let serial = run_fuzz(&FuzzConfig { jobs: 1, ..base.clone() }).unwrap();
        let parallel = run_fuzz(&FuzzConfig { jobs: 3, ..base }).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn shrink_candidates_stay_valid() {
        let raw = random_real_graph(3, 6, 9, GraphProfile::Mixed).to_raw();
        for c in shrink_candidates(&raw) {
            assert!(RealGraph::from_raw(&c).is_ok());
            assert!(c.vertices.len() + c.edges.len() < raw.vertices.len() + raw.edges.len());
        }
    }
}
