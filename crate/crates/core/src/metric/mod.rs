//! Rational metric graphs with a real structure.
//!
//! A [`QMetricGraph`] is a finite model graph with positive rational edge
//! lengths. Points are either model vertices or `(edge, offset)` pairs with
//! the offset measured from the stored start of the edge. Divisor theory is
//! carried out on unit-length subdivisions, see [`ModelReduction`].

mod model;
mod theory;

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::builders::{conj_aligned, random_real_graph, GraphProfile};
use crate::error::{Error, Result};
use crate::graph::{invariants, real_locus_components, InvariantReport, RawGraph, RealGraph};

pub use model::{reduce_to_model, reduce_to_model_refined, ModelReduction};
pub use theory::{
    metric_equivalent, metric_find_real_g12, metric_parity_signature, metric_rank, metric_rank_refined,
    metric_real_rank, metric_real_rank_refined, metric_totally_real_reduction, MetricPotential,
};

/// `"reflected"`: the tag carried by fixed edges between conjugate vertices.
pub const REFLECTED: &str = "reflected";

/// Parse `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Option<Rational64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Rational64::new(p.trim().parse().ok()?, q)
        }
        None => Rational64::from_integer(text.parse().ok()?),
    };
    Some(value)
}

/// Always `"p/q"`, reduced.
pub fn format_rational(x: &Rational64) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMetricGraph {
    graph: RealGraph,
    lengths: Vec<Rational64>,
}

impl QMetricGraph {
    /// Lengths are indexed like the edges of `graph`.
    pub fn new(graph: RealGraph, lengths: Vec<Rational64>) -> Result<Self> {
        if lengths.len() != graph.n_edges() {
            return Err(Error::PreconditionViolated(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.n_edges()
            )));
        }
        for e in 0..graph.n_edges() {
            if !lengths[e].is_positive() {
                return Err(Error::InvalidLength {
                    edge: graph.edge_id(e).to_owned(),
                    reason: "must be positive".into(),
                });
            }
            if lengths[graph.conj_edge(e)] != lengths[e] {
                return Err(Error::InvalidLength {
                    edge: graph.edge_id(e).to_owned(),
                    reason: "differs from the length of its conjugate".into(),
                });
            }
        }
        Ok(QMetricGraph { graph, lengths })
    }

    /// Every edge of length one.
    pub fn unit(graph: RealGraph) -> Self {
        let lengths = vec![Rational64::from_integer(1); graph.n_edges()];
        QMetricGraph { graph, lengths }
    }

    /// Missing lengths default to 1.
    pub fn from_raw(raw: &RawGraph) -> Result<Self> {
        let graph = RealGraph::from_raw(raw)?;
        let mut lengths = vec![Rational64::from_integer(1); graph.n_edges()];
        for edge in &raw.edges {
            let e = graph.edge_index(&edge.id).expect("validated");
            if let Some(text) = &edge.length {
                lengths[e] = parse_rational(text).ok_or_else(|| Error::InvalidLength {
                    edge: edge.id.clone(),
                    reason: format!("`{text}` is not a rational p/q"),
                })?;
            }
            match edge.kind.as_deref() {
                None => {}
                Some(REFLECTED) if graph.is_isolated_real_edge(e) => {}
                Some(kind) => {
                    return Err(Error::InvalidLength {
                        edge: edge.id.clone(),
                        reason: format!("kind `{kind}` does not match the real structure"),
                    })
                }
            }
        }
        QMetricGraph::new(graph, lengths)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        QMetricGraph::from_raw(&serde_json::from_str(text)?)
    }

    pub fn to_raw(&self) -> RawGraph {
        let mut raw = self.graph.to_raw();
        for edge in &mut raw.edges {
            let e = self.graph.edge_index(&edge.id).expect("own edge");
            edge.length = Some(format_rational(&self.lengths[e]));
            if self.is_reflected(e) {
                edge.kind = Some(REFLECTED.to_owned());
            }
        }
        raw
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("graph serialization cannot fail")
    }

    pub fn graph(&self) -> &RealGraph {
        &self.graph
    }

    pub fn length(&self, e: usize) -> Rational64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[Rational64] {
        &self.lengths
    }

    /// Fixed edge whose ends are swapped: the involution reflects it about
    /// its midpoint, which is a real point.
    pub fn is_reflected(&self, e: usize) -> bool {
        self.graph.is_isolated_real_edge(e)
    }

    /// Every length multiplied by `factor`.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        let lengths = self.lengths.iter().map(|l| l * Rational64::from_integer(factor)).collect();
        QMetricGraph::new(self.graph.clone(), lengths)
    }

    /// The point at `offset` along `e`; endpoints become vertex points.
    pub fn edge_point(&self, e: usize, offset: Rational64) -> Result<QPoint> {
        let len = self.lengths[e];
        let (a, b) = self.graph.ends(e);
        if offset.is_zero() {
            Ok(QPoint::Vertex(a))
        } else if offset == len {
            Ok(QPoint::Vertex(b))
        } else if offset.is_negative() || offset > len {
            Err(Error::IrrationalPoint(format!(
                "offset {} outside edge `{}` of length {}",
                format_rational(&offset),
                self.graph.edge_id(e),
                format_rational(&len)
            )))
        } else {
            Ok(QPoint::Edge { edge: e, offset })
        }
    }

    pub fn conjugate_point(&self, p: &QPoint) -> QPoint {
        match *p {
            QPoint::Vertex(v) => QPoint::Vertex(self.graph.conj_vertex(v)),
            QPoint::Edge { edge, offset } => {
                let ebar = self.graph.conj_edge(edge);
                let offset = if conj_aligned(&self.graph, edge) { offset } else { self.lengths[edge] - offset };
                QPoint::Edge { edge: ebar, offset }
            }
        }
    }

    pub fn is_real_point(&self, p: &QPoint) -> bool {
        self.conjugate_point(p) == *p
    }

    pub fn point_to_json(&self, p: &QPoint) -> Value {
        match p {
            QPoint::Vertex(v) => serde_json::json!(["vertex", self.graph.vertex_id(*v)]),
            QPoint::Edge { edge, offset } => {
                serde_json::json!(["edge", self.graph.edge_id(*edge), format_rational(offset)])
            }
        }
    }

    pub fn point_from_json(&self, value: &Value) -> Result<QPoint> {
        let bad = || Error::IrrationalPoint(value.to_string());
        let items = value.as_array().ok_or_else(bad)?;
        let text = |i: usize| items.get(i).and_then(Value::as_str).ok_or_else(bad);
        match (text(0)?, items.len()) {
            ("vertex", 2) => {
                let id = text(1)?;
                let v =
                    self.graph.vertex_index(id).ok_or_else(|| Error::UnknownId { map: "point", id: id.to_owned() })?;
                Ok(QPoint::Vertex(v))
            }
            ("edge", 3) => {
                let id = text(1)?;
                let e =
                    self.graph.edge_index(id).ok_or_else(|| Error::UnknownId { map: "point", id: id.to_owned() })?;
                let offset = parse_rational(text(2)?).ok_or_else(bad)?;
                self.edge_point(e, offset)
            }
            _ => Err(bad()),
        }
    }
}

impl FromStr for QMetricGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QMetricGraph::from_json(s)
    }
}

/// A rational point: a vertex, or an interior point of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QPoint {
    Vertex(usize),
    Edge { edge: usize, offset: Rational64 },
}

/// Finitely supported integer combination of rational points.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct QDivisor {
    coefficients: BTreeMap<QPoint, i64>,
}

impl QDivisor {
    pub fn new() -> Self {
        QDivisor::default()
    }

    pub fn point(p: QPoint, coefficient: i64) -> Self {
        let mut d = QDivisor::new();
        d.add(p, coefficient);
        d
    }

    pub fn add(&mut self, p: QPoint, amount: i64) {
        let c = self.coefficients.entry(p).or_insert(0);
        *c += amount;
        if *c == 0 {
            self.coefficients.remove(&p);
        }
    }

    pub fn coefficient(&self, p: &QPoint) -> i64 {
        self.coefficients.get(p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QPoint, &i64)> {
        self.coefficients.iter()
    }

    pub fn support(&self) -> Vec<QPoint> {
        self.coefficients.keys().copied().collect()
    }

    pub fn degree(&self) -> i64 {
        self.coefficients.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.coefficients.values().all(|&c| c >= 0)
    }

    pub fn conjugate(&self, gamma: &QMetricGraph) -> QDivisor {
        let mut out = QDivisor::new();
        for (p, &c) in &self.coefficients {
            out.add(gamma.conjugate_point(p), c);
        }
        out
    }

    pub fn is_real(&self, gamma: &QMetricGraph) -> bool {
        self.conjugate(gamma) == *self
    }

    /// Supported on real points only.
    pub fn is_totally_real(&self, gamma: &QMetricGraph) -> bool {
        self.coefficients.keys().all(|p| gamma.is_real_point(p))
    }

    /// `[[point, coefficient], …]` in point order.
    pub fn to_json_value(&self, gamma: &QMetricGraph) -> Value {
        Value::Array(self.coefficients.iter().map(|(p, c)| serde_json::json!([gamma.point_to_json(p), c])).collect())
    }

    pub fn to_json(&self, gamma: &QMetricGraph) -> String {
        self.to_json_value(gamma).to_string()
    }

    pub fn from_json_value(gamma: &QMetricGraph, value: &Value) -> Result<Self> {
        let bad = || Error::PreconditionViolated(format!("not a list of [point, coefficient]: {value}"));
        let mut d = QDivisor::new();
        for entry in value.as_array().ok_or_else(bad)? {
            match entry.as_array().map(Vec::as_slice) {
                Some([p, c]) => d.add(gamma.point_from_json(p)?, c.as_i64().ok_or_else(bad)?),
                _ => return Err(bad()),
            }
        }
        Ok(d)
    }

    pub fn from_json(gamma: &QMetricGraph, text: &str) -> Result<Self> {
        QDivisor::from_json_value(gamma, &serde_json::from_str(text)?)
    }
}

/// `(g, s, a)` of the metric graph; reflected edges count as isolated real
/// edges, so these are the invariants of the model graph.
pub fn metric_invariants(gamma: &QMetricGraph) -> InvariantReport {
    invariants(&gamma.graph)
}

/// Components of the real locus: those of the model graph's real locus,
/// followed by one midpoint per reflected edge in edge order.
pub fn metric_real_locus_component_count(gamma: &QMetricGraph) -> usize {
    let g = &gamma.graph;
    real_locus_components(g).len() + (0..g.n_edges()).filter(|&e| gamma.is_reflected(e)).count()
}

/// `s(Γ) = g(Γ) + 1`.
pub fn is_m_metric_graph(gamma: &QMetricGraph) -> bool {
    let inv = metric_invariants(gamma);
    inv.s == inv.genus + 1
}

/// The real locus has `g(Γ) + 1` components.
pub fn is_strong_m_metric_graph(gamma: &QMetricGraph) -> bool {
    metric_real_locus_component_count(gamma) as i64 == gamma.graph.genus() + 1
}

/// Random graph from [`random_real_graph`] with lengths `p/q`, where one
/// denominator `q ≤ max_denominator` is drawn per graph and `1 ≤ p ≤ q`.
pub fn random_metric_graph(
    seed: u64,
    max_vertices: usize,
    max_edges: usize,
    profile: GraphProfile,
    max_denominator: i64,
) -> QMetricGraph {
    let graph = random_real_graph(seed, max_vertices, max_edges, profile);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d65_7472_6963);
    let q = rng.random_range(1..=max_denominator.max(1));
    let mut lengths = vec![Rational64::zero(); graph.n_edges()];
    for e in 0..graph.n_edges() {
        let ebar = graph.conj_edge(e);
        if ebar < e {
            lengths[e] = lengths[ebar];
        } else {
            lengths[e] = Rational64::new(rng.random_range(1..=q), q);
        }
    }
    QMetricGraph::new(graph, lengths).expect("conjugate edges share lengths")
}
