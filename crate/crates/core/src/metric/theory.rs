use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde_json::Value;

use super::{
    format_rational, is_m_metric_graph, is_strong_m_metric_graph, reduce_to_model_refined, ModelReduction, QDivisor,
    QMetricGraph, QPoint,
};
use crate::builders::conj_aligned;
use crate::divisor::{linearly_equivalent, rank, PotentialFunction};
use crate::enumerate::Budget;
use crate::error::{Error, Result};
use crate::graph::real_locus_components;
use crate::real::{find_real_g12, real_rank, totally_real_reduction, ParitySignature};

/// Piecewise-linear function on a metric graph, linear on each piece of a
/// unit model and with integer slopes there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricPotential {
    pub scale: i64,
    vertex_values: Vec<Rational64>,
    /// Values at the grid positions `0..=pieces` of every edge.
    edge_values: Vec<Vec<Rational64>>,
}

impl MetricPotential {
    pub(crate) fn from_model(gamma: &QMetricGraph, red: &ModelReduction, f: &PotentialFunction) -> Self {
        let g = gamma.graph();
        let scale = Rational64::from_integer(red.scale);
        let value = |v: usize| Rational64::from_integer(f[v]) / scale;
        let mut vertex_values = vec![Rational64::zero(); g.n_vertices()];
        let mut edge_values: Vec<Vec<Rational64>> =
            (0..g.n_edges()).map(|e| vec![Rational64::zero(); red.pieces(e) + 1]).collect();
        for v in 0..red.model.n_vertices() {
            match red.point_of(v) {
                QPoint::Vertex(b) => vertex_values[b] = value(v),
                QPoint::Edge { edge, offset } => {
                    edge_values[edge][(offset * scale).to_integer() as usize] = value(v);
                }
            }
        }
        for (e, values) in edge_values.iter_mut().enumerate() {
            let (a, b) = g.ends(e);
            values[0] = vertex_values[a];
            *values.last_mut().expect("at least one piece") = vertex_values[b];
        }
        MetricPotential { scale: red.scale, vertex_values, edge_values }
    }

    pub fn evaluate(&self, gamma: &QMetricGraph, p: &QPoint) -> Rational64 {
        match *p {
            QPoint::Vertex(v) => self.vertex_values[v],
            QPoint::Edge { edge, offset } => {
                let x = offset * Rational64::from_integer(self.scale);
                let i = x.floor().to_integer() as usize;
                let values = &self.edge_values[edge];
                if i + 1 >= values.len() {
                    return values[values.len() - 1];
                }
                let t = x - x.floor();
                debug_assert!(gamma.length(edge) * Rational64::from_integer(self.scale) >= x);
                values[i] + (values[i + 1] - values[i]) * t
            }
        }
    }

    /// Slopes of each piece along `e`, in the stored direction.
    pub fn slopes(&self, e: usize) -> Vec<Rational64> {
        let scale = Rational64::from_integer(self.scale);
        self.edge_values[e].windows(2).map(|w| (w[1] - w[0]) * scale).collect()
    }

    /// Invariant under the involution as a function on the metric graph.
    pub fn is_real(&self, gamma: &QMetricGraph) -> bool {
        let g = gamma.graph();
        let vertices_ok = (0..g.n_vertices()).all(|v| self.vertex_values[v] == self.vertex_values[g.conj_vertex(v)]);
        vertices_ok
            && (0..g.n_edges()).all(|e| {
                let (mine, theirs) = (&self.edge_values[e], &self.edge_values[g.conj_edge(e)]);
                if conj_aligned(g, e) {
                    mine == theirs
                } else {
                    mine.iter().eq(theirs.iter().rev())
                }
            })
    }

    pub fn to_json_value(&self, gamma: &QMetricGraph) -> Value {
        let g = gamma.graph();
        let vertices: BTreeMap<&str, String> =
            (0..g.n_vertices()).map(|v| (g.vertex_id(v), format_rational(&self.vertex_values[v]))).collect();
        let edges: BTreeMap<&str, Vec<String>> = (0..g.n_edges())
            .map(|e| (g.edge_id(e), self.edge_values[e].iter().map(format_rational).collect()))
            .collect();
        serde_json::json!({ "scale": self.scale, "vertices": vertices, "edges": edges })
    }
}

fn supports_of(divisors: &[&QDivisor]) -> Vec<QPoint> {
    let mut out: Vec<QPoint> = divisors.iter().flat_map(|d| d.support()).collect();
    out.sort();
    out.dedup();
    out
}

/// Midpoints of the edges whose ends lie in one vertex orbit. Real
/// effective divisors through these points are invisible to coarser grids,
/// so every computation involving the real structure puts them on the grid.
fn folding_midpoints(gamma: &QMetricGraph) -> Vec<QPoint> {
    let g = gamma.graph();
    (0..g.n_edges())
        .filter(|&e| {
            let (a, b) = g.ends(e);
            a == b || a == g.conj_vertex(b)
        })
        .map(|e| QPoint::Edge { edge: e, offset: gamma.length(e) / 2 })
        .collect()
}

fn with_folding_midpoints(gamma: &QMetricGraph, d: &QDivisor) -> Vec<QPoint> {
    let mut supports = d.support();
    supports.extend(folding_midpoints(gamma));
    supports
}

/// A piecewise-linear `f` with `D1 + Δ(f) = D2`, if one exists on the
/// common unit model.
pub fn metric_equivalent(
    gamma: &QMetricGraph,
    d1: &QDivisor,
    d2: &QDivisor,
    budget: &Budget,
) -> Result<Option<MetricPotential>> {
    let red = reduce_to_model_refined(gamma, &supports_of(&[d1, d2]), 1, budget)?;
    let (m1, m2) = (red.push(gamma, d1)?, red.push(gamma, d2)?);
    Ok(linearly_equivalent(&red.model, &m1, &m2).map(|f| MetricPotential::from_model(gamma, &red, &f)))
}

pub fn metric_rank(gamma: &QMetricGraph, d: &QDivisor, budget: &Budget) -> Result<i64> {
    metric_rank_refined(gamma, d, 1, budget)
}

/// Rank on the unit model whose scale is `refine` times the least one.
pub fn metric_rank_refined(gamma: &QMetricGraph, d: &QDivisor, refine: i64, budget: &Budget) -> Result<i64> {
    let red = reduce_to_model_refined(gamma, &d.support(), refine, budget)?;
    rank(&red.model, &red.push(gamma, d)?, budget)
}

pub fn metric_real_rank(gamma: &QMetricGraph, d: &QDivisor, budget: &Budget) -> Result<i64> {
    metric_real_rank_refined(gamma, d, 1, budget)
}

pub fn metric_real_rank_refined(gamma: &QMetricGraph, d: &QDivisor, refine: i64, budget: &Budget) -> Result<i64> {
    if !d.is_real(gamma) {
        return Err(Error::NotReal);
    }
    let red = reduce_to_model_refined(gamma, &with_folding_midpoints(gamma, d), refine, budget)?;
    real_rank(&red.model, &red.push(gamma, d)?, budget)
}

/// Degree parity on each component of the real locus: the real locus
/// components of the graph, then the midpoints of reflected edges.
pub fn metric_parity_signature(gamma: &QMetricGraph, d: &QDivisor) -> Result<ParitySignature> {
    if !d.is_real(gamma) {
        return Err(Error::NotReal);
    }
    let g = gamma.graph();
    let components = real_locus_components(g);
    let reflected: Vec<usize> = (0..g.n_edges()).filter(|&e| gamma.is_reflected(e)).collect();
    let mut sums = vec![0i64; components.len() + reflected.len()];
    for (p, &c) in d.iter() {
        let slot = match *p {
            QPoint::Vertex(v) => components.iter().position(|comp| comp.contains_vertex(v)),
            QPoint::Edge { edge, offset } => {
                components.iter().position(|comp| comp.contains_edge(edge)).or_else(|| {
                    reflected
                        .iter()
                        .position(|&r| r == edge && offset * 2 == gamma.length(edge))
                        .map(|i| components.len() + i)
                })
            }
        };
        if let Some(i) = slot {
            sums[i] += c;
        }
    }
    Ok(ParitySignature(sums.into_iter().map(|s| s.rem_euclid(2) as u8).collect()))
}

/// A totally real effective divisor equivalent to the real effective `d`
/// on an M-metric graph, with the piecewise-linear witness.
pub fn metric_totally_real_reduction(
    gamma: &QMetricGraph,
    d: &QDivisor,
    budget: &Budget,
) -> Result<(QDivisor, MetricPotential)> {
    if !is_m_metric_graph(gamma) {
        return Err(Error::NotMMetricGraph);
    }
    if !d.is_real(gamma) || !d.is_effective() {
        return Err(Error::NotRealEffective);
    }
    let red = reduce_to_model_refined(gamma, &with_folding_midpoints(gamma, d), 1, budget)?;
    let (reduced, f) = totally_real_reduction(&red.model, &red.push(gamma, d)?)?;
    Ok((red.lift(&reduced), MetricPotential::from_model(gamma, &red, &f)))
}

/// A real effective degree-2 divisor of rank ≥ 1 on a strong M-metric graph,
/// with its rank.
pub fn metric_find_real_g12(gamma: &QMetricGraph, budget: &Budget) -> Result<(QDivisor, i64)> {
    if !is_strong_m_metric_graph(gamma) {
        return Err(Error::NotStrongMMetricGraph);
    }
    let red = reduce_to_model_refined(gamma, &folding_midpoints(gamma), 1, budget)?;
    let (d, r) = find_real_g12(&red.model, budget)?;
    Ok((red.lift(&d), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{example1, example2};
    use crate::graph::{RawGraph, RealGraph};
    use crate::metric::tests::reflected_edge;

    fn budget() -> Budget {
        Budget::default()
    }

    fn circle() -> QMetricGraph {
        let mut raw = RawGraph::default();
        raw.add_vertex("a");
        raw.add_vertex("b");
        raw.add_edge("x", "a", "b");
        raw.add_edge("y", "a", "b");
        QMetricGraph::unit(RealGraph::from_raw(&raw).unwrap())
    }

    #[test]
    fn equal_divisors_need_no_function() {
        let gamma = circle();
        let d = QDivisor::point(QPoint::Vertex(0), 2);
        let f = metric_equivalent(&gamma, &d, &d, &budget()).unwrap().unwrap();
        assert!((0..2).all(|e| f.slopes(e).iter().all(Zero::is_zero)));
    }

    #[test]
    fn points_on_a_circle_are_not_equivalent() {
        let gamma = circle();
        let (a, b) = (QDivisor::point(QPoint::Vertex(0), 1), QDivisor::point(QPoint::Vertex(1), 1));
        assert!(metric_equivalent(&gamma, &a, &b, &budget()).unwrap().is_none());
    }

    #[test]
    fn vertex_pair_moves_to_a_doubled_midpoint() {
        let gamma = circle();
        let mut d1 = QDivisor::point(QPoint::Vertex(0), 1);
        d1.add(QPoint::Vertex(1), 1);
        let half = Rational64::new(1, 2);
        let d2 = QDivisor::point(gamma.edge_point(0, half).unwrap(), 2);
        let f = metric_equivalent(&gamma, &d1, &d2, &budget()).unwrap().unwrap();
        let mut antipodal = QDivisor::point(gamma.edge_point(0, half).unwrap(), 1);
        antipodal.add(gamma.edge_point(1, half).unwrap(), 1);
        assert!(metric_equivalent(&gamma, &d1, &antipodal, &budget()).unwrap().is_none());
        assert_eq!(f.scale, 2);
        let slopes = f.slopes(0);
        assert_eq!(slopes.len(), 2);
        assert!(slopes.iter().all(|s| s.is_integer() && !s.is_zero()));
    }

    #[test]
    fn example2_as_a_unit_metric_graph() {
        let base = {
            let mut raw = RawGraph::default();
            raw.add_vertex("x");
            raw.add_vertex("y");
            raw.add_edge("p", "x", "y");
            raw.add_edge("q", "x", "y");
            RealGraph::from_raw(&raw).unwrap()
        };
        let (g, d) = example2(&base, 0).unwrap();
        let gamma = QMetricGraph::unit(g.clone());
        let v = g.vertex_index("v").unwrap();
        let qd = QDivisor::point(QPoint::Vertex(v), d[v]);
        assert_eq!(metric_rank(&gamma, &qd, &budget()).unwrap(), 0);
        assert_eq!(metric_real_rank(&gamma, &qd, &budget()).unwrap(), 1);
    }

    #[test]
    fn reflected_midpoint_parity() {
        let gamma = reflected_edge(Rational64::from_integer(1));
        let mid = gamma.edge_point(0, Rational64::new(1, 2)).unwrap();
        let d = QDivisor::point(mid, 1);
        assert_eq!(metric_parity_signature(&gamma, &d).unwrap(), ParitySignature(vec![1]));
        assert!(metric_parity_signature(&gamma, &QDivisor::new()).unwrap().is_all_even());
        let mut pair = QDivisor::point(QPoint::Vertex(0), 1);
        pair.add(QPoint::Vertex(1), 1);
        let (reduced, f) = metric_totally_real_reduction(&gamma, &pair, &budget()).unwrap();
        assert_eq!(reduced, QDivisor::point(mid, 2));
        assert!(f.is_real(&gamma));
    }

    #[test]
    fn totally_real_input_is_kept() {
        let gamma = QMetricGraph::unit(example1(2, 3, 0).unwrap());
        let d = QDivisor::point(QPoint::Vertex(0), 3);
        let (reduced, _) = metric_totally_real_reduction(&gamma, &d, &budget()).unwrap();
        assert_eq!(reduced, d);
    }

    #[test]
    fn g12_on_a_tree_and_errors() {
        let gamma = reflected_edge(Rational64::new(1, 3));
        let (d, r) = metric_find_real_g12(&gamma, &budget()).unwrap();
        assert_eq!((d.degree(), r), (2, 2));
        assert!(d.is_real(&gamma));
        let not_m = QMetricGraph::unit(example1(3, 0, 1).unwrap());
        assert!(matches!(metric_find_real_g12(&not_m, &budget()), Err(Error::NotStrongMMetricGraph)));
        let d = QDivisor::point(QPoint::Vertex(0), 1);
        assert!(matches!(metric_totally_real_reduction(&not_m, &d, &budget()), Err(Error::NotMMetricGraph)));
    }
}
