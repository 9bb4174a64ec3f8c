use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Rational64;

use super::{QDivisor, QMetricGraph, QPoint};
use crate::builders::{chain_vertex_id, subdivide_with};
use crate::divisor::{Divisor, PotentialFunction};
use crate::enumerate::Budget;
use crate::error::{Error, Result};
use crate::graph::RealGraph;

/// Unit-length model of a metric graph: every edge of length `l` is cut into
/// `l · scale` pieces, so each piece has length `1 / scale`.
#[derive(Debug, Clone)]
pub struct ModelReduction {
    pub scale: i64,
    pub model: RealGraph,
    pieces: Vec<usize>,
    points: Vec<QPoint>,
}

impl ModelReduction {
    /// Number of model edges along base edge `e`.
    pub fn pieces(&self, e: usize) -> usize {
        self.pieces[e]
    }

    /// The metric point sitting at model vertex `v`.
    pub fn point_of(&self, v: usize) -> QPoint {
        self.points[v]
    }

    /// The model vertex at `p`, if `p` lies on the model grid.
    pub fn vertex_of(&self, gamma: &QMetricGraph, p: &QPoint) -> Result<usize> {
        let g = gamma.graph();
        let id = match *p {
            QPoint::Vertex(v) => g.vertex_id(v).to_owned(),
            QPoint::Edge { edge, offset } => {
                let position = offset * Rational64::from_integer(self.scale);
                if !position.is_integer() {
                    return Err(Error::PreconditionViolated(format!(
                        "offset {} on `{}` is not on the grid of scale {}",
                        super::format_rational(&offset),
                        g.edge_id(edge),
                        self.scale
                    )));
                }
                chain_vertex_id(g, edge, position.to_integer() as usize, self.pieces[edge])
            }
        };
        Ok(self.model.vertex_index(&id).expect("grid points are model vertices"))
    }

    pub fn push(&self, gamma: &QMetricGraph, d: &QDivisor) -> Result<Divisor> {
        let mut out = Divisor::zero(self.model.n_vertices());
        for (p, &c) in d.iter() {
            out.add_at(self.vertex_of(gamma, p)?, c);
        }
        Ok(out)
    }

    pub fn lift(&self, d: &Divisor) -> QDivisor {
        let mut out = QDivisor::new();
        for v in d.support() {
            out.add(self.points[v], d[v]);
        }
        out
    }

    /// Values of a model potential, divided by the scale so that slopes are
    /// measured in metric length.
    pub fn lift_potential(&self, gamma: &QMetricGraph, f: &PotentialFunction) -> super::MetricPotential {
        super::MetricPotential::from_model(gamma, self, f)
    }
}

fn denominators_lcm<'a>(values: impl IntoIterator<Item = &'a Rational64>) -> i64 {
    values.into_iter().fold(1, |acc, x| acc.lcm(x.denom()))
}

/// Least scale putting every vertex and every support point on the grid
/// and cutting every loop into at least two pieces.
fn base_scale(gamma: &QMetricGraph, supports: &[QPoint]) -> i64 {
    let offsets: Vec<Rational64> = supports
        .iter()
        .filter_map(|p| match p {
            QPoint::Edge { offset, .. } => Some(*offset),
            QPoint::Vertex(_) => None,
        })
        .collect();
    let scale = denominators_lcm(gamma.lengths()).lcm(&denominators_lcm(&offsets));
    let g = gamma.graph();
    // chip-firing ignores loops, so a loop must become a genuine cycle
    let unit = Rational64::from_integer(1);
    if (0..g.n_edges()).any(|e| g.is_loop(e) && gamma.length(e) * Rational64::from_integer(scale) == unit) {
        2 * scale
    } else {
        scale
    }
}

pub fn reduce_to_model(gamma: &QMetricGraph, supports: &[QPoint], budget: &Budget) -> Result<ModelReduction> {
    reduce_to_model_refined(gamma, supports, 1, budget)
}

/// Like [`reduce_to_model`] with the scale multiplied by `refine`.
pub fn reduce_to_model_refined(
    gamma: &QMetricGraph,
    supports: &[QPoint],
    refine: i64,
    budget: &Budget,
) -> Result<ModelReduction> {
    let g = gamma.graph();
    for p in supports {
        if let QPoint::Edge { edge, offset } = *p {
            if edge >= g.n_edges() || gamma.edge_point(edge, offset)? != *p {
                return Err(Error::IrrationalPoint(format!("{p:?}")));
            }
        } else if let QPoint::Vertex(v) = *p {
            if v >= g.n_vertices() {
                return Err(Error::IrrationalPoint(format!("{p:?}")));
            }
        }
    }
    if refine < 1 {
        return Err(Error::PreconditionViolated("refinement factor must be ≥ 1".into()));
    }
    let scale = base_scale(gamma, supports)
        .checked_mul(refine)
        .ok_or(Error::BudgetExceeded { required: u128::MAX, cap: budget.max_enumeration })?;
    let mut pieces = Vec::with_capacity(g.n_edges());
    let mut total: u128 = 0;
    for &len in gamma.lengths() {
        let n = (len * Rational64::from_integer(scale)).to_integer() as u128;
        total += n;
        pieces.push(n as usize);
    }
    if total > budget.max_enumeration as u128 {
        return Err(Error::BudgetExceeded { required: total, cap: budget.max_enumeration });
    }
    let model = subdivide_with(g, |e| pieces[e])?;

    let mut by_id: HashMap<String, QPoint> = HashMap::new();
    for v in 0..g.n_vertices() {
        by_id.insert(g.vertex_id(v).to_owned(), QPoint::Vertex(v));
    }
    for (e, &n) in pieces.iter().enumerate() {
        for i in 1..n {
            let offset = Rational64::new(i as i64, scale);
            by_id.insert(chain_vertex_id(g, e, i, n), QPoint::Edge { edge: e, offset });
        }
    }
    let points = model.vertex_ids().iter().map(|id| by_id[id]).collect();
    Ok(ModelReduction { scale, model, pieces, points })
}
