//! Python module `pyrealchip`. Divisors cross the boundary as
//! `dict[str, int]` keyed by vertex id; metric divisors as JSON text
//! `[[point, coefficient], ...]`.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use realchip::builders::{self, GraphProfile};
use realchip::metric::{self, QDivisor, QMetricGraph};
use realchip::properties::{parse_property_list, run_fuzz, FuzzConfig, Limits};
use realchip::{divisor, real, Budget, Divisor, InvariantReport};

create_exception!(pyrealchip, RealchipError, PyValueError);
create_exception!(pyrealchip, BudgetExceededError, RealchipError);
create_exception!(pyrealchip, CounterexampleError, RealchipError);

type Ids = BTreeMap<String, i64>;

fn lift<T>(result: realchip::Result<T>) -> PyResult<T> {
    result.map_err(|e| {
        if e.is_budget() {
            BudgetExceededError::new_err(e.to_string())
        } else if e.is_counterexample() {
            CounterexampleError::new_err(e.to_string())
        } else {
            RealchipError::new_err(e.to_string())
        }
    })
}

fn parse_profile(name: &str) -> PyResult<GraphProfile> {
    name.parse().map_err(|e: String| RealchipError::new_err(e))
}

fn report_dict<'py>(
    py: Python<'py>,
    g: &realchip::RealGraph,
    report: &InvariantReport,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("genus", report.genus)?;
    dict.set_item("s_prime", report.s_prime)?;
    dict.set_item("isolated_real_edges", report.isolated_real_edge_count)?;
    dict.set_item("s", report.s)?;
    dict.set_item("a", report.a)?;
    let components: Vec<Vec<String>> = report.components_of_real_locus.iter().map(|c| c.vertex_ids(g)).collect();
    dict.set_item("real_locus_components", components)?;
    dict.set_item("violations", report.bound_violations())?;
    Ok(dict)
}

/// A finite graph with a real structure.
#[pyclass(name = "RealGraph", frozen)]
struct PyRealGraph {
    inner: realchip::RealGraph,
}

impl PyRealGraph {
    fn divisor(&self, ids: &Ids) -> PyResult<Divisor> {
        lift(Divisor::from_ids(&self.inner, ids))
    }

    fn vertex(&self, id: &str) -> PyResult<usize> {
        self.inner.vertex_index(id).ok_or_else(|| RealchipError::new_err(format!("unknown vertex `{id}`")))
    }
}

#[pymethods]
impl PyRealGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRealGraph { inner: lift(realchip::RealGraph::from_json(text))? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        self.inner.vertex_ids().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<String> {
        self.inner.edge_ids().to_vec()
    }

    #[getter]
    fn genus(&self) -> i64 {
        self.inner.genus()
    }

    fn conjugate_vertex(&self, id: &str) -> PyResult<String> {
        Ok(self.inner.vertex_id(self.inner.conj_vertex(self.vertex(id)?)).to_owned())
    }

    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report_dict(py, &self.inner, &realchip::invariants(&self.inner))
    }

    fn is_m_graph(&self) -> bool {
        real::is_m_graph(&self.inner)
    }

    fn is_strong_m_graph(&self) -> bool {
        real::is_strong_m_graph(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("RealGraph({} vertices, {} edges)", self.inner.n_vertices(), self.inner.n_edges())
    }
}

/// A graph with a real structure and positive rational edge lengths.
#[pyclass(name = "MetricGraph", frozen)]
struct PyMetricGraph {
    inner: QMetricGraph,
}

impl PyMetricGraph {
    fn divisor(&self, text: &str) -> PyResult<QDivisor> {
        lift(QDivisor::from_json(&self.inner, text))
    }
}

#[pymethods]
impl PyMetricGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMetricGraph { inner: lift(QMetricGraph::from_json(text))? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Edge lengths as `"p/q"` strings keyed by edge id.
    #[getter]
    fn lengths(&self) -> BTreeMap<String, String> {
        let g = self.inner.graph();
        (0..g.n_edges()).map(|e| (g.edge_id(e).to_owned(), metric::format_rational(&self.inner.length(e)))).collect()
    }

    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report_dict(py, self.inner.graph(), &metric::metric_invariants(&self.inner))
    }

    fn is_m_graph(&self) -> bool {
        metric::is_m_metric_graph(&self.inner)
    }

    fn is_strong_m_graph(&self) -> bool {
        metric::is_strong_m_metric_graph(&self.inner)
    }

    fn __repr__(&self) -> String {
        let g = self.inner.graph();
        format!("MetricGraph({} vertices, {} edges)", g.n_vertices(), g.n_edges())
    }
}

fn wrap(inner: realchip::RealGraph) -> PyRealGraph {
    PyRealGraph { inner }
}

#[pyfunction]
fn example1(g: i64, s: i64, a: u8) -> PyResult<PyRealGraph> {
    lift(builders::example1(g, s, a)).map(wrap)
}

/// Two swapped copies of `base` joined through a real vertex `v`.
#[pyfunction]
#[pyo3(signature = (base, attach=None))]
fn example2(base: &PyRealGraph, attach: Option<&str>) -> PyResult<PyRealGraph> {
    let at = attach.map(|id| base.vertex(id)).transpose()?.unwrap_or(0);
    lift(builders::example2(&base.inner, at)).map(|(g, _)| wrap(g))
}

#[pyfunction]
fn cycle_graph(n: usize) -> PyResult<PyRealGraph> {
    lift(builders::cycle_graph(n)).map(wrap)
}

#[pyfunction]
#[pyo3(signature = (seed, max_vertices=10, max_edges=16, profile="mixed"))]
fn random_real_graph(seed: u64, max_vertices: usize, max_edges: usize, profile: &str) -> PyResult<PyRealGraph> {
    Ok(wrap(builders::random_real_graph(seed, max_vertices.max(1), max_edges, parse_profile(profile)?)))
}

#[pyfunction]
#[pyo3(signature = (seed, max_vertices=5, max_edges=6, profile="mixed", max_denominator=4))]
fn random_metric_graph(
    seed: u64,
    max_vertices: usize,
    max_edges: usize,
    profile: &str,
    max_denominator: i64,
) -> PyResult<PyMetricGraph> {
    let profile = parse_profile(profile)?;
    let inner = metric::random_metric_graph(seed, max_vertices.max(1), max_edges, profile, max_denominator);
    Ok(PyMetricGraph { inner })
}

#[pyfunction]
fn subdivide(g: &PyRealGraph, parts: usize) -> PyResult<PyRealGraph> {
    lift(builders::subdivide(&g.inner, parts)).map(wrap)
}

#[pyfunction]
fn edge_split(g: &PyRealGraph) -> PyRealGraph {
    wrap(builders::edge_split(&g.inner))
}

#[pyfunction]
fn rank(g: &PyRealGraph, d: Ids) -> PyResult<i64> {
    lift(divisor::rank(&g.inner, &g.divisor(&d)?, &Budget::from_env()))
}

#[pyfunction]
fn real_rank(g: &PyRealGraph, d: Ids) -> PyResult<i64> {
    lift(real::real_rank(&g.inner, &g.divisor(&d)?, &Budget::from_env()))
}

/// A potential `f` with `d1 + Δ(f) = d2`, or `None`.
#[pyfunction]
fn linearly_equivalent(g: &PyRealGraph, d1: Ids, d2: Ids) -> PyResult<Option<Ids>> {
    let witness = divisor::linearly_equivalent(&g.inner, &g.divisor(&d1)?, &g.divisor(&d2)?);
    Ok(witness.map(|f| f.to_ids(&g.inner)))
}

/// The `q`-reduced divisor equivalent to `d` and the potential reaching it.
#[pyfunction]
fn q_reduce(g: &PyRealGraph, d: Ids, q: &str) -> PyResult<(Ids, Ids)> {
    let (reduced, f) = divisor::q_reduce(&g.inner, &g.divisor(&d)?, g.vertex(q)?);
    Ok((reduced.divisor.to_ids(&g.inner), f.to_ids(&g.inner)))
}

#[pyfunction]
fn is_q_reduced(g: &PyRealGraph, d: Ids, q: &str) -> PyResult<bool> {
    Ok(divisor::is_q_reduced(&g.inner, &g.divisor(&d)?, g.vertex(q)?))
}

#[pyfunction]
fn complete_linear_system(g: &PyRealGraph, d: Ids) -> PyResult<Vec<Ids>> {
    let members = lift(divisor::complete_linear_system(&g.inner, &g.divisor(&d)?, &Budget::from_env()))?;
    Ok(members.iter().map(|m| m.to_ids(&g.inner)).collect())
}

#[pyfunction]
fn conjugate(g: &PyRealGraph, d: Ids) -> PyResult<Ids> {
    Ok(real::conjugate(&g.inner, &g.divisor(&d)?).to_ids(&g.inner))
}

#[pyfunction]
fn is_real(g: &PyRealGraph, d: Ids) -> PyResult<bool> {
    Ok(real::is_real(&g.inner, &g.divisor(&d)?))
}

#[pyfunction]
fn is_totally_real(g: &PyRealGraph, d: Ids) -> PyResult<bool> {
    Ok(real::is_totally_real(&g.inner, &g.divisor(&d)?))
}

#[pyfunction]
fn parity_signature(g: &PyRealGraph, d: Ids) -> PyResult<Vec<u8>> {
    lift(real::parity_signature(&g.inner, &g.divisor(&d)?)).map(|s| s.0)
}

#[pyfunction]
fn totally_real_reduction(g: &PyRealGraph, d: Ids) -> PyResult<(Ids, Ids)> {
    let (reduced, f) = lift(real::totally_real_reduction(&g.inner, &g.divisor(&d)?))?;
    Ok((reduced.to_ids(&g.inner), f.to_ids(&g.inner)))
}

#[pyfunction]
fn find_real_g12(g: &PyRealGraph) -> PyResult<(Ids, i64)> {
    let (d, r) = lift(real::find_real_g12(&g.inner, &Budget::from_env()))?;
    Ok((d.to_ids(&g.inner), r))
}

#[pyfunction]
#[pyo3(signature = (gamma, d, refine=1))]
fn metric_rank(gamma: &PyMetricGraph, d: &str, refine: i64) -> PyResult<i64> {
    lift(metric::metric_rank_refined(&gamma.inner, &gamma.divisor(d)?, refine, &Budget::from_env()))
}

#[pyfunction]
#[pyo3(signature = (gamma, d, refine=1))]
fn metric_real_rank(gamma: &PyMetricGraph, d: &str, refine: i64) -> PyResult<i64> {
    lift(metric::metric_real_rank_refined(&gamma.inner, &gamma.divisor(d)?, refine, &Budget::from_env()))
}

#[pyfunction]
fn metric_equivalent(gamma: &PyMetricGraph, d1: &str, d2: &str) -> PyResult<bool> {
    let (a, b) = (gamma.divisor(d1)?, gamma.divisor(d2)?);
    lift(metric::metric_equivalent(&gamma.inner, &a, &b, &Budget::from_env())).map(|w| w.is_some())
}

#[pyfunction]
fn metric_parity_signature(gamma: &PyMetricGraph, d: &str) -> PyResult<Vec<u8>> {
    lift(metric::metric_parity_signature(&gamma.inner, &gamma.divisor(d)?)).map(|s| s.0)
}

/// The totally real divisor, as JSON text.
#[pyfunction]
fn metric_totally_real_reduction(gamma: &PyMetricGraph, d: &str) -> PyResult<String> {
    let (reduced, _) =
        lift(metric::metric_totally_real_reduction(&gamma.inner, &gamma.divisor(d)?, &Budget::from_env()))?;
    Ok(reduced.to_json(&gamma.inner))
}

/// The pencil as JSON text, and its rank.
#[pyfunction]
fn metric_find_real_g12(gamma: &PyMetricGraph) -> PyResult<(String, i64)> {
    let (d, r) = lift(metric::metric_find_real_g12(&gamma.inner, &Budget::from_env()))?;
    Ok((d.to_json(&gamma.inner), r))
}

/// Run the property suite; returns the summary as a dict.
#[pyfunction]
#[pyo3(signature = (seed=0, trials=100, properties="all", max_vertices=10, max_edges=16, jobs=0))]
fn fuzz(
    py: Python<'_>,
    seed: u64,
    trials: u64,
    properties: &str,
    max_vertices: usize,
    max_edges: usize,
    jobs: usize,
) -> PyResult<Py<PyAny>> {
    let config = FuzzConfig {
        seed,
        trials,
        limits: Limits { max_vertices: max_vertices.max(1), max_edges },
        properties: parse_property_list(properties).map_err(RealchipError::new_err)?,
        jobs,
        budget: Budget::from_env(),
    };
    let summary = py.detach(|| run_fuzz(&config));
    let text = lift(summary)?.to_json_value().to_string();
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pymodule]
fn pyrealchip(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("RealchipError", py.get_type::<RealchipError>())?;
    m.add("BudgetExceededError", py.get_type::<BudgetExceededError>())?;
    m.add("CounterexampleError", py.get_type::<CounterexampleError>())?;
    m.add_class::<PyRealGraph>()?;
    m.add_class::<PyMetricGraph>()?;
    m.add_function(wrap_pyfunction!(example1, m)?)?;
    m.add_function(wrap_pyfunction!(example2, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_graph, m)?)?;
    m.add_function(wrap_pyfunction!(random_real_graph, m)?)?;
    m.add_function(wrap_pyfunction!(random_metric_graph, m)?)?;
    m.add_function(wrap_pyfunction!(subdivide, m)?)?;
    m.add_function(wrap_pyfunction!(edge_split, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(real_rank, m)?)?;
    m.add_function(wrap_pyfunction!(linearly_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(q_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(is_q_reduced, m)?)?;
    m.add_function(wrap_pyfunction!(complete_linear_system, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(is_real, m)?)?;
    m.add_function(wrap_pyfunction!(is_totally_real, m)?)?;
    m.add_function(wrap_pyfunction!(parity_signature, m)?)?;
    m.add_function(wrap_pyfunction!(totally_real_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(find_real_g12, m)?)?;
    m.add_function(wrap_pyfunction!(metric_rank, m)?)?;
    m.add_function(wrap_pyfunction!(metric_real_rank, m)?)?;
    m.add_function(wrap_pyfunction!(metric_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(metric_parity_signature, m)?)?;
    m.add_function(wrap_pyfunction!(metric_totally_real_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(metric_find_real_g12, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    Ok(())
}
