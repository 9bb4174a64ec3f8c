use std::collections::BTreeMap;

use realchip::builders::{cycle_graph, edge_split, example1, example2, random_real_graph, subdivide, GraphProfile};
use realchip::divisor::{laplacian, linearly_equivalent, rank_with_obstruction};
use realchip::metric::{
    is_m_metric_graph, is_strong_m_metric_graph, metric_equivalent, metric_find_real_g12, metric_invariants,
    metric_parity_signature, metric_rank_refined, metric_real_rank_refined, metric_totally_real_reduction,
    random_metric_graph, QDivisor, QMetricGraph,
};
use realchip::properties::{run_fuzz, FuzzConfig, Limits, Property};
use realchip::real::{
    find_real_g12, is_m_graph, is_strong_m_graph, parity_signature, real_rank_certificate, totally_real_reduction,
    ParitySignature,
};
use realchip::{invariants, Budget, Divisor, InvariantReport, RealGraph};
use serde_json::{json, Value};

use crate::error::CliError;

pub type CliResult<T> = Result<T, CliError>;

/// A JSON report, flagged when it certifies a violated property.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub violated: bool,
}

impl Report {
    fn ok(json: Value) -> Self {
        Report { json, violated: false }
    }
}

pub fn parse_divisor(g: &RealGraph, text: &str) -> CliResult<Divisor> {
    let map: BTreeMap<String, i64> = serde_json::from_str(text)?;
    Ok(Divisor::from_ids(g, &map)?)
}

fn invariant_json(g: &RealGraph, report: &InvariantReport) -> Value {
    let components: Vec<Value> = report
        .components_of_real_locus
        .iter()
        .map(|c| json!({ "vertices": c.vertex_ids(g), "edges": c.edge_ids(g), "genus": c.genus(g) }))
        .collect();
    let violations = report.bound_violations();
    json!({
        "genus": report.genus,
        "s_prime": report.s_prime,
        "isolated_real_edges": report.isolated_real_edge_count,
        "s": report.s,
        "a": report.a,
        "real_locus_components": components,
        "bounds": if violations.is_empty() { "pass" } else { "fail" },
        "violations": violations,
    })
}

fn parity_json(signature: &ParitySignature) -> Value {
    json!({ "signature": signature.0, "all_even": signature.is_all_even() })
}

pub fn info(g: &RealGraph) -> Report {
    let report = invariants(g);
    let mut json = invariant_json(g, &report);
    json["m_graph"] = json!(is_m_graph(g));
    json["strong_m_graph"] = json!(is_strong_m_graph(g));
    Report { json, violated: !report.bounds_hold() }
}

pub fn rank(g: &RealGraph, d: &Divisor, real: bool, budget: &Budget) -> CliResult<Report> {
    if real {
        let cert = real_rank_certificate(g, d, budget)?;
        let (member, witness) = match &cert.member {
            Some((m, f)) => (json!(m.to_ids(g)), json!(f.normalized_at(0).to_ids(g))),
            None => (Value::Null, Value::Null),
        };
        Ok(Report::ok(json!({
            "real_rank": cert.rank,
            "member": member,
            "witness": witness,
            "obstruction": cert.obstruction.map(|e| json!(e.to_ids(g))),
        })))
    } else {
        let (r, obstruction) = rank_with_obstruction(g, d, budget)?;
        Ok(Report::ok(json!({ "rank": r, "obstruction": obstruction.map(|e| json!(e.to_ids(g))) })))
    }
}

pub fn equivalent(g: &RealGraph, from: &Divisor, to: &Divisor) -> Report {
    let witness = linearly_equivalent(g, from, to);
    if let Some(f) = &witness {
        debug_assert_eq!(&(from + &laplacian(g, f)), to);
    }
    Report::ok(json!({
        "equivalent": witness.is_some(),
        "witness": witness.map(|f| json!(f.to_ids(g))),
    }))
}

pub fn parity(g: &RealGraph, d: &Divisor) -> CliResult<Report> {
    Ok(Report::ok(parity_json(&parity_signature(g, d)?)))
}

pub fn reduce(g: &RealGraph, d: &Divisor) -> CliResult<Report> {
    let (reduced, f) = totally_real_reduction(g, d)?;
    Ok(Report::ok(json!({ "reduced": reduced.to_ids(g), "witness": f.to_ids(g) })))
}

pub fn g12(g: &RealGraph, budget: &Budget) -> CliResult<Report> {
    let (d, r) = find_real_g12(g, budget)?;
    Ok(Report::ok(json!({ "divisor": d.to_ids(g), "rank": r })))
}

pub fn gen_example1(g: i64, s: i64, a: u8) -> CliResult<Value> {
    Ok(graph_json(&example1(g, s, a)?))
}

/// The doubled-copy graph on `base`, or on the cycle of length `cycle` when no base is given.
pub fn gen_example2(base: Option<RealGraph>, cycle: usize, attach: Option<&str>) -> CliResult<Value> {
    let base = match base {
        Some(b) => b,
        None => cycle_graph(cycle)?,
    };
    let attach = match attach {
        Some(id) => base.vertex_index(id).ok_or_else(|| CliError::Usage(format!("no vertex `{id}` in the base")))?,
        None => 0,
    };
    Ok(graph_json(&example2(&base, attach)?.0))
}

pub fn gen_random(
    seed: u64,
    max_vertices: usize,
    max_edges: usize,
    profile: GraphProfile,
    max_denominator: Option<i64>,
) -> CliResult<Value> {
    if max_vertices == 0 {
        return Err(CliError::Usage("--max-vertices must be at least 1".into()));
    }
    Ok(match max_denominator {
        Some(q) if q < 1 => return Err(CliError::Usage("--max-denominator must be at least 1".into())),
        Some(q) => metric_graph_json(&random_metric_graph(seed, max_vertices, max_edges, profile, q)),
        None => graph_json(&random_real_graph(seed, max_vertices, max_edges, profile)),
    })
}

pub fn subdivide_graph(g: &RealGraph, parts: usize, split: bool) -> CliResult<Value> {
    if split {
        return Ok(graph_json(&edge_split(g)));
    }
    if parts == 0 {
        return Err(CliError::Usage("--parts must be at least 1".into()));
    }
    Ok(graph_json(&subdivide(g, parts)?))
}

pub fn graph_json(g: &RealGraph) -> Value {
    serde_json::from_str(&g.to_json()).expect("graphs serialize")
}

pub fn metric_graph_json(gamma: &QMetricGraph) -> Value {
    serde_json::from_str(&gamma.to_json()).expect("metric graphs serialize")
}

pub fn parse_metric_divisor(gamma: &QMetricGraph, text: &str) -> CliResult<QDivisor> {
    Ok(QDivisor::from_json(gamma, text)?)
}

pub fn metric_info(gamma: &QMetricGraph) -> Report {
    let report = metric_invariants(gamma);
    let mut json = invariant_json(gamma.graph(), &report);
    json["m_graph"] = json!(is_m_metric_graph(gamma));
    json["strong_m_graph"] = json!(is_strong_m_metric_graph(gamma));
    Report { json, violated: !report.bounds_hold() }
}

pub fn metric_rank(gamma: &QMetricGraph, d: &QDivisor, real: bool, refine: i64, budget: &Budget) -> CliResult<Report> {
    Ok(Report::ok(if real {
        json!({ "real_rank": metric_real_rank_refined(gamma, d, refine, budget)? })
    } else {
        json!({ "rank": metric_rank_refined(gamma, d, refine, budget)? })
    }))
}

pub fn metric_equivalent_report(
    gamma: &QMetricGraph,
    from: &QDivisor,
    to: &QDivisor,
    budget: &Budget,
) -> CliResult<Report> {
    let witness = metric_equivalent(gamma, from, to, budget)?;
    Ok(Report::ok(json!({
        "equivalent": witness.is_some(),
        "witness": witness.map(|f| f.to_json_value(gamma)),
    })))
}

pub fn metric_parity(gamma: &QMetricGraph, d: &QDivisor) -> CliResult<Report> {
    Ok(Report::ok(parity_json(&metric_parity_signature(gamma, d)?)))
}

pub fn metric_reduce(gamma: &QMetricGraph, d: &QDivisor, budget: &Budget) -> CliResult<Report> {
    let (reduced, f) = metric_totally_real_reduction(gamma, d, budget)?;
    Ok(Report::ok(json!({ "reduced": reduced.to_json_value(gamma), "witness": f.to_json_value(gamma) })))
}

pub fn metric_g12(gamma: &QMetricGraph, budget: &Budget) -> CliResult<Report> {
    let (d, r) = metric_find_real_g12(gamma, budget)?;
    Ok(Report::ok(json!({ "divisor": d.to_json_value(gamma), "rank": r })))
}

pub struct FuzzRequest {
    pub seed: u64,
    pub trials: u64,
    pub limits: Limits,
    pub properties: Vec<Property>,
    pub jobs: usize,
}

pub fn fuzz(request: FuzzRequest, budget: Budget) -> CliResult<Report> {
    let config = FuzzConfig {
        seed: request.seed,
        trials: request.trials,
        limits: request.limits,
        properties: request.properties,
        jobs: request.jobs,
        budget,
    };
    let summary = run_fuzz(&config)?;
    let mut json = summary.to_json_value();
    json["seed"] = json!(config.seed);
    json["trials"] = json!(config.trials);
    Ok(Report { json, violated: summary.failed() > 0 })
}
