//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use realchip::builders::{cycle_graph, example1, example2, random_real_graph, subdivide, GraphProfile};
use realchip::divisor::{laplacian, linearly_equivalent};
use realchip::properties::{flatten_chains, parse_property_list, run_fuzz, FuzzConfig, FuzzSummary, Limits};
use realchip::real::{
    find_real_g12, for_each_real_effective, is_m_graph, is_real_potential, is_strong_m_graph, is_totally_real,
    real_rank, totally_real_reduction,
};
use realchip::{invariants, Budget, Divisor, RealGraph};
use realchip_oracles as oracle;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);
type Invocation = (String, Option<i32>, Vec<u8>);

fn within(started: Instant, limit: Duration, detail: String) -> Verdict {
    let elapsed = started.elapsed();
    if elapsed > limit {
        Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail}; {elapsed:.1?}"))
    }
}

fn admissible(g: i64, s: i64, a: u8) -> bool {
    (g + 1 - s) % 2 == 0 && (0..=g + 1).contains(&s) && (a == 0 || s < g) && (a == 1 || s >= 1)
}

fn invariant_bounds() -> Verdict {
    let started = Instant::now();
    let mut checked = 0;
    for seed in 0..1000u64 {
        let profile = GraphProfile::ALL[seed as usize % GraphProfile::ALL.len()];
        let g = random_real_graph(seed, 10, 16, profile);
        if g.n_vertices() > 10 || g.n_edges() > 16 {
            return Err(format!("seed {seed}: generator exceeded the bounds"));
        }
        let report = invariants(&g);
        if !report.bounds_hold() || !admissible(report.genus, report.s, report.a) {
            return Err(format!("seed {seed}: {:?}", report.bound_violations()));
        }
        if report.a != oracle::a_invariant_by_walks(&g) {
            return Err(format!("seed {seed}: a disagrees with walk search"));
        }
        checked += 1;
    }
    within(started, Duration::from_secs(10), format!("{checked} graphs, 0 violations"))
}

fn example1_sweep() -> Verdict {
    let started = Instant::now();
    let mut built = 0;
    for g in 0..=10 {
        for s in 0..=g + 2 {
            for a in 0..=1u8 {
                match (admissible(g, s, a), example1(g, s, a)) {
                    (true, Ok(graph)) => {
                        let got = invariants(&graph).triple();
                        if got != (g, s, a) {
                            return Err(format!("requested {:?}, got {got:?}", (g, s, a)));
                        }
                        built += 1;
                    }
                    (true, Err(e)) => return Err(format!("{:?} rejected: {e}", (g, s, a))),
                    (false, Ok(_)) => return Err(format!("{:?} accepted though inadmissible", (g, s, a))),
                    (false, Err(_)) => {}
                }
            }
        }
    }
    within(started, Duration::from_secs(5), format!("{built} admissible triples realized exactly"))
}

fn example2_certificate() -> Verdict {
    let started = Instant::now();
    let budget = Budget::default();
    for (name, n) in [("C3", 3), ("doubled edge", 2), ("C4", 4)] {
        let base = cycle_graph(n).map_err(|e| e.to_string())?;
        let (g, d) = example2(&base, 0).map_err(|e| e.to_string())?;
        let r = realchip::divisor::rank(&g, &d, &budget).map_err(|e| e.to_string())?;
        let rr = real_rank(&g, &d, &budget).map_err(|e| e.to_string())?;
        let (r_oracle, rr_oracle) = (oracle::rank_brute(&g, &d), oracle::real_rank_by_scan(&g, &d));
        if (r, rr, r_oracle, rr_oracle) != (0, 1, 0, 1) {
            return Err(format!("{name}: rank {r} (oracle {r_oracle}), real rank {rr} (oracle {rr_oracle})"));
        }
    }
    within(started, Duration::from_secs(30), "rank 0 and real rank 1 on all three bases".into())
}

fn oracle_equivalence() -> Verdict {
    let started = Instant::now();
    let graphs = oracle::connected_multigraphs(5, 7);
    let mut divisors_checked = 0u64;
    let mut pairs_checked = 0u64;
    for g in &graphs {
        let n = g.n_vertices();
        let lattice = oracle::LatticeOracle::new(g);
        let base = realchip::Reducer::new(g, 0);
        let mut classes: std::collections::BTreeMap<Divisor, Divisor> = Default::default();
        for d in oracle::bounded_divisors(n, 2) {
            let reduced = base.reduce(&d).0.divisor;
            let representative = classes.entry(reduced).or_insert_with(|| d.clone()).clone();
            let ours = linearly_equivalent(g, &representative, &d);
            if ours.is_none() || !lattice.equivalent(&representative, &d) {
                return Err(format!("{}: {:?} vs {:?}", g.to_json(), representative.as_slice(), d.as_slice()));
            }
            let f = ours.expect("checked above");
            if &representative + &laplacian(g, &f) != d {
                return Err(format!("{}: bad witness for {:?}", g.to_json(), d.as_slice()));
            }
            divisors_checked += 1;
        }
        let reps: Vec<&Divisor> = classes.values().collect();
        for (i, a) in reps.iter().enumerate() {
            for b in &reps[i + 1..] {
                if linearly_equivalent(g, a, b).is_some() || lattice.equivalent(a, b) {
                    return Err(format!("{}: {:?} vs {:?}", g.to_json(), a.as_slice(), b.as_slice()));
                }
                pairs_checked += 1;
            }
        }
    }
    within(
        started,
        Duration::from_secs(300),
        format!("{} multigraphs, {divisors_checked} divisors, {pairs_checked} class pairs", graphs.len()),
    )
}

fn fuzz(properties: &str, trials: u64, seed: u64) -> Result<FuzzSummary, String> {
    let config = FuzzConfig {
        seed,
        trials,
        limits: Limits::default(),
        properties: parse_property_list(properties)?,
        jobs: 0,
        budget: Budget::default(),
    };
    run_fuzz(&config).map_err(|e| e.to_string())
}

/// Run seeded trials until every listed property has `wanted` trials that
/// met their preconditions, doubling the trial count as needed.
fn fuzz_verdict(properties: &str, wanted: u64, seed: u64, limit: Duration) -> Verdict {
    let started = Instant::now();
    let mut trials = wanted;
    let summary = loop {
        let summary = fuzz(properties, trials, seed)?;
        if summary.counterexample.is_some() || summary.tallies.values().all(|t| t.passed >= wanted) {
            break summary;
        }
        if trials >= 64 * wanted {
            return Err(format!("fewer than {wanted} qualifying trials among {trials}"));
        }
        trials *= 2;
    };
    if let Some(cex) = &summary.counterexample {
        return Err(cex.to_json_value().to_string());
    }
    let detail: Vec<String> =
        summary.tallies.iter().map(|(p, t)| format!("{p} {} passed, {} skipped", t.passed, t.skipped)).collect();
    within(started, limit, detail.join(", "))
}

fn totally_real_and_pencils() -> Verdict {
    let started = Instant::now();
    let budget = Budget::default();
    let (mut graphs, mut divisors, mut pencils) = (0, 0u64, 0);
    let mut seed = 0u64;
    while graphs < 300 {
        if seed > 100_000 {
            return Err(format!("only {graphs} M-graphs of genus ≤ 6 found"));
        }
        let profile = if seed.is_multiple_of(3) { GraphProfile::StrongMGraph } else { GraphProfile::MGraph };
        let g = random_real_graph(seed, 10, 12, profile);
        seed += 1;
        if !is_m_graph(&g) || g.genus() > 6 {
            continue;
        }
        graphs += 1;
        for degree in 0..=4 {
            let mut failure = None;
            for_each_real_effective(&g, degree, &budget, |d| {
                divisors += 1;
                failure = check_reduction(&g, d).err();
                failure.is_none()
            })
            .map_err(|e| e.to_string())?;
            if let Some(reason) = failure {
                return Err(format!("seed {}: {reason}", seed - 1));
            }
        }
        if is_strong_m_graph(&g) {
            let (d, r) = find_real_g12(&g, &budget).map_err(|e| format!("seed {}: {e}", seed - 1))?;
            let checked = oracle::rank_brute(&g, &d);
            if r < 1 || checked != r || d.degree() != 2 || !oracle::is_real_divisor(&g, &d) {
                return Err(format!("seed {}: pencil {:?} rank {r}, oracle {checked}", seed - 1, d.as_slice()));
            }
            pencils += 1;
        }
    }
    within(
        started,
        Duration::from_secs(300),
        format!(
            "{graphs} M-graphs, {divisors} real effective divisors reduced, {pencils} strong M-graphs with a pencil"
        ),
    )
}

fn check_reduction(g: &RealGraph, d: &Divisor) -> Result<(), String> {
    let (out, f) = totally_real_reduction(g, d).map_err(|e| e.to_string())?;
    let ok = is_totally_real(g, &out)
        && out.is_effective()
        && d + &laplacian(g, &f) == out
        && is_real_potential(g, &f)
        && oracle::lattice_equivalent(g, d, &out);
    if ok {
        Ok(())
    } else {
        Err(format!("{:?} reduced to {:?}", d.as_slice(), out.as_slice()))
    }
}

fn subdivision() -> Verdict {
    let started = Instant::now();
    let (mut graphs, mut composed) = (0, 0);
    for seed in 0..200u64 {
        let profile = GraphProfile::ALL[seed as usize % GraphProfile::ALL.len()];
        let g = random_real_graph(seed ^ 0x5eed, 10, 16, profile);
        let before = invariants(&g).triple();
        for d in 2..=4 {
            let after = invariants(&subdivide(&g, d).map_err(|e| e.to_string())?).triple();
            if after != before {
                return Err(format!("seed {seed}, d={d}: {before:?} became {after:?}"));
            }
        }
        if (0..g.n_edges()).all(|e| !g.is_loop(e)) {
            let twice = subdivide(&subdivide(&g, 2).map_err(|e| e.to_string())?, 3).map_err(|e| e.to_string())?;
            let direct = subdivide(&g, 6).map_err(|e| e.to_string())?;
            if flatten_chains(&twice, 3) != direct.to_raw() {
                return Err(format!("seed {seed}: subdividing by 2 then 3 differs from 6"));
            }
            composed += 1;
        }
        graphs += 1;
    }
    within(started, Duration::from_secs(60), format!("{graphs} graphs, {composed} loop-free compositions"))
}

struct Run {
    code: Option<i32>,
    stdout: Vec<u8>,
}

fn realchip(args: &[&str], stdin: &[u8]) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_realchip"))
        .args(args)
        .env_remove("REALCHIP_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().expect("piped").write_all(stdin).expect("stdin accepts input");
    let out = child.wait_with_output().expect("binary exits");
    Run { code: out.status.code(), stdout: out.stdout }
}

fn fixture(name: &str) -> String {
    format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Every command of the CLI on fixed inputs, as (command line, exit code, stdout).
fn cli_matrix() -> Result<Vec<Invocation>, String> {
    let mut rows = Vec::new();
    let mut record = |args: &[&str], stdin: &[u8]| -> Run {
        let run = realchip(args, stdin);
        rows.push((args.join(" "), run.code, run.stdout.clone()));
        run
    };
    let json = |run: &Run| -> serde_json::Value { serde_json::from_slice(&run.stdout).unwrap_or_default() };

    let ex1 = record(&["gen", "example1", "--g", "4", "--s", "3", "--a", "0"], b"");
    let info = record(&["info"], &ex1.stdout);
    let report = json(&info);
    if (report["genus"].as_i64(), report["s"].as_i64(), report["a"].as_i64()) != (Some(4), Some(3), Some(0))
        || report["bounds"] != "pass"
        || info.code != Some(0)
    {
        return Err(format!("example1 (4,3,0) info: {report}"));
    }
    let empty = record(&["info", &fixture("empty_real_locus.json")], b"");
    let report = json(&empty);
    if report["a"] != 1 || report["s"] != 0 || report["genus"].as_i64().is_none_or(|g| g % 2 == 0) {
        return Err(format!("empty real locus info: {report}"));
    }
    for cycle in ["2", "3", "4"] {
        let ex2 = record(&["gen", "example2", "--cycle", cycle], b"");
        let plain = json(&record(&["rank", "--divisor", r#"{"v": 1}"#], &ex2.stdout));
        let real = json(&record(&["rank", "--divisor", r#"{"v": 1}"#, "--real"], &ex2.stdout));
        if plain["rank"] != 0 || real["real_rank"] != 1 {
            return Err(format!("example2 on cycle {cycle}: {plain} {real}"));
        }
        record(&["parity", "--divisor", r#"{"v": 1}"#], &ex2.stdout);
    }
    let m = record(&["gen", "example1", "--g", "3", "--s", "4", "--a", "0"], b"");
    record(&["reduce", "--divisor", r#"{"v1": 1, "v2": 1}"#], &m.stdout);
    record(&["g12"], &m.stdout);
    record(&["equivalent", "--from", r#"{"v1": 2}"#, "--to", r#"{"v2": 2}"#], &m.stdout);
    record(&["subdivide", "--parts", "3"], &m.stdout);
    for seed in ["1", "2", "3"] {
        let random = record(&["gen", "random", "--seed", seed, "--profile", "strong-m-graph"], b"");
        record(&["info"], &random.stdout);
        record(&["g12"], &random.stdout);
        record(&["subdivide", "--split"], &random.stdout);
        let metric = record(
            &["gen", "random", "--seed", seed, "--max-vertices", "4", "--max-edges", "5", "--max-denominator", "4"],
            b"",
        );
        record(&["metric", "info"], &metric.stdout);
        record(&["metric", "g12"], &metric.stdout);
    }
    let circle = br#"{"vertices":["v"],"edges":[{"id":"l","ends":["v","v"],"length":"3/2"}]}"#;
    record(&["metric", "rank", "--divisor", r#"[[["vertex","v"],1]]"#], circle);
    record(&["metric", "rank", "--divisor", r#"[[["edge","l","3/4"],2]]"#, "--real", "--refine", "2"], circle);
    record(
        &["metric", "equivalent", "--from", r#"[[["vertex","v"],2]]"#, "--to", r#"[[["edge","l","3/4"],2]]"#],
        circle,
    );
    record(&["metric", "parity", "--divisor", r#"[[["vertex","v"],3]]"#], circle);
    record(&["metric", "reduce", "--divisor", r#"[[["vertex","v"],2]]"#], circle);
    record(&["gen", "example1", "--g", "2", "--s", "5", "--a", "0"], b"");
    record(&["rank", "--divisor", "{"], &ex1.stdout);
    record(&["no-such-command"], b"");
    let serial = record(&["fuzz", "--seed", "11", "--trials", "40", "--jobs", "1"], b"");
    let parallel = record(&["fuzz", "--seed", "11", "--trials", "40", "--jobs", "4"], b"");
    if serial.stdout != parallel.stdout {
        return Err("fuzz output depends on the number of jobs".into());
    }
    let full = record(&["fuzz", "--trials", "1000", "--properties", "all"], b"");
    if full.code != Some(0) {
        return Err(format!("fuzz --trials 1000 exited with {:?}", full.code));
    }
    let codes: Vec<Option<i32>> = rows.iter().map(|r| r.1).collect();
    if codes.iter().any(|c| !matches!(c, Some(0..=3))) {
        return Err(format!("unexpected exit codes {codes:?}"));
    }
    Ok(rows)
}

fn determinism() -> Verdict {
    let started = Instant::now();
    let first = cli_matrix()?;
    let second = cli_matrix()?;
    if first.len() != second.len() {
        return Err("matrix length differs between runs".into());
    }
    for (a, b) in first.iter().zip(&second) {
        if a != b {
            return Err(format!("`realchip {}` differs between runs", a.0));
        }
    }
    let failures = first.iter().filter(|r| r.1 != Some(0)).count();
    within(
        started,
        Duration::from_secs(300),
        format!("{} invocations byte-identical, {failures} with expected nonzero exit", first.len()),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("bounds on (g, s, a) over 1000 random graphs", invariant_bounds),
        ("explicit family for every admissible triple, g ≤ 10", example1_sweep),
        ("rank 0 and real rank 1 for the doubled-copy construction", example2_certificate),
        ("linear equivalence against the integer lattice", oracle_equivalence),
        ("parity signatures", || fuzz_verdict("parity-invariance,canonical-parity", 1000, 5, Duration::from_secs(300))),
        ("real witnesses", || fuzz_verdict("witness-reality", 1000, 6, Duration::from_secs(300))),
        ("real rank bound and symmetrization", || {
            fuzz_verdict("real-rank-bound,symmetrize", 300, 7, Duration::from_secs(300))
        }),
        ("totally real reduction and real pencils", totally_real_and_pencils),
        ("subdivision", subdivision),
        ("metric refinement stability", || {
            fuzz_verdict("metric-refinement,metric-invariant-bounds", 100, 10, Duration::from_secs(300))
        }),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
