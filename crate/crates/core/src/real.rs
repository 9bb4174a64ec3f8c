//! Divisors under the real structure: conjugation, real rank, parity
//! signatures on the real locus, M-graphs and their totally real reductions.

use crate::divisor::{laplacian, linearly_equivalent, rank, Divisor, PotentialFunction, Reducer, BASE_VERTEX};
use crate::enumerate::{count_effective, Budget};
use crate::error::{Error, Result};
use crate::graph::{invariants, real_locus_components, RealGraph};

/// `D̄(v) = D(v̄)`.
pub fn conjugate(g: &RealGraph, d: &Divisor) -> Divisor {
    Divisor::from_vec((0..g.n_vertices()).map(|v| d[g.conj_vertex(v)]).collect())
}

/// `f̄(v) = f(v̄)`.
pub fn conjugate_potential(g: &RealGraph, f: &PotentialFunction) -> PotentialFunction {
    PotentialFunction::from_vec((0..g.n_vertices()).map(|v| f[g.conj_vertex(v)]).collect())
}

pub fn is_real(g: &RealGraph, d: &Divisor) -> bool {
    (0..g.n_vertices()).all(|v| d[v] == d[g.conj_vertex(v)])
}

pub fn is_real_potential(g: &RealGraph, f: &PotentialFunction) -> bool {
    (0..g.n_vertices()).all(|v| f[v] == f[g.conj_vertex(v)])
}

/// Real and supported on real vertices.
pub fn is_totally_real(g: &RealGraph, d: &Divisor) -> bool {
    is_real(g, d) && d.support().into_iter().all(|v| g.is_real_vertex(v))
}

/// Orbits of the vertex involution: `(v, v)` for real vertices and `(v, v̄)`
/// with `v < v̄` for conjugate pairs.
pub fn vertex_orbits(g: &RealGraph) -> Vec<(usize, usize)> {
    (0..g.n_vertices()).filter(|&v| v <= g.conj_vertex(v)).map(|v| (v, g.conj_vertex(v))).collect()
}

/// Visit every real effective divisor of the given degree. The callback
/// returns `false` to stop early; the return value reports whether the sweep
/// ran to completion.
pub fn for_each_real_effective(
    g: &RealGraph,
    degree: i64,
    budget: &Budget,
    mut visit: impl FnMut(&Divisor) -> bool,
) -> Result<bool> {
    if degree < 0 {
        return Ok(true);
    }
    let orbits = vertex_orbits(g);
    budget.check(count_effective(orbits.len(), degree))?;
    let mut d = Divisor::zero(g.n_vertices());
    fn rec(
        orbits: &[(usize, usize)],
        i: usize,
        left: i64,
        d: &mut Divisor,
        visit: &mut dyn FnMut(&Divisor) -> bool,
    ) -> bool {
        if left == 0 {
            return visit(d);
        }
        if i == orbits.len() {
            return true;
        }
        let (v, w) = orbits[i];
        let weight = if v == w { 1 } else { 2 };
        let mut k = left / weight;
        // larger multiplicities first, so enumeration starts at `degree · first orbit`
        loop {
            d.set(v, k);
            d.set(w, k);
            if !rec(orbits, i + 1, left - k * weight, d, visit) {
                d.set(v, 0);
                d.set(w, 0);
                return false;
            }
            if k == 0 {
                break;
            }
            k -= 1;
        }
        true
    }
    Ok(rec(&orbits, 0, degree, &mut d, &mut visit))
}

/// `g = max(f, f̄)` and `D' = D + Δ(g)`: the real member of `|D|` dominating `E`
/// built from a (possibly non-real) member `D + Δ(f) ≥ E`.
pub fn symmetrize(
    g: &RealGraph,
    d: &Divisor,
    f: &PotentialFunction,
    e: &Divisor,
) -> Result<(PotentialFunction, Divisor)> {
    d.check_graph(g)?;
    e.check_graph(g)?;
    f.check_graph(g)?;
    if !is_real(g, d) {
        return Err(Error::PreconditionViolated("D is not real".into()));
    }
    if !is_real(g, e) || !e.is_effective() {
        return Err(Error::PreconditionViolated("E is not real and effective".into()));
    }
    let moved = d + &laplacian(g, f);
    if !moved.is_effective() || !moved.dominates(e) {
        return Err(Error::PreconditionViolated("D + Δ(f) is not effective and ≥ E".into()));
    }
    let fbar = conjugate_potential(g, f);
    let sym = PotentialFunction::from_vec(f.iter().zip(fbar.iter()).map(|(a, b)| *a.max(b)).collect());
    let out = d + &laplacian(g, &sym);
    if !(is_real(g, &out) && out.is_effective() && out.dominates(e)) {
        return Err(Error::Counterexample(format!(
            "symmetrization of f={:?} on D={:?}, E={:?} gave {:?}",
            f.as_slice(),
            d.as_slice(),
            e.as_slice(),
            out.as_slice()
        )));
    }
    Ok((sym, out))
}

/// A real `D' ∈ |D|` with `D' ≥ E`, with potential, when one exists.
pub fn real_member_above(
    g: &RealGraph,
    reducer: &Reducer,
    d: &Divisor,
    e: &Divisor,
) -> Result<Option<(Divisor, PotentialFunction)>> {
    let (reduced, f) = reducer.reduce(&(d - e));
    if reduced.divisor[reducer.base()] < 0 {
        return Ok(None);
    }
    let (sym, out) = symmetrize(g, d, &f, e)?;
    Ok(Some((out, sym)))
}

/// Real rank with certificates: a real member of `|D|` (when `rank ≥ 0`)
/// and a real effective `E` of degree `rank + 1` that no real member of
/// `|D|` dominates (absent when `rank = deg D`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealRank {
    pub rank: i64,
    pub member: Option<(Divisor, PotentialFunction)>,
    pub obstruction: Option<Divisor>,
}

pub fn real_rank_certificate(g: &RealGraph, d: &Divisor, budget: &Budget) -> Result<RealRank> {
    d.check_graph(g)?;
    if !is_real(g, d) {
        return Err(Error::NotReal);
    }
    let n = g.n_vertices();
    let zero = Divisor::zero(n);
    let reducer = Reducer::new(g, BASE_VERTEX);
    let member = if d.degree() < 0 { None } else { real_member_above(g, &reducer, d, &zero)? };
    let Some(member) = member else {
        return Ok(RealRank { rank: -1, member: None, obstruction: Some(zero) });
    };
    for r in 1..=d.degree() {
        let mut obstruction = None;
        let mut failure = None;
        for_each_real_effective(g, r, budget, |e| match real_member_above(g, &reducer, d, e) {
            Ok(Some(_)) => true,
            Ok(None) => {
                obstruction = Some(e.clone());
                false
            }
            Err(err) => {
                failure = Some(err);
                false
            }
        })?;
        if let Some(err) = failure {
            return Err(err);
        }
        if obstruction.is_some() {
            return Ok(RealRank { rank: r - 1, member: Some(member), obstruction });
        }
    }
    Ok(RealRank { rank: d.degree(), member: Some(member), obstruction: None })
}

/// Maximal `r` such that every real effective `E` of degree `r` lies under
/// some real member of `|D|`; −1 when `|D|` has no real member.
pub fn real_rank(g: &RealGraph, d: &Divisor, budget: &Budget) -> Result<i64> {
    real_rank_certificate(g, d, budget).map(|c| c.rank)
}

/// The potential relating two equivalent real divisors; it is always real.
pub fn real_witness(g: &RealGraph, d1: &Divisor, d2: &Divisor) -> Result<PotentialFunction> {
    d1.check_graph(g)?;
    d2.check_graph(g)?;
    if !is_real(g, d1) || !is_real(g, d2) {
        return Err(Error::NotReal);
    }
    let f = linearly_equivalent(g, d1, d2).ok_or(Error::NotEquivalent)?;
    if !is_real_potential(g, &f) {
        return Err(Error::Counterexample(format!(
            "witness {:?} between real divisors {:?} and {:?} is not real",
            f.as_slice(),
            d1.as_slice(),
            d2.as_slice()
        )));
    }
    Ok(f)
}

/// Degree parity of a real divisor on each component of the real locus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParitySignature(pub Vec<u8>);

impl ParitySignature {
    pub fn is_all_even(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }
}

pub fn parity_signature(g: &RealGraph, d: &Divisor) -> Result<ParitySignature> {
    d.check_graph(g)?;
    if !is_real(g, d) {
        return Err(Error::NotReal);
    }
    Ok(ParitySignature(
        real_locus_components(g)
            .iter()
            .map(|c| c.vertices.iter().map(|&v| d[v]).sum::<i64>().rem_euclid(2) as u8)
            .collect(),
    ))
}

/// No isolated real edge and `s(G) = g(G) + 1`.
pub fn is_m_graph(g: &RealGraph) -> bool {
    let inv = invariants(g);
    inv.isolated_real_edge_count == 0 && inv.s == inv.genus + 1
}

/// An M-graph whose real locus has `g(G) + 1` components.
pub fn is_strong_m_graph(g: &RealGraph) -> bool {
    let inv = invariants(g);
    inv.isolated_real_edge_count == 0 && inv.s == inv.genus + 1 && inv.s_prime == inv.genus + 1
}

fn pair_reduce_unchecked(g: &RealGraph, reducer: &Reducer, v: usize) -> Result<(usize, PotentialFunction)> {
    let n = g.n_vertices();
    let vbar = g.conj_vertex(v);
    let mut pair = Divisor::zero(n);
    pair.add_at(v, 1);
    pair.add_at(vbar, 1);
    let (pair_form, pair_f) = reducer.reduce(&pair);
    for w in g.real_vertices() {
        let mut double = Divisor::zero(n);
        double.add_at(w, 2);
        let (form, f) = reducer.reduce(&double);
        if form == pair_form {
            let witness = &pair_f - &f;
            if !is_real_potential(g, &witness) {
                return Err(Error::Counterexample(format!(
                    "non-real witness for {} + {} ~ 2 {}",
                    g.vertex_id(v),
                    g.vertex_id(vbar),
                    g.vertex_id(w)
                )));
            }
            return Ok((w, witness));
        }
    }
    Err(Error::Counterexample(format!(
        "M-graph vertex pair {} + {} is not equivalent to any 2w with w real",
        g.vertex_id(v),
        g.vertex_id(vbar)
    )))
}

/// For a non-real vertex `v` of an M-graph: the least real `w` with
/// `v + v̄ ~ 2w`, and a real `f` with `v + v̄ + Δ(f) = 2w`.
pub fn vertex_pair_reduce(g: &RealGraph, v: usize) -> Result<(usize, PotentialFunction)> {
    if !is_m_graph(g) {
        return Err(Error::NotMGraph);
    }
    if v >= g.n_vertices() || g.is_real_vertex(v) {
        return Err(Error::PreconditionViolated("vertex must be non-real".into()));
    }
    pair_reduce_unchecked(g, &Reducer::new(g, BASE_VERTEX), v)
}

/// A totally real effective divisor equivalent to the real effective `d`,
/// with a real `f` such that `d + Δ(f)` equals it. Non-real vertex pairs in
/// the support are traded for `2w` one at a time.
pub fn totally_real_reduction(g: &RealGraph, d: &Divisor) -> Result<(Divisor, PotentialFunction)> {
    d.check_graph(g)?;
    if !is_m_graph(g) {
        return Err(Error::NotMGraph);
    }
    if !is_real(g, d) || !d.is_effective() {
        return Err(Error::NotRealEffective);
    }
    let reducer = Reducer::new(g, BASE_VERTEX);
    let mut current = d.clone();
    let mut total = PotentialFunction::zero(g.n_vertices());
    while let Some(v) = (0..g.n_vertices()).find(|&v| current[v] > 0 && !g.is_real_vertex(v)) {
        let (w, f) = pair_reduce_unchecked(g, &reducer, v)?;
        current.add_at(v, -1);
        current.add_at(g.conj_vertex(v), -1);
        current.add_at(w, 2);
        total = &total + &f;
    }
    debug_assert_eq!(&(d + &laplacian(g, &total)), &current);
    Ok((current, total))
}

/// Real effective degree-2 divisors in sweep order: `2w`, then `w' + w''`,
/// then `v + v̄`.
pub fn real_degree_two_candidates(g: &RealGraph) -> Vec<Divisor> {
    let n = g.n_vertices();
    let real: Vec<usize> = g.real_vertices().collect();
    let mut out = Vec::new();
    for &w in &real {
        let mut d = Divisor::zero(n);
        d.set(w, 2);
        out.push(d);
    }
    for (i, &a) in real.iter().enumerate() {
        for &b in &real[i + 1..] {
            let mut d = Divisor::zero(n);
            d.set(a, 1);
            d.set(b, 1);
            out.push(d);
        }
    }
    for v in 0..n {
        let vbar = g.conj_vertex(v);
        if v < vbar {
            let mut d = Divisor::zero(n);
            d.set(v, 1);
            d.set(vbar, 1);
            out.push(d);
        }
    }
    out
}

/// First real effective degree-2 divisor of rank ≥ 1 on a strong M-graph,
/// with its exact rank.
pub fn find_real_g12(g: &RealGraph, budget: &Budget) -> Result<(Divisor, i64)> {
    if !is_strong_m_graph(g) {
        return Err(Error::NotStrongMGraph);
    }
    let reducer = Reducer::new(g, BASE_VERTEX);
    let n = g.n_vertices();
    for d in real_degree_two_candidates(g) {
        let reduced = reducer.reduce(&d).0.divisor;
        let moves_everywhere = (0..n).all(|u| {
            let mut e = reduced.clone();
            e.add_at(u, -1);
            reducer.has_effective_representative(e.as_slice())
        });
        if !moves_everywhere {
            continue;
        }
        let r = rank(g, &d, budget)?;
        if g.genus() >= 1 && r != 1 {
            return Err(Error::Counterexample(format!(
                "degree-2 divisor {:?} has rank {r} on a graph of genus {}",
                d.as_slice(),
                g.genus()
            )));
        }
        return Ok((d, r));
    }
    Err(Error::SearchExhausted("no real degree-2 divisor of rank ≥ 1 on a strong M-graph".into()))
}
