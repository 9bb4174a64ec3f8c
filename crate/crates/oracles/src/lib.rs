//! Slow, definition-level references for the realchip test suites.
//!
//! Nothing here uses reduced divisors: equivalence is decided by exact
//! rational linear algebra on the Laplacian, and ranks and linear systems
//! by exhaustive enumeration on top of that.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use realchip::divisor::Divisor;
use realchip::enumerate::Compositions;
use realchip::graph::{RawGraph, RealGraph};

/// Matrix of `f ↦ Δ(f)` with `Δ(f)(v) = Σ (f(w) − f(v))`.
pub fn laplacian_matrix(g: &RealGraph) -> Vec<Vec<i64>> {
    let n = g.n_vertices();
    let mut m = vec![vec![0; n]; n];
    for e in 0..g.n_edges() {
        let (a, b) = g.ends(e);
        if a != b {
            m[a][b] += 1;
            m[b][a] += 1;
            m[a][a] -= 1;
            m[b][b] -= 1;
        }
    }
    m
}

/// Solve `A x = b` over the rationals; `None` if inconsistent. Free
/// variables are set to zero.
fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..=cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] = &m[i][j] - delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// An integer `f` with `d1 + Δ(f) = d2` pinned to `f(0) = 0`, found by
/// solving the reduced Laplacian system exactly. On a connected graph the
/// reduced system is nonsingular, so `d2 − d1` is principal exactly when
/// the unique rational solution is integral.
pub fn lattice_witness(g: &RealGraph, d1: &Divisor, d2: &Divisor) -> Option<Vec<i64>> {
    let n = g.n_vertices();
    if d1.degree() != d2.degree() {
        return None;
    }
    let full = laplacian_matrix(g);
    let a: Vec<Vec<BigRational>> = (1..n).map(|i| (1..n).map(|j| big(full[i][j])).collect()).collect();
    let b: Vec<BigRational> = (1..n).map(|i| big(d2[i] - d1[i])).collect();
    let x = solve(&a, &b)?;
    if x.iter().any(|v| !v.is_integer()) {
        return None;
    }
    let mut f = vec![0];
    f.extend(x.iter().map(|v| i64::try_from(v.to_integer()).expect("small witness")));
    Some(f)
}

pub fn lattice_equivalent(g: &RealGraph, d1: &Divisor, d2: &Divisor) -> bool {
    lattice_witness(g, d1, d2).is_some()
}

/// Equivalence test for many divisor pairs on one graph. Holds
/// `adj = det · Q⁻¹` for the reduced Laplacian `Q`, so `D₂ − D₁` is
/// principal exactly when `adj · (D₂ − D₁)` vanishes modulo `det`.
#[derive(Debug, Clone)]
pub struct LatticeOracle {
    det: i64,
    adjugate: Vec<Vec<i64>>,
}

impl LatticeOracle {
    pub fn new(g: &RealGraph) -> Self {
        let n = g.n_vertices();
        let full = laplacian_matrix(g);
        let m = n - 1;
        let q: Vec<Vec<BigRational>> = (1..n).map(|i| (1..n).map(|j| big(full[i][j])).collect()).collect();
        let det = determinant(&q);
        let mut adjugate = vec![vec![0; m]; m];
        for col in 0..m {
            let unit: Vec<BigRational> = (0..m).map(|i| big(i64::from(i == col))).collect();
            let x = solve(&q, &unit).expect("connected graphs have a nonsingular reduced Laplacian");
            for row in 0..m {
                let scaled = &x[row] * &det;
                assert!(scaled.is_integer());
                adjugate[row][col] = i64::try_from(scaled.to_integer()).expect("small adjugate");
            }
        }
        let det = i64::try_from(det.to_integer()).expect("small determinant");
        LatticeOracle { det, adjugate }
    }

    /// Number of spanning trees, the order of the Jacobian.
    pub fn tree_count(&self) -> i64 {
        self.det.abs()
    }

    pub fn equivalent(&self, d1: &Divisor, d2: &Divisor) -> bool {
        if d1.degree() != d2.degree() {
            return false;
        }
        let diff: Vec<i64> = (1..d1.len()).map(|i| d2[i] - d1[i]).collect();
        self.adjugate.iter().all(|row| row.iter().zip(&diff).map(|(a, b)| a * b).sum::<i64>() % self.det == 0)
    }
}

fn determinant(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = &det * &m[c][c];
        for i in c + 1..n {
            let factor = &m[i][c] / &m[c][c];
            for j in c..n {
                let delta = &factor * &m[c][j];
                m[i][j] = &m[i][j] - delta;
            }
        }
    }
    det
}

/// Every connected loopless multigraph on `1..=max_vertices` vertices with
/// at most `max_edges` edges, one per isomorphism class, with trivial real
/// structure. Vertices are named `v0, v1, …` and edges `e0, e1, …`.
pub fn connected_multigraphs(max_vertices: usize, max_edges: usize) -> Vec<RealGraph> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let perms = permutations(n);
        let mut seen = std::collections::BTreeSet::new();
        let mut counts = vec![0usize; pairs.len()];
        visit_multisets(&pairs, &mut counts, 0, max_edges, &mut |counts| {
            if !is_connected(n, &pairs, counts) {
                return;
            }
            let canon = perms
                .iter()
                .map(|p| {
                    let mut edges: Vec<(usize, usize)> = pairs
                        .iter()
                        .zip(counts)
                        .flat_map(|(&(a, b), &k)| {
                            let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                            std::iter::repeat_n((x, y), k)
                        })
                        .collect();
                    edges.sort_unstable();
                    edges
                })
                .min()
                .expect("at least the identity");
            if seen.insert(canon.clone()) {
                out.push(build_trivial(n, &canon));
            }
        });
    }
    out
}

fn visit_multisets(
    pairs: &[(usize, usize)],
    counts: &mut Vec<usize>,
    index: usize,
    remaining: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if index == pairs.len() {
        visit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[index] = k;
        visit_multisets(pairs, counts, index + 1, remaining - k, visit);
    }
    counts[index] = 0;
}

fn is_connected(n: usize, pairs: &[(usize, usize)], counts: &[usize]) -> bool {
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for (&(a, b), &k) in pairs.iter().zip(counts) {
            if k > 0 && reached[a] != reached[b] {
                reached[a] = true;
                reached[b] = true;
                changed = true;
            }
        }
    }
    reached.iter().all(|&r| r)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn build_trivial(n: usize, edges: &[(usize, usize)]) -> RealGraph {
    let mut raw = RawGraph::default();
    for v in 0..n {
        raw.add_vertex(format!("v{v}"));
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        raw.add_edge(format!("e{i}"), format!("v{a}"), format!("v{b}"));
    }
    RealGraph::from_raw(&raw).expect("enumerated multigraphs are valid")
}

/// Every divisor on `n` vertices with coefficients in `-bound..=bound`.
pub fn bounded_divisors(n: usize, bound: i64) -> Vec<Divisor> {
    let width = (2 * bound + 1) as usize;
    let total = width.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut values = vec![0; n];
            for x in values.iter_mut() {
                *x = (code % width) as i64 - bound;
                code /= width;
            }
            Divisor::from_vec(values)
        })
        .collect()
}

fn effective_of_degree(n: usize, degree: i64) -> impl Iterator<Item = Divisor> {
    Compositions::new(n, degree).map(Divisor::from_vec)
}

/// `|D|` by testing every effective divisor of the same degree.
pub fn linear_system_brute(g: &RealGraph, d: &Divisor) -> Vec<Divisor> {
    if d.degree() < 0 {
        return Vec::new();
    }
    effective_of_degree(g.n_vertices(), d.degree()).filter(|e| lattice_equivalent(g, e, d)).collect()
}

/// Rank straight from the definition, via [`linear_system_brute`].
pub fn rank_brute(g: &RealGraph, d: &Divisor) -> i64 {
    let n = g.n_vertices();
    let system = linear_system_brute(g, d);
    if system.is_empty() {
        return -1;
    }
    for r in 1..=d.degree() {
        let all_covered = effective_of_degree(n, r).all(|e| system.iter().any(|m| m.dominates(&e)));
        if !all_covered {
            return r - 1;
        }
    }
    d.degree()
}

pub fn is_real_divisor(g: &RealGraph, d: &Divisor) -> bool {
    (0..g.n_vertices()).all(|v| d[v] == d[g.conj_vertex(v)])
}

/// Real rank by scanning the real members of `|D|` for every real
/// effective `E`.
pub fn real_rank_by_scan(g: &RealGraph, d: &Divisor) -> i64 {
    let n = g.n_vertices();
    let real_members: Vec<Divisor> = linear_system_brute(g, d).into_iter().filter(|m| is_real_divisor(g, m)).collect();
    if real_members.is_empty() {
        return -1;
    }
    for r in 1..=d.degree() {
        let all_covered = effective_of_degree(n, r)
            .filter(|e| is_real_divisor(g, e))
            .all(|e| real_members.iter().any(|m| m.dominates(&e)));
        if !all_covered {
            return r - 1;
        }
    }
    d.degree()
}

/// Whether some member of `|D|` is supported on real vertices.
pub fn has_totally_real_member(g: &RealGraph, d: &Divisor) -> bool {
    linear_system_brute(g, d).iter().any(|m| m.support().into_iter().all(|v| g.is_real_vertex(v)))
}

/// q-reducedness from the definition: nonnegative off `q`, and every
/// nonempty `S` avoiding `q` has a vertex with fewer chips than edges
/// leaving `S`.
pub fn is_q_reduced_brute(g: &RealGraph, d: &Divisor, q: usize) -> bool {
    let n = g.n_vertices();
    if (0..n).any(|v| v != q && d[v] < 0) {
        return false;
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != q).collect();
    for mask in 1u64..(1 << others.len()) {
        let in_s = |v: usize| others.iter().position(|&o| o == v).is_some_and(|i| mask >> i & 1 == 1);
        let can_fire = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).all(|(_, &v)| {
            let out = g
                .incident_edges(v)
                .iter()
                .filter(|&&e| {
                    let w = g.other_end(e, v);
                    w != v && !in_s(w)
                })
                .count() as i64;
            d[v] >= out
        });
        if can_fire {
            return false;
        }
    }
    true
}

/// a(G) by breadth-first search over walks that avoid real vertices and
/// real edges.
pub fn a_invariant_by_walks(g: &RealGraph) -> u8 {
    for start in (0..g.n_vertices()).filter(|&v| !g.is_real_vertex(v)) {
        let target = g.conj_vertex(start);
        let mut seen = vec![false; g.n_vertices()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            if v == target {
                return 1;
            }
            for &e in g.incident_edges(v) {
                let w = g.other_end(e, v);
                if !g.is_real_edge(e) && !g.is_real_vertex(w) && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> RealGraph {
        let mut raw = RawGraph::default();
        for v in ["a", "b", "c"] {
            raw.add_vertex(v);
        }
        raw.add_edge("x", "a", "b");
        raw.add_edge("y", "b", "c");
        raw.add_edge("z", "c", "a");
        RealGraph::from_raw(&raw).unwrap()
    }

    #[test]
    fn triangle_jacobian_has_order_three() {
        let g = triangle();
        let a = Divisor::from_vec(vec![1, 0, 0]);
        let b = Divisor::from_vec(vec![0, 1, 0]);
        assert!(!lattice_equivalent(&g, &a, &b));
        let three_a = Divisor::from_vec(vec![3, 0, 0]);
        let three_b = Divisor::from_vec(vec![0, 3, 0]);
        let f = lattice_witness(&g, &three_a, &three_b).unwrap();
        let mut moved = three_a.as_slice().to_vec();
        let m = laplacian_matrix(&g);
        for v in 0..3 {
            moved[v] += (0..3).map(|w| m[v][w] * f[w]).sum::<i64>();
        }
        assert_eq!(moved, vec![0, 3, 0]);
    }

    #[test]
    fn brute_ranks_on_the_triangle() {
        let g = triangle();
        assert_eq!(rank_brute(&g, &Divisor::from_vec(vec![1, 0, 0])), 0);
        assert_eq!(rank_brute(&g, &Divisor::from_vec(vec![1, 1, 0])), 1);
        assert_eq!(rank_brute(&g, &Divisor::from_vec(vec![-1, 1, 0])), -1);
        assert_eq!(linear_system_brute(&g, &Divisor::from_vec(vec![2, 0, 0])).len(), 2);
    }

    #[test]
    fn lattice_oracle_matches_the_solver() {
        let g = triangle();
        let oracle = LatticeOracle::new(&g);
        assert_eq!(oracle.tree_count(), 3);
        for d1 in bounded_divisors(3, 1) {
            for d2 in bounded_divisors(3, 1) {
                assert_eq!(oracle.equivalent(&d1, &d2), lattice_equivalent(&g, &d1, &d2));
            }
        }
    }

    #[test]
    fn small_multigraph_counts() {
        // two vertices: 1..=3 parallel edges; one vertex: the point
        assert_eq!(connected_multigraphs(2, 3).len(), 4);
        // three vertices with at most three edges: path, triangle, and
        // the path with one doubled edge
        let three: Vec<_> = connected_multigraphs(3, 3).into_iter().filter(|g| g.n_vertices() == 3).collect();
        assert_eq!(three.len(), 3);
    }

    #[test]
    fn brute_reducedness() {
        let g = triangle();
        assert!(is_q_reduced_brute(&g, &Divisor::from_vec(vec![5, 1, 0]), 0));
        assert!(!is_q_reduced_brute(&g, &Divisor::from_vec(vec![0, 1, 1]), 0));
        assert!(!is_q_reduced_brute(&g, &Divisor::from_vec(vec![0, 2, 0]), 0));
    }
}
