//! Chip-firing on the underlying graph: divisors, the Laplacian, q-reduced
//! forms, linear equivalence, complete linear systems and rank.

use std::collections::{BTreeMap, VecDeque};
use std::ops::{Add, Index, Neg, Sub};

use crate::enumerate::{count_effective, Budget, Compositions};
use crate::error::{Error, Result};
use crate::graph::RealGraph;

/// Base vertex used for reductions: the least vertex id.
pub const BASE_VERTEX: usize = 0;

macro_rules! vertex_function {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Vec<i64>);

        impl $name {
            pub fn zero(n: usize) -> Self {
                $name(vec![0; n])
            }

            pub fn from_vec(values: Vec<i64>) -> Self {
                $name(values)
            }

            pub fn as_slice(&self) -> &[i64] {
                &self.0
            }

            pub fn into_vec(self) -> Vec<i64> {
                self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn iter(&self) -> std::slice::Iter<'_, i64> {
                self.0.iter()
            }

            pub fn set(&mut self, v: usize, value: i64) {
                self.0[v] = value;
            }

            pub fn add_at(&mut self, v: usize, amount: i64) {
                self.0[v] += amount;
            }

            /// Parse a `{"vertex_id": value}` map; absent vertices are 0.
            pub fn from_ids(g: &RealGraph, map: &BTreeMap<String, i64>) -> Result<Self> {
                let mut values = vec![0; g.n_vertices()];
                for (id, &c) in map {
                    let v =
                        g.vertex_index(id).ok_or_else(|| Error::ForeignDivisor(format!("unknown vertex `{id}`")))?;
                    values[v] = c;
                }
                Ok($name(values))
            }

            pub fn from_json(g: &RealGraph, text: &str) -> Result<Self> {
                let map: BTreeMap<String, i64> = serde_json::from_str(text)?;
                Self::from_ids(g, &map)
            }

            pub(crate) fn check_graph(&self, g: &RealGraph) -> Result<()> {
                if self.0.len() != g.n_vertices() {
                    return Err(Error::ForeignDivisor(format!(
                        "{} entries for {} vertices",
                        self.0.len(),
                        g.n_vertices()
                    )));
                }
                Ok(())
            }
        }

        impl Index<usize> for $name {
            type Output = i64;
            fn index(&self, v: usize) -> &i64 {
                &self.0[v]
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                assert_eq!(self.0.len(), rhs.0.len());
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                assert_eq!(self.0.len(), rhs.0.len());
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(self.0.iter().map(|a| -a).collect())
            }
        }
    };
}

vertex_function!(Divisor);
vertex_function!(PotentialFunction);

impl Divisor {
    /// The divisor `1·v`.
    pub fn unit(n: usize, v: usize) -> Self {
        let mut d = Divisor::zero(n);
        d.0[v] = 1;
        d
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Coefficientwise `self ≥ other`.
    pub fn dominates(&self, other: &Divisor) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v] != 0).collect()
    }

    /// Nonzero coefficients keyed by vertex id.
    pub fn to_ids(&self, g: &RealGraph) -> BTreeMap<String, i64> {
        self.support().into_iter().map(|v| (g.vertex_id(v).to_owned(), self.0[v])).collect()
    }

    pub fn to_json(&self, g: &RealGraph) -> String {
        serde_json::to_string(&self.to_ids(g)).expect("map serialization cannot fail")
    }
}

impl PotentialFunction {
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Shift so the value at `v` is zero.
    pub fn normalized_at(&self, v: usize) -> Self {
        let base = self.0[v];
        PotentialFunction(self.0.iter().map(|x| x - base).collect())
    }

    /// Every value keyed by vertex id.
    pub fn to_ids(&self, g: &RealGraph) -> BTreeMap<String, i64> {
        (0..self.0.len()).map(|v| (g.vertex_id(v).to_owned(), self.0[v])).collect()
    }

    pub fn to_json(&self, g: &RealGraph) -> String {
        serde_json::to_string(&self.to_ids(g)).expect("map serialization cannot fail")
    }
}

/// Principal divisor: `Δ(f)(v) = Σ_{e ∋ v, e = {v,w}} (f(w) − f(v))`.
/// Loops contribute nothing; parallel edges count once each.
pub fn laplacian(g: &RealGraph, f: &PotentialFunction) -> Divisor {
    assert_eq!(f.len(), g.n_vertices(), "potential does not match graph");
    let mut d = vec![0; g.n_vertices()];
    for e in 0..g.n_edges() {
        let (a, b) = g.ends(e);
        if a != b {
            let diff = f[b] - f[a];
            d[a] += diff;
            d[b] -= diff;
        }
    }
    Divisor(d)
}

/// Coefficient at `v` is `val(v) − 2`, loops counted twice.
pub fn canonical_divisor(g: &RealGraph) -> Divisor {
    Divisor((0..g.n_vertices()).map(|v| g.valence(v) - 2).collect())
}

/// A q-reduced divisor together with its base vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedForm {
    pub base_vertex: usize,
    pub divisor: Divisor,
}

/// Reusable state for reducing many divisors against one base vertex.
#[derive(Debug, Clone)]
pub struct Reducer {
    base: usize,
    /// Neighbours with edge multiplicity, loops dropped.
    nbrs: Vec<Vec<(usize, i64)>>,
    /// Vertices grouped by BFS distance from the base.
    layers: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl Reducer {
    pub fn new(g: &RealGraph, base: usize) -> Self {
        let n = g.n_vertices();
        let mut nbrs: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for v in 0..n {
            let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
            for &e in g.incident_edges(v) {
                let w = g.other_end(e, v);
                if w != v {
                    *counts.entry(w).or_default() += 1;
                }
            }
            nbrs[v] = counts.into_iter().collect();
        }
        let mut depth = vec![usize::MAX; n];
        depth[base] = 0;
        let mut queue = VecDeque::from([base]);
        let mut layers: Vec<Vec<usize>> = vec![vec![base]];
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &nbrs[u] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    if layers.len() <= depth[w] {
                        layers.push(Vec::new());
                    }
                    layers[depth[w]].push(w);
                    queue.push_back(w);
                }
            }
        }
        Reducer { base, nbrs, layers, depth }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Fire the set `fire` (a mask) `times` times.
    fn fire(&self, d: &mut [i64], f: &mut [i64], fire: &[bool], times: i64) {
        for v in 0..d.len() {
            if !fire[v] {
                continue;
            }
            f[v] += times;
            for &(w, m) in &self.nbrs[v] {
                if !fire[w] {
                    d[v] -= m * times;
                    d[w] += m * times;
                }
            }
        }
    }

    /// Make every coefficient off the base nonnegative by firing the balls
    /// `{dist ≤ k}` from the outermost layer inwards.
    fn make_nonnegative_off_base(&self, d: &mut [i64], f: &mut [i64]) {
        for k in (0..self.layers.len().saturating_sub(1)).rev() {
            let mut times = 0;
            for &v in &self.layers[k + 1] {
                if d[v] < 0 {
                    let gain: i64 = self.nbrs[v].iter().filter(|&&(w, _)| self.depth[w] == k).map(|&(_, m)| m).sum();
                    times = times.max((-d[v] + gain - 1) / gain);
                }
            }
            if times > 0 {
                let ball: Vec<bool> = self.depth.iter().map(|&dd| dd <= k).collect();
                self.fire(d, f, &ball, times);
            }
        }
    }

    /// Reduce in place, accumulating into `f` so that the input plus `Δ(f)`
    /// is the output.
    pub fn reduce_in_place(&self, d: &mut [i64], f: &mut [i64]) {
        let n = d.len();
        self.make_nonnegative_off_base(d, f);
        let mut burnt = vec![false; n];
        let mut threat = vec![0i64; n];
        let mut queue = VecDeque::new();
        loop {
            burnt.iter_mut().for_each(|b| *b = false);
            threat.iter_mut().for_each(|t| *t = 0);
            burnt[self.base] = true;
            queue.push_back(self.base);
            while let Some(u) = queue.pop_front() {
                for &(w, m) in &self.nbrs[u] {
                    if !burnt[w] {
                        threat[w] += m;
                        if threat[w] > d[w] {
                            burnt[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
            // unburnt vertices can fire together; do it as often as possible
            let mut times = i64::MAX;
            let mut any = false;
            for v in 0..n {
                if !burnt[v] {
                    any = true;
                    if threat[v] > 0 {
                        times = times.min(d[v] / threat[v]);
                    }
                }
            }
            if !any {
                break;
            }
            let unburnt: Vec<bool> = burnt.iter().map(|b| !b).collect();
            debug_assert!((1..i64::MAX).contains(&times));
            self.fire(d, f, &unburnt, times);
        }
        let shift = f[self.base];
        f.iter_mut().for_each(|x| *x -= shift);
    }

    pub fn reduce(&self, d: &Divisor) -> (ReducedForm, PotentialFunction) {
        let mut out = d.0.clone();
        let mut f = vec![0; out.len()];
        self.reduce_in_place(&mut out, &mut f);
        (ReducedForm { base_vertex: self.base, divisor: Divisor(out) }, PotentialFunction(f))
    }

    /// Whether `d` is equivalent to an effective divisor.
    pub fn has_effective_representative(&self, d: &[i64]) -> bool {
        let mut work = d.to_vec();
        let mut f = vec![0; d.len()];
        self.reduce_in_place(&mut work, &mut f);
        work[self.base] >= 0
    }
}

/// Whether `d` is q-reduced: nonnegative off `q`, and no nonempty set
/// avoiding `q` can fire without some vertex going negative.
pub fn is_q_reduced(g: &RealGraph, d: &Divisor, q: usize) -> bool {
    if (0..g.n_vertices()).any(|v| v != q && d[v] < 0) {
        return false;
    }
    let (reduced, _) = Reducer::new(g, q).reduce(d);
    &reduced.divisor == d
}

/// The unique q-reduced divisor equivalent to `d`, with `d + Δ(f)` equal to it.
pub fn q_reduce(g: &RealGraph, d: &Divisor, q: usize) -> (ReducedForm, PotentialFunction) {
    Reducer::new(g, q).reduce(d)
}

/// A potential `f` with `d1 + Δ(f) = d2`, if the divisors are equivalent.
pub fn linearly_equivalent(g: &RealGraph, d1: &Divisor, d2: &Divisor) -> Option<PotentialFunction> {
    if d1.degree() != d2.degree() {
        return None;
    }
    let reducer = Reducer::new(g, BASE_VERTEX);
    let (r1, f1) = reducer.reduce(d1);
    let (r2, f2) = reducer.reduce(d2);
    (r1 == r2).then(|| &f1 - &f2)
}

/// Every effective divisor equivalent to `d`, in enumeration order.
pub fn complete_linear_system(g: &RealGraph, d: &Divisor, budget: &Budget) -> Result<Vec<Divisor>> {
    d.check_graph(g)?;
    let degree = d.degree();
    if degree < 0 {
        return Ok(Vec::new());
    }
    budget.check(count_effective(g.n_vertices(), degree))?;
    let reducer = Reducer::new(g, BASE_VERTEX);
    let (target, _) = reducer.reduce(d);
    if target.divisor[BASE_VERTEX] < 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut sweep = Compositions::new(g.n_vertices(), degree);
    let mut f = vec![0; g.n_vertices()];
    while let Some(candidate) = sweep.next_slice() {
        let mut work = candidate.to_vec();
        reducer.reduce_in_place(&mut work, &mut f);
        if work == target.divisor.0 {
            out.push(Divisor(candidate.to_vec()));
        }
    }
    Ok(out)
}

/// Rank together with an effective `E` of degree `rank + 1` such that
/// `|D − E|` is empty (absent when the rank equals the degree).
pub fn rank_with_obstruction(g: &RealGraph, d: &Divisor, budget: &Budget) -> Result<(i64, Option<Divisor>)> {
    d.check_graph(g)?;
    let n = g.n_vertices();
    let degree = d.degree();
    if degree < 0 {
        return Ok((-1, Some(Divisor::zero(n))));
    }
    let reducer = Reducer::new(g, BASE_VERTEX);
    let (reduced, _) = reducer.reduce(d);
    if reduced.divisor[BASE_VERTEX] < 0 {
        return Ok((-1, Some(Divisor::zero(n))));
    }
    let base = reduced.divisor.0;
    let mut work = vec![0; n];
    let mut f = vec![0; n];
    for r in 1..=degree {
        budget.check(count_effective(n, r))?;
        let mut sweep = Compositions::new(n, r);
        while let Some(e) = sweep.next_slice() {
            for v in 0..n {
                work[v] = base[v] - e[v];
            }
            reducer.reduce_in_place(&mut work, &mut f);
            if work[BASE_VERTEX] < 0 {
                return Ok((r - 1, Some(Divisor(e.to_vec()))));
            }
        }
    }
    Ok((degree, None))
}

/// Baker–Norine rank; −1 when `|D|` is empty.
pub fn rank(g: &RealGraph, d: &Divisor, budget: &Budget) -> Result<i64> {
    rank_with_obstruction(g, d, budget).map(|(r, _)| r)
}
