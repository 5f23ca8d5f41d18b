//! Exact combinatorial invariants: independence number (plain and
//! weighted), chromatic number, cliques, and the composition/sparsity
//! checks built on top of them.
//!
//! Witness sets are always the smallest bitmask among the optimal ones
//! (see [`VertexSet`]'s ordering), so results are stable across runs.

use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::construct::{self, ConstructError};
use crate::graph::{Graph, GraphError};
use crate::rational::Rational;
use crate::vertex_set::VertexSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvariantError {
    #[error("weight vector has length {got}, graph has {n} vertices")]
    WeightLength { got: usize, n: usize },
    #[error("weight of vertex {0} is negative")]
    NegativeWeight(usize),
    #[error("graph has {n} vertices, limit for this computation is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("a sparse graph (every component has at most as many edges as vertices) failed to 3-color")]
    ObservationViolated,
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Nonnegative rational vertex weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightFn(#[serde(with = "crate::rational::vec")] Vec<Rational>);

impl WeightFn {
    pub fn new(weights: Vec<Rational>) -> Result<Self, InvariantError> {
        if let Some(v) = weights.iter().position(|w| w.is_negative()) {
            return Err(InvariantError::NegativeWeight(v));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize, w: Rational) -> Self {
        Self::new(vec![w; n]).expect("uniform weight must be nonnegative")
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn weight_of(&self, set: &VertexSet) -> Rational {
        set.iter().map(|v| &self.0[v]).sum()
    }
}

impl<'de> Deserialize<'de> for WeightFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = crate::rational::vec::deserialize(d)?;
        WeightFn::new(raw).map_err(serde::de::Error::custom)
    }
}

/// A vertex coloring with palette `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub k: usize,
}

impl Coloring {
    /// Checks palette bounds and properness by scanning every edge.
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.colors.len() == g.n()
            && self.colors.iter().all(|&c| c < self.k)
            && g.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }

    pub fn classes(&self) -> Vec<VertexSet> {
        let mut out = vec![VertexSet::empty(self.colors.len()); self.k];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].insert(v);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Independence number
// ---------------------------------------------------------------------------

/// Independence number by branch and bound, plus the smallest-mask maximum
/// independent set.
pub fn alpha(g: &Graph) -> (usize, VertexSet) {
    let value = alpha_value(g);
    if value == 0 {
        return (0, VertexSet::empty(g.n()));
    }
    let unit = vec![1u128; g.n()];
    let witness = ordered_mwis(g, &unit, Some(value as u128 - 1))
        .expect("a set of size alpha exists")
        .0;
    debug_assert_eq!(witness.len(), value);
    (value, witness)
}

/// Independence number only. Branches on a maximum-degree vertex; the bound
/// is the number of remaining candidates. Vertices of degree at most one in
/// the candidate set are taken greedily (some maximum set contains them).
pub fn alpha_value(g: &Graph) -> usize {
    let mut best = 0;
    alpha_branch(g, g.vertex_set(), 0, &mut best);
    best
}

fn alpha_branch(g: &Graph, mut cand: VertexSet, mut size: usize, best: &mut usize) {
    loop {
        if size + cand.len() <= *best {
            return;
        }
        let mut pivot: Option<(usize, usize)> = None;
        let mut forced = None;
        for v in &cand {
            let d = g.neighbors(v).intersection_len(&cand);
            if d <= 1 {
                forced = Some(v);
                break;
            }
            if pivot.is_none_or(|(_, pd)| d > pd) {
                pivot = Some((v, d));
            }
        }
        if let Some(v) = forced {
            size += 1;
            cand.difference_with(g.neighbors(v));
            cand.remove(v);
            continue;
        }
        let Some((v, _)) = pivot else {
            *best = (*best).max(size);
            return;
        };
        let mut with_v = cand.difference(g.neighbors(v));
        with_v.remove(v);
        alpha_branch(g, with_v, size + 1, best);
        cand.remove(v);
        alpha_branch(g, cand, size, best);
        return;
    }
}

/// Weights usable by the ordered search: exact, totally ordered, additive.
pub(crate) trait SearchWeight: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> {}
impl SearchWeight for u128 {}
impl SearchWeight for BigUint {}

/// Maximum-weight independent set, returning the smallest bitmask among
/// the optimal sets.
///
/// Vertices are decided from the highest index down, excluding before
/// including, so complete sets are reached in increasing bitmask order and
/// only strict improvements replace the incumbent. The bound is a greedy
/// weighted clique cover of the candidates.
///
/// With `floor = Some(f)` only sets heavier than `f` are reported, and
/// `None` is returned when there is none.
pub(crate) fn ordered_mwis<W: SearchWeight>(
    g: &Graph,
    weights: &[W],
    floor: Option<W>,
) -> Option<(VertexSet, W)> {
    let mut search = OrderedSearch {
        g,
        weights,
        best_weight: floor.clone().unwrap_or_else(W::zero),
        best: if floor.is_none() {
            Some(VertexSet::empty(g.n()))
        } else {
            None
        },
    };
    let mut current = VertexSet::empty(g.n());
    search.descend(g.vertex_set(), &mut current, W::zero());
    let OrderedSearch {
        best, best_weight, ..
    } = search;
    best.map(|b| (b, best_weight))
}

struct OrderedSearch<'a, W> {
    g: &'a Graph,
    weights: &'a [W],
    best_weight: W,
    best: Option<VertexSet>,
}

impl<W: SearchWeight> OrderedSearch<'_, W> {
    fn descend(&mut self, mut cand: VertexSet, current: &mut VertexSet, weight: W) {
        // zero-weight vertices never improve a set and only enlarge the mask
        for v in cand.clone().iter() {
            if self.weights[v].is_zero() {
                cand.remove(v);
            }
        }
        let Some(v) = cand.last() else {
            if weight > self.best_weight {
                self.best_weight = weight;
                self.best = Some(current.clone());
            }
            return;
        };
        let mut bound = weight.clone();
        bound += &self.clique_cover_bound(&cand);
        if bound <= self.best_weight {
            return;
        }
        let mut without = cand.clone();
        without.remove(v);
        self.descend(without, current, weight.clone());

        let mut with = cand;
        with.difference_with(self.g.neighbors(v));
        with.remove(v);
        current.insert(v);
        let mut w = weight;
        w += &self.weights[v];
        self.descend(with, current, w);
        current.remove(v);
    }

    fn clique_cover_bound(&self, cand: &VertexSet) -> W {
        let mut rest = cand.clone();
        let mut total = W::zero();
        while let Some(u) = rest.last() {
            rest.remove(u);
            let mut heaviest = &self.weights[u];
            let mut common = rest.intersection(self.g.neighbors(u));
            while let Some(x) = common.last() {
                rest.remove(x);
                if self.weights[x] > *heaviest {
                    heaviest = &self.weights[x];
                }
                common.intersect_with(self.g.neighbors(x));
            }
            total += heaviest;
        }
        total
    }
}

/// Maximum weight of an independent set together with the smallest-mask
/// optimal set.
pub fn alpha_weighted(g: &Graph, w: &WeightFn) -> Result<(Rational, VertexSet), InvariantError> {
    if w.len() != g.n() {
        return Err(InvariantError::WeightLength {
            got: w.len(),
            n: g.n(),
        });
    }
    // Scale to integers by the lcm of the denominators.
    let scale = w
        .weights()
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scaled: Vec<BigUint> = w
        .weights()
        .iter()
        .map(|r| {
            (r.numer() * (&scale / r.denom()))
                .to_biguint()
                .expect("weights are nonnegative")
        })
        .collect();
    let small: Option<Vec<u128>> = scaled
        .iter()
        .map(|x| x.to_u64().map(u128::from))
        .collect();
    let (set, total) = match small {
        Some(ws) => {
            let (s, t) = ordered_mwis(g, &ws, None).expect("empty set is always available");
            (s, BigUint::from(t))
        }
        None => ordered_mwis(g, &scaled, None).expect("empty set is always available"),
    };
    Ok((Rational::new(BigInt::from(total), scale), set))
}

// ---------------------------------------------------------------------------
// Cliques
// ---------------------------------------------------------------------------

/// Clique number with the smallest-mask maximum clique.
pub fn clique_number(g: &Graph) -> (usize, VertexSet) {
    alpha(&g.complement())
}

/// A clique on `r` vertices, if one exists.
pub fn clique_at_least(g: &Graph, r: usize) -> Option<VertexSet> {
    let (omega, witness) = clique_number(g);
    if omega < r {
        return None;
    }
    Some(VertexSet::from_vertices(g.n(), witness.iter().take(r)))
}

/// Largest clique found by greedy extension from every start vertex.
fn greedy_clique_size(g: &Graph) -> usize {
    let mut best = usize::from(g.n() > 0);
    for start in 0..g.n() {
        let mut size = 1;
        let mut cand = g.neighbors(start).clone();
        while !cand.is_empty() {
            let next = cand
                .iter()
                .max_by_key(|&v| (g.neighbors(v).intersection_len(&cand), std::cmp::Reverse(v)))
                .expect("nonempty");
            size += 1;
            cand.intersect_with(g.neighbors(next));
        }
        best = best.max(size);
    }
    best
}

// ---------------------------------------------------------------------------
// Coloring
// ---------------------------------------------------------------------------

/// A proper `k`-coloring if one exists, by DSATUR-ordered backtracking.
pub fn is_k_colorable(g: &Graph, k: usize) -> Option<Coloring> {
    if g.n() == 0 {
        return Some(Coloring { colors: vec![], k });
    }
    if k == 0 {
        return None;
    }
    let mut search = Dsatur::new(g, k);
    if search.solve(0, 0) {
        Some(Coloring {
            colors: search.color.iter().map(|c| c.expect("all colored")).collect(),
            k,
        })
    } else {
        None
    }
}

struct Dsatur<'a> {
    g: &'a Graph,
    k: usize,
    color: Vec<Option<usize>>,
    /// `counts[v * k + c]`: colored neighbours of `v` with color `c`.
    counts: Vec<u32>,
    saturation: Vec<usize>,
    uncolored: VertexSet,
}

impl<'a> Dsatur<'a> {
    fn new(g: &'a Graph, k: usize) -> Self {
        Self {
            g,
            k,
            color: vec![None; g.n()],
            counts: vec![0; g.n() * k],
            saturation: vec![0; g.n()],
            uncolored: g.vertex_set(),
        }
    }

    /// Uncolored vertex with maximum saturation, then maximum degree into
    /// the uncolored part, then smallest index.
    fn pick(&self) -> Option<usize> {
        self.uncolored.iter().max_by_key(|&v| {
            (
                self.saturation[v],
                self.g.neighbors(v).intersection_len(&self.uncolored),
                std::cmp::Reverse(v),
            )
        })
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.color[v] = Some(c);
        self.uncolored.remove(v);
        for u in self.g.neighbors(v) {
            let slot = &mut self.counts[u * self.k + c];
            *slot += 1;
            if *slot == 1 {
                self.saturation[u] += 1;
            }
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.color[v] = None;
        self.uncolored.insert(v);
        for u in self.g.neighbors(v) {
            let slot = &mut self.counts[u * self.k + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[u] -= 1;
            }
        }
    }

    fn solve(&mut self, colored: usize, used: usize) -> bool {
        let Some(v) = self.pick() else {
            return true;
        };
        // colors beyond `used` are interchangeable: try only the first new one
        for c in 0..self.k.min(used + 1) {
            if self.counts[v * self.k + c] != 0 {
                continue;
            }
            self.assign(v, c);
            if self.solve(colored + 1, used.max(c + 1)) {
                return true;
            }
            self.unassign(v, c);
        }
        false
    }
}

/// Greedy DSATUR coloring (no backtracking).
pub fn dsatur_greedy(g: &Graph) -> Coloring {
    let k = g.n().max(1);
    let mut s = Dsatur::new(g, k);
    let mut used = 0;
    while let Some(v) = s.pick() {
        let c = (0..k)
            .find(|&c| s.counts[v * k + c] == 0)
            .expect("n colors always suffice");
        s.assign(v, c);
        used = used.max(c + 1);
    }
    Coloring {
        colors: s.color.iter().map(|c| c.expect("all colored")).collect(),
        k: used,
    }
}

/// Chromatic number with an optimal coloring.
///
/// Disconnected graphs are colored per component and joins (disconnected
/// complements) per co-component, since χ is the maximum over components
/// and the sum over co-components. Otherwise `k` climbs from
/// `max(greedy clique, ⌈n/α⌉)` until DSATUR backtracking succeeds, with the
/// greedy DSATUR coloring as the upper bracket.
pub fn chromatic_number(g: &Graph) -> (usize, Coloring) {
    let n = g.n();
    if n == 0 {
        return (0, Coloring { colors: vec![], k: 0 });
    }
    let comps = g.components();
    if comps.len() > 1 {
        let mut colors = vec![0; n];
        let mut k = 0;
        for comp in &comps {
            let sub = g.induced(comp).expect("component is nonempty");
            let (kc, col) = chromatic_number(&sub);
            for (i, v) in comp.iter().enumerate() {
                colors[v] = col.colors[i];
            }
            k = k.max(kc);
        }
        return (k, Coloring { colors, k });
    }
    let co_comps = g.complement().components();
    if co_comps.len() > 1 {
        let mut colors = vec![0; n];
        let mut k = 0;
        for comp in &co_comps {
            let sub = g.induced(comp).expect("co-component is nonempty");
            let (kc, col) = chromatic_number(&sub);
            for (i, v) in comp.iter().enumerate() {
                colors[v] = k + col.colors[i];
            }
            k += kc;
        }
        return (k, Coloring { colors, k });
    }
    let upper = dsatur_greedy(g);
    let lower = greedy_clique_size(g).max(n.div_ceil(alpha_value(g)));
    for k in lower..upper.k {
        if let Some(c) = is_k_colorable(g, k) {
            return (k, c);
        }
    }
    (upper.k, upper)
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// Checks the sparse-graph 3-colorability observation on `g`.
///
/// Every subgraph has at most as many edges as vertices exactly when every
/// component does (a component with `m <= n` is a tree or unicyclic, and
/// so are all of its subgraphs). Returns whether that hypothesis holds;
/// when it does, a failed 3-coloring is reported as an error.
pub fn check_sparse_three_colorable(g: &Graph) -> Result<bool, InvariantError> {
    let sparse = g.components().iter().all(|comp| {
        let twice_edges: usize = comp.iter().map(|v| g.neighbors(v).intersection_len(comp)).sum();
        twice_edges / 2 <= comp.len()
    });
    if sparse && is_k_colorable(g, 3).is_none() {
        return Err(InvariantError::ObservationViolated);
    }
    Ok(sparse)
}

/// Vertex cap for the exact coloring checks on compositions.
pub const COMPOSITION_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropColCheck {
    /// χ(H) · max χ(G_i)
    pub lhs: usize,
    /// χ(H{G_1, .., G_ℓ})
    pub rhs: usize,
    pub ok: bool,
    /// The product coloring (host color, part color) is proper.
    pub product_coloring_proper: bool,
}

/// Compares χ(H)·max χ(G_i) against χ(H{G_1,..,G_ℓ}), and verifies the
/// pair coloring that witnesses the upper bound.
pub fn check_prop_col(host: &Graph, parts: &[Graph]) -> Result<PropColCheck, InvariantError> {
    let composed = construct::compose(host, parts)?;
    if composed.n() > COMPOSITION_LIMIT {
        return Err(InvariantError::TooLarge {
            n: composed.n(),
            limit: COMPOSITION_LIMIT,
        });
    }
    let (chi_h, host_col) = chromatic_number(host);
    let part_cols: Vec<(usize, Coloring)> = parts.iter().map(chromatic_number).collect();
    let k = part_cols.iter().map(|(c, _)| *c).max().unwrap_or(0);
    let (rhs, _) = chromatic_number(&composed);

    let mut colors = Vec::with_capacity(composed.n());
    for (i, (_, col)) in part_cols.iter().enumerate() {
        for &c in &col.colors {
            colors.push(host_col.colors[i] * k + c);
        }
    }
    let product = Coloring {
        colors,
        k: chi_h * k,
    };
    let lhs = chi_h * k;
    Ok(PropColCheck {
        lhs,
        rhs,
        ok: lhs >= rhs,
        product_coloring_proper: product.is_proper(&composed),
    })
}
