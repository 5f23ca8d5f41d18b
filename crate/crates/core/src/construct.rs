//! Graph constructions: joins, compositions (lexicographic products),
//! Mycielskians, seeded random graphs, triangle-free gadgets, and small
//! builders for the join-of-gadgets and recursive-composition shapes.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand_core::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::ackermann::{self, Tower};
use crate::graph::{Graph, GraphError};
use crate::invariants;
use crate::rational::{self, Rational};
use crate::rng;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("host has {host} vertices but {parts} parts were given")]
    PartCount { host: usize, parts: usize },
    #[error("join needs at least one part")]
    EmptyJoin,
    #[error("edge probability {0} is outside [0, 1]")]
    Probability(String),
    #[error("average degree {d} must lie in [0, {n})")]
    Degree { d: String, n: usize },
    #[error("no triangle-free graph in {tries} tries (fewest triangles seen: {min_triangles})")]
    BudgetExhausted { tries: u64, min_triangles: usize },
    #[error("target constant {0} must be at least 2")]
    Target(String),
    #[error("no average degree D with D/(2 ln D) = {c} on the requested branch below n = {n}")]
    NoDegree { c: String, n: usize },
    #[error("construction has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("recursive size split needs k >= 2 and n >= 2")]
    SplitParameters,
    #[error("no admissible m: n = {0} is too small")]
    NoValidM(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn block_labels(parts: &[&Graph]) -> Vec<String> {
    let mut labels = Vec::new();
    for (i, g) in parts.iter().enumerate() {
        match g.labels() {
            Some(ls) => labels.extend(ls.iter().map(|l| format!("{i}:{l}"))),
            None => labels.extend((0..g.n()).map(|j| format!("{i}:{j}"))),
        }
    }
    labels
}

/// `H{G_1, .., G_ℓ}`: the parts side by side in order, with all edges
/// between blocks `i` and `j` whenever `ij` is an edge of the host.
/// Vertex labels are `"<block>:<label in part>"`.
pub fn compose(host: &Graph, parts: &[Graph]) -> Result<Graph, ConstructError> {
    if host.n() != parts.len() || parts.is_empty() {
        return Err(ConstructError::PartCount {
            host: host.n(),
            parts: parts.len(),
        });
    }
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, g| {
            let o = *acc;
            *acc += g.n();
            Some(o)
        })
        .collect();
    let total: usize = parts.iter().map(Graph::n).sum();
    let blocks: Vec<VertexSet> = parts
        .iter()
        .zip(&offsets)
        .map(|(g, &o)| VertexSet::from_vertices(total, o..o + g.n()))
        .collect();
    let mut rows = Vec::with_capacity(total);
    for (i, g) in parts.iter().enumerate() {
        let mut across = VertexSet::empty(total);
        for j in host.neighbors(i) {
            across.union_with(&blocks[j]);
        }
        for v in 0..g.n() {
            let mut row = across.clone();
            for u in g.neighbors(v) {
                row.insert(offsets[i] + u);
            }
            rows.push(row);
        }
    }
    let refs: Vec<&Graph> = parts.iter().collect();
    Ok(Graph::from_rows(rows).with_labels(block_labels(&refs))?)
}

/// `G1 ∧ G2`: disjoint copies plus every edge between them.
pub fn join(g1: &Graph, g2: &Graph) -> Graph {
    let (n1, n) = (g1.n(), g1.n() + g2.n());
    let first = VertexSet::from_vertices(n, 0..n1);
    let second = VertexSet::from_vertices(n, n1..n);
    let mut rows = Vec::with_capacity(n);
    for v in 0..n1 {
        let mut r = second.clone();
        for u in g1.neighbors(v) {
            r.insert(u);
        }
        rows.push(r);
    }
    for v in 0..g2.n() {
        let mut r = first.clone();
        for u in g2.neighbors(v) {
            r.insert(n1 + u);
        }
        rows.push(r);
    }
    Graph::from_rows(rows)
        .with_labels(block_labels(&[g1, g2]))
        .expect("label count matches")
}

/// Left fold of [`join`]; the same adjacency as `compose(K_ℓ, parts)`.
pub fn join_many(parts: &[Graph]) -> Result<Graph, ConstructError> {
    let (first, rest) = parts.split_first().ok_or(ConstructError::EmptyJoin)?;
    let folded = rest
        .iter()
        .fold(first.clone().without_labels(), |acc, g| join(&acc, g));
    let refs: Vec<&Graph> = parts.iter().collect();
    Ok(folded.with_labels(block_labels(&refs))?)
}

pub fn disjoint_union(g1: &Graph, g2: &Graph) -> Graph {
    compose(&Graph::empty(2), &[g1.clone(), g2.clone()]).expect("two parts for two host vertices")
}

/// Lexicographic product `H[G]`: every host vertex blown up into a copy of `G`.
pub fn lex_product(host: &Graph, part: &Graph) -> Graph {
    if host.n() == 0 {
        return Graph::empty(0);
    }
    compose(host, &vec![part.clone(); host.n()]).expect("one part per host vertex")
}

/// Mycielskian: originals `0..n`, shadows `n..2n` (shadow `n+u` adjacent
/// to the neighbours of `u`), apex `2n` adjacent to every shadow.
pub fn mycielski(g: &Graph) -> Graph {
    let n = g.n();
    let apex = 2 * n;
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * g.edge_count() + n);
    for (u, v) in g.edges() {
        edges.push((u, v));
        edges.push((n + u, v));
        edges.push((n + v, u));
    }
    edges.extend((0..n).map(|u| (n + u, apex)));
    Graph::new(2 * n + 1, edges).expect("mycielski edges are in range")
}

/// `G(n, p)` driven by ChaCha8 (see [`crate::rng`]). Pairs consume one
/// `u64` each in the order `(0,1), (0,2), .., (n-2,n-1)`; the pair becomes
/// an edge when the draw is below `⌈p · 2^64⌉`.
pub fn random_graph(n: usize, p: &Rational, seed: u64) -> Result<Graph, ConstructError> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(ConstructError::Probability(rational::display(p)));
    }
    let scaled = Rational::from_integer(BigInt::one() << 64) * p;
    let threshold = scaled.ceil().to_integer().to_u128().expect("at most 2^64");
    let mut rng = rng::rng_from_seed(seed);
    let mut rows = vec![VertexSet::empty(n); n];
    for u in 0..n {
        for v in u + 1..n {
            if u128::from(rng.next_u64()) < threshold {
                rows[u].insert(v);
                rows[v].insert(u);
            }
        }
    }
    Ok(Graph::from_rows(rows))
}

#[derive(Debug, Clone)]
pub struct TriangleFreeSample {
    pub graph: Graph,
    /// Number of draws made, including the successful one.
    pub tries_used: u64,
    pub seed_used: u64,
}

/// Rejection-samples `G(n, D/n)` until a triangle-free draw appears. Try
/// `i` uses seed `derive_seed(seed, i)`.
pub fn sample_triangle_free(
    n: usize,
    d: &Rational,
    seed: u64,
    max_tries: u64,
) -> Result<TriangleFreeSample, ConstructError> {
    let p = degree_to_probability(n, d)?;
    let mut min_triangles = usize::MAX;
    for i in 0..max_tries {
        let s = rng::derive_seed(seed, i);
        let g = random_graph(n, &p, s)?;
        if g.is_triangle_free() {
            return Ok(TriangleFreeSample {
                graph: g,
                tries_used: i + 1,
                seed_used: s,
            });
        }
        min_triangles = min_triangles.min(g.triangle_count());
    }
    Err(ConstructError::BudgetExhausted {
        tries: max_tries,
        min_triangles: if max_tries == 0 { 0 } else { min_triangles },
    })
}

fn degree_to_probability(n: usize, d: &Rational) -> Result<Rational, ConstructError> {
    if *d < Rational::zero() || *d >= rational::from_usize(n) {
        return Err(ConstructError::Degree {
            d: rational::display(d),
            n,
        });
    }
    Ok(d / rational::from_usize(n))
}

/// Which solution of `C = D / (2 ln D)` to use. The map is convex on
/// `D > 1` with its minimum `e/2` at `D = e`, so every `C > e/2` has one
/// solution below `e` and one above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeBranch {
    /// The root in `(1, e)`; sparse enough that triangle-free draws are
    /// common at small `n`.
    Sparse,
    /// The root in `(e, n)`.
    Dense,
}

/// Solves `C = D / (2 ln D)` for `D` by bisection to within `1e-9` on `C`.
pub fn solve_average_degree(c: f64, n: usize, branch: DegreeBranch) -> Result<f64, ConstructError> {
    let f = |d: f64| d / (2.0 * d.ln());
    let e = std::f64::consts::E;
    let no_root = || ConstructError::NoDegree {
        c: c.to_string(),
        n,
    };
    if c.is_nan() || c <= e / 2.0 {
        return Err(no_root());
    }
    // f decreases on (1, e) and increases on (e, n)
    let (mut lo, mut hi, increasing) = match branch {
        DegreeBranch::Sparse => (1.0 + f64::EPSILON, e, false),
        DegreeBranch::Dense => {
            let top = n as f64;
            if top <= e || f(top) < c {
                return Err(no_root());
            }
            (e, top, true)
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let val = f(mid);
        if (val - c).abs() < 1e-9 {
            return Ok(mid);
        }
        if (val < c) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest subset size checked exhaustively/by sampling for the
/// small-subgraph colorability property: `⌊√(ln n)⌋`.
pub fn small_subgraph_size(n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    ((n as f64).ln().sqrt()).floor() as usize
}

/// Exhaustive checks are used while the number of subsets stays below this.
pub const EXHAUSTIVE_SUBSET_CAP: u64 = 1_000_000;
/// Number of random subsets drawn otherwise.
pub const SAMPLED_SUBSETS: u64 = 10_000;

/// Result of checking that every small induced subgraph is 3-colorable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmallSubgraphCheck {
    pub holds: bool,
    /// `true` when only random subsets were examined; never a certificate.
    pub sampled: bool,
    pub max_size: usize,
    pub subsets_checked: u64,
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Checks that every induced subgraph on at most `⌊√(ln n)⌋` vertices is
/// 3-colorable, exhaustively when there are at most
/// [`EXHAUSTIVE_SUBSET_CAP`] such subsets, else on [`SAMPLED_SUBSETS`]
/// seeded random subsets of the largest size.
pub fn check_small_subgraphs(g: &Graph, seed: u64) -> SmallSubgraphCheck {
    let n = g.n();
    let k = small_subgraph_size(n);
    let total = (1..=k as u64).fold(0u64, |acc, j| acc.saturating_add(binomial(n as u64, j)));
    let colorable = |set: &VertexSet| {
        set.len() <= 3
            || invariants::is_k_colorable(&g.induced(set).expect("nonempty"), 3).is_some()
    };
    if total <= EXHAUSTIVE_SUBSET_CAP {
        let mut checked = 0;
        let mut holds = true;
        for size in 1..=k {
            let mut combo: Vec<usize> = (0..size).collect();
            'outer: loop {
                checked += 1;
                if !colorable(&VertexSet::from_vertices(n, combo.iter().copied())) {
                    holds = false;
                }
                // next combination in lexicographic order
                let mut i = size;
                while i > 0 {
                    i -= 1;
                    if combo[i] < n - size + i {
                        combo[i] += 1;
                        for j in i + 1..size {
                            combo[j] = combo[j - 1] + 1;
                        }
                        continue 'outer;
                    }
                }
                break;
            }
        }
        return SmallSubgraphCheck {
            holds,
            sampled: false,
            max_size: k,
            subsets_checked: checked,
        };
    }
    let mut rng = rng::rng_from_seed(seed);
    let mut holds = true;
    for _ in 0..SAMPLED_SUBSETS {
        // partial Fisher-Yates for a uniform k-subset
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + rng::below(&mut rng, (n - i) as u64) as usize;
            pool.swap(i, j);
        }
        if !colorable(&VertexSet::from_vertices(n, pool[..k].iter().copied())) {
            holds = false;
        }
    }
    SmallSubgraphCheck {
        holds,
        sampled: true,
        max_size: k,
        subsets_checked: SAMPLED_SUBSETS,
    }
}

/// Exact summary of one triangle-free gadget candidate.
#[derive(Debug, Clone, Serialize)]
pub struct GadgetReport {
    pub n: usize,
    #[serde(with = "crate::rational")]
    pub target_c: Rational,
    /// Average degree `D` used for the draws (edge probability `D/n`).
    pub average_degree: f64,
    pub branch: DegreeBranch,
    pub edges: Vec<(usize, usize)>,
    pub alpha: usize,
    pub chi: usize,
    pub triangle_free: bool,
    /// `1.001·C > χ` and `n/α > C`.
    pub property_a_holds: bool,
    pub property_b: SmallSubgraphCheck,
    pub tries_used: u64,
    pub candidates_examined: u64,
    pub winning_try: u64,
    #[serde(skip)]
    pub graph: Graph,
}

impl GadgetReport {
    /// The recorded flags agree with the recorded numbers and graph.
    pub fn is_consistent(&self) -> bool {
        let n = rational::from_usize(self.n);
        let a = rational::rat(1001, 1000) * &self.target_c > rational::from_usize(self.chi)
            && self.alpha > 0
            && n / rational::from_usize(self.alpha) > self.target_c;
        a == self.property_a_holds
            && self.graph.n() == self.n
            && self.graph.is_triangle_free() == self.triangle_free
            && self.graph.edges().eq(self.edges.iter().copied())
            && invariants::alpha_value(&self.graph) == self.alpha
    }
}

/// Draws `budget` candidates `G(n, D/n)` with `C = D/(2 ln D)` (sparse
/// root), evaluates every triangle-free one exactly and keeps the best by
/// (property A, property B, n/α), earliest try on ties.
pub fn search_gadget(
    n: usize,
    c: &Rational,
    seed: u64,
    budget: u64,
) -> Result<GadgetReport, ConstructError> {
    search_gadget_on(n, c, seed, budget, DegreeBranch::Sparse)
}

/// Largest `n` for which the gadget search computes α and χ.
pub const GADGET_LIMIT: usize = 40;

pub fn search_gadget_on(
    n: usize,
    c: &Rational,
    seed: u64,
    budget: u64,
    branch: DegreeBranch,
) -> Result<GadgetReport, ConstructError> {
    if *c < rational::int(2) {
        return Err(ConstructError::Target(rational::display(c)));
    }
    if n > GADGET_LIMIT {
        return Err(ConstructError::TooLarge {
            n,
            limit: GADGET_LIMIT,
        });
    }
    let c_float = c.to_f64().unwrap_or(f64::INFINITY);
    let d = solve_average_degree(c_float, n, branch)?;
    let d_exact = Rational::from_float(d).expect("finite degree");
    let p = degree_to_probability(n, &d_exact)?;
    let mut best: Option<(bool, bool, Rational, GadgetReport)> = None;
    let mut candidates = 0;
    let mut min_triangles = usize::MAX;
    for i in 0..budget {
        let g = random_graph(n, &p, rng::derive_seed(seed, i))?;
        if !g.is_triangle_free() {
            min_triangles = min_triangles.min(g.triangle_count());
            continue;
        }
        candidates += 1;
        let (alpha, _) = invariants::alpha(&g);
        let (chi, _) = invariants::chromatic_number(&g);
        let ratio = if alpha == 0 {
            Rational::zero()
        } else {
            rational::from_usize(n) / rational::from_usize(alpha)
        };
        let a = rational::rat(1001, 1000) * c > rational::from_usize(chi) && ratio > *c;
        let b = check_small_subgraphs(&g, rng::derive_seed(seed ^ 0xB, i));
        let better = match &best {
            None => true,
            Some((ba, bb, br, _)) => (a, b.holds, &ratio) > (*ba, *bb, br),
        };
        if better {
            let report = GadgetReport {
                n,
                target_c: c.clone(),
                average_degree: d,
                branch,
                edges: g.edges().collect(),
                alpha,
                chi,
                triangle_free: true,
                property_a_holds: a,
                property_b: b.clone(),
                tries_used: 0,
                candidates_examined: 0,
                winning_try: i,
                graph: g,
            };
            best = Some((a, b.holds, ratio, report));
        }
    }
    match best {
        Some((_, _, _, mut report)) => {
            report.tries_used = budget;
            report.candidates_examined = candidates;
            Ok(report)
        }
        None => Err(ConstructError::BudgetExhausted {
            tries: budget,
            min_triangles: if budget == 0 { 0 } else { min_triangles },
        }),
    }
}

// ---------------------------------------------------------------------------
// Expression trees
// ---------------------------------------------------------------------------

/// How a graph is built.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstructionExpr {
    Base(Graph),
    Cycle(usize),
    Complete(usize),
    Kneser(usize, usize),
    Join(Vec<ConstructionExpr>),
    Compose {
        host: Box<ConstructionExpr>,
        parts: Vec<ConstructionExpr>,
    },
    Lex {
        host: Box<ConstructionExpr>,
        part: Box<ConstructionExpr>,
    },
    Mycielski(Box<ConstructionExpr>),
    Random {
        n: usize,
        p: Rational,
        seed: u64,
    },
    TriangleFreeGadget {
        n: usize,
        d: Rational,
        seed: u64,
        budget: u64,
    },
}

fn binomial_usize(n: usize, k: usize) -> usize {
    usize::try_from(binomial(n as u64, k as u64)).unwrap_or(usize::MAX)
}

impl ConstructionExpr {
    /// Vertex count without building the graph.
    pub fn vertex_count(&self) -> usize {
        use ConstructionExpr::*;
        match self {
            Base(g) => g.n(),
            Cycle(n) | Complete(n) => *n,
            Kneser(n, k) => binomial_usize(*n, *k),
            Join(parts) | Compose { parts, .. } => parts.iter().map(Self::vertex_count).sum(),
            Lex { host, part } => host.vertex_count().saturating_mul(part.vertex_count()),
            Mycielski(inner) => 2 * inner.vertex_count() + 1,
            Random { n, .. } | TriangleFreeGadget { n, .. } => *n,
        }
    }

    /// Checks structural invariants: composition arity and nonzero counts.
    pub fn validate(&self) -> Result<(), ConstructError> {
        use ConstructionExpr::*;
        match self {
            Base(_) => Ok(()),
            Cycle(n) if *n < 3 => Err(GraphError::Family {
                family: "cycle",
                detail: format!("needs at least 3 vertices, got {n}"),
            }
            .into()),
            Complete(0) => Err(GraphError::Family {
                family: "complete",
                detail: "needs at least 1 vertex".into(),
            }
            .into()),
            Kneser(n, k) if *k == 0 || *k > *n || *n > 24 => Err(GraphError::Family {
                family: "kneser",
                detail: format!("need 1 <= k <= n <= 24, got n={n}, k={k}"),
            }
            .into()),
            Cycle(_) | Complete(_) | Kneser(..) => Ok(()),
            Join(parts) => {
                if parts.is_empty() {
                    return Err(ConstructError::EmptyJoin);
                }
                parts.iter().try_for_each(Self::validate)
            }
            Compose { host, parts } => {
                host.validate()?;
                if host.vertex_count() != parts.len() {
                    return Err(ConstructError::PartCount {
                        host: host.vertex_count(),
                        parts: parts.len(),
                    });
                }
                parts.iter().try_for_each(Self::validate)
            }
            Lex { host, part } => {
                host.validate()?;
                part.validate()
            }
            Mycielski(inner) => inner.validate(),
            Random { n: 0, .. } | TriangleFreeGadget { n: 0, .. } => Err(GraphError::Family {
                family: "random",
                detail: "needs at least 1 vertex".into(),
            }
            .into()),
            Random { p, .. } => {
                if *p < Rational::zero() || *p > Rational::one() {
                    Err(ConstructError::Probability(rational::display(p)))
                } else {
                    Ok(())
                }
            }
            TriangleFreeGadget { n, d, .. } => degree_to_probability(*n, d).map(|_| ()),
        }
    }

    pub fn build(&self) -> Result<Graph, ConstructError> {
        use ConstructionExpr::*;
        self.validate()?;
        Ok(match self {
            Base(g) => g.clone(),
            Cycle(n) => Graph::cycle(*n)?,
            Complete(n) => Graph::complete(*n),
            Kneser(n, k) => Graph::kneser(*n, *k)?,
            Join(parts) => {
                let built = parts.iter().map(Self::build).collect::<Result<Vec<_>, _>>()?;
                join_many(&built)?
            }
            Compose { host, parts } => {
                let h = host.build()?;
                let built = parts.iter().map(Self::build).collect::<Result<Vec<_>, _>>()?;
                compose(&h, &built)?
            }
            Lex { host, part } => lex_product(&host.build()?, &part.build()?),
            Mycielski(inner) => mycielski(&inner.build()?),
            Random { n, p, seed } => random_graph(*n, p, *seed)?,
            TriangleFreeGadget { n, d, seed, budget } => {
                sample_triangle_free(*n, d, *seed, *budget)?.graph
            }
        })
    }

    pub fn build_within(&self, limit: usize) -> Result<Graph, ConstructError> {
        let n = self.vertex_count();
        if n > limit {
            return Err(ConstructError::TooLarge { n, limit });
        }
        self.build()
    }
}

impl fmt::Display for ConstructionExpr {
    /// Canonical text form, accepted back by the expression parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConstructionExpr::*;
        fn list(f: &mut fmt::Formatter<'_>, items: &[ConstructionExpr]) -> fmt::Result {
            for (i, e) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            Ok(())
        }
        match self {
            Base(g) => {
                write!(f, "edges({}", g.n())?;
                for (i, (u, v)) in g.edges().enumerate() {
                    write!(f, "{}{u}-{v}", if i == 0 { ";" } else { "," })?;
                }
                f.write_str(")")
            }
            Cycle(n) => write!(f, "cycle({n})"),
            Complete(n) => write!(f, "complete({n})"),
            Kneser(n, k) => write!(f, "kneser({n},{k})"),
            Join(parts) => {
                f.write_str("join(")?;
                list(f, parts)?;
                f.write_str(")")
            }
            Compose { host, parts } => {
                write!(f, "compose({host};")?;
                list(f, parts)?;
                f.write_str(")")
            }
            Lex { host, part } => write!(f, "lex({host},{part})"),
            Mycielski(inner) => write!(f, "mycielski({inner})"),
            Random { n, p, seed } => write!(f, "random({n},{},seed={seed})", rational::display(p)),
            TriangleFreeGadget { n, d, seed, budget } => write!(
                f,
                "gadget({n},{},seed={seed},budget={budget})",
                rational::display(d)
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Miniature counterexample shapes
// ---------------------------------------------------------------------------

/// Vertex cap for the miniature builders (exact χ_f and ρ must stay cheap).
pub const MINIATURE_LIMIT: usize = 64;

/// Join of small parts standing in for the random gadgets of the
/// join-of-gadgets construction.
#[derive(Debug, Clone)]
pub struct JoinMiniature {
    /// Labels are `"<part>:<vertex>"`.
    pub graph: Graph,
    pub part_sizes: Vec<usize>,
    #[doc = "Gadget constant; the analysis uses `P = 8C`."]
    pub target_c: Rational,
}

pub fn theorem2_miniature(
    parts: &[ConstructionExpr],
    c: &Rational,
) -> Result<JoinMiniature, ConstructError> {
    let n: usize = parts.iter().map(ConstructionExpr::vertex_count).sum();
    if n > MINIATURE_LIMIT {
        return Err(ConstructError::TooLarge {
            n,
            limit: MINIATURE_LIMIT,
        });
    }
    let built = parts
        .iter()
        .map(ConstructionExpr::build)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JoinMiniature {
        part_sizes: built.iter().map(Graph::n).collect(),
        graph: join_many(&built)?,
        target_c: c.clone(),
    })
}

/// The small/big split of a vertex set `X` of a join miniature, with the
/// independent-set quantities both halves of the counting argument use.
#[derive(Debug, Clone, Serialize)]
pub struct SplitAnalysis {
    /// Parts with `|X_i| < √(ln n_i)`.
    pub small: Vec<usize>,
    pub big: Vec<usize>,
    pub v_small: usize,
    pub v_big: usize,
    /// α of the subgraph induced by the small parts of `X`.
    pub alpha_small: usize,
    pub alpha_big: usize,
    /// `α(G[X_i])` for the small part with the largest `|X_i|`.
    pub alpha_largest_small_part: usize,
    /// `α(G[X_z])` for the largest big index `z`.
    pub alpha_top_big_part: usize,
    #[serde(with = "crate::rational")]
    pub small_claim_bound: Rational,
    #[serde(with = "crate::rational")]
    pub big_claim_bound: Rational,
    pub small_claim_holds: bool,
    pub big_claim_holds: bool,
}

impl JoinMiniature {
    fn block(&self, i: usize) -> VertexSet {
        let start: usize = self.part_sizes[..i].iter().sum();
        VertexSet::from_vertices(self.graph.n(), start..start + self.part_sizes[i])
    }

    fn alpha_of(&self, set: &VertexSet) -> usize {
        if set.is_empty() {
            0
        } else {
            invariants::alpha_value(&self.graph.induced(set).expect("nonempty"))
        }
    }

    /// Splits `x` into small and big parts and evaluates the two
    /// independent-set bounds with `P = 8C`: `4 v_s / (3P)` on the small
    /// side and `4 v_b / P` on the big side. At this scale the bounds are
    /// reported, not guaranteed.
    pub fn analyze(&self, x: &VertexSet) -> SplitAnalysis {
        let mut small = Vec::new();
        let mut big = Vec::new();
        let mut small_set = VertexSet::empty(self.graph.n());
        let mut big_set = VertexSet::empty(self.graph.n());
        for i in 0..self.part_sizes.len() {
            let xi = x.intersection(&self.block(i));
            let threshold = (self.part_sizes[i] as f64).ln().sqrt();
            if (xi.len() as f64) < threshold {
                small.push(i);
                small_set.union_with(&xi);
            } else {
                big.push(i);
                big_set.union_with(&xi);
            }
        }
        let largest_small = small
            .iter()
            .map(|&i| x.intersection(&self.block(i)))
            .max_by_key(VertexSet::len)
            .map(|s| self.alpha_of(&s))
            .unwrap_or(0);
        let top_big = big
            .last()
            .map(|&z| self.alpha_of(&x.intersection(&self.block(z))))
            .unwrap_or(0);
        let p = rational::int(8) * &self.target_c;
        let v_small = small_set.len();
        let v_big = big_set.len();
        let small_claim_bound = rational::from_usize(4 * v_small) / (rational::int(3) * &p);
        let big_claim_bound = rational::from_usize(4 * v_big) / &p;
        let alpha_small = self.alpha_of(&small_set);
        let alpha_big = self.alpha_of(&big_set);
        SplitAnalysis {
            small_claim_holds: rational::from_usize(alpha_small) >= small_claim_bound,
            big_claim_holds: rational::from_usize(alpha_big) >= big_claim_bound,
            small,
            big,
            v_small,
            v_big,
            alpha_small,
            alpha_big,
            alpha_largest_small_part: largest_small,
            alpha_top_big_part: top_big,
            small_claim_bound,
            big_claim_bound,
        }
    }
}

/// Part sizes for the recursive composition at level `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursiveSizes {
    pub m: u64,
    pub b: Vec<BigUint>,
    /// `F_k(4m - 1) > n`.
    pub certificate: bool,
}

fn level_tower(k: u32, b: u64, budget: u64) -> Tower {
    ackermann::tower(k, &BigUint::from(b), budget).expect("level is at least 2")
}

/// `m + Σ_{i=2}^{m} F_k(m + 3i - 6)`, or `None` once it exceeds `n`.
fn split_total(m: u64, k: u32, n: &BigUint) -> Option<BigUint> {
    let budget = n.bits() + 2;
    let mut total = BigUint::from(m);
    if total > *n {
        return None;
    }
    for i in 2..=m {
        match level_tower(k, m + 3 * i - 6, budget) {
            Tower::Value(v) => total += v,
            Tower::Overflow { .. } => return None,
        }
        if total > *n {
            return None;
        }
    }
    Some(total)
}

/// The largest `m` with `m + Σ_{i=2}^{m} F_k(m+3i-6) ≤ n`, and the sizes
/// `b_1 = m`, `b_i = F_k(m+3i-6)` for `2 ≤ i < m`, `b_m = n - Σ_{i<m} b_i`.
/// When `m = 1` the single size is the remainder, `n`.
pub fn lemma32_sizes(n: &BigUint, k: u32) -> Result<RecursiveSizes, ConstructError> {
    if k < 2 || *n < BigUint::from(2u32) {
        return Err(ConstructError::SplitParameters);
    }
    if split_total(1, k, n).is_none() {
        return Err(ConstructError::NoValidM(n.to_string()));
    }
    let mut m = 1u64;
    while split_total(m + 1, k, n).is_some() {
        m += 1;
    }
    let budget = n.bits() + 2;
    let mut b = vec![BigUint::from(m)];
    for i in 2..m {
        match level_tower(k, m + 3 * i - 6, budget) {
            Tower::Value(v) => b.push(v),
            Tower::Overflow { .. } => unreachable!("bounded by the admissible total"),
        }
    }
    let head: BigUint = if m == 1 { BigUint::zero() } else { b.iter().sum() };
    let remainder = n - head;
    if m == 1 {
        b[0] = remainder;
    } else {
        b.push(remainder);
    }
    let certificate = match level_tower(k, 4 * m - 1, budget) {
        Tower::Value(v) => v > *n,
        Tower::Overflow { .. } => true,
    };
    Ok(RecursiveSizes { m, b, certificate })
}

/// Whether `m` satisfies the defining inequality of [`lemma32_sizes`].
pub fn lemma32_admissible(m: u64, k: u32, n: &BigUint) -> bool {
    split_total(m, k, n).is_some()
}

/// A composition `H{G_1, .., G_m}` at recursion level `k`; when host and
/// parts are triangle-free and `k = 2` it should contain no `K_5`.
#[derive(Debug, Clone)]
pub struct RecursiveMiniature {
    pub graph: Graph,
    pub level: u32,
    /// `2^k + 1`, the clique size the construction excludes.
    pub forbidden_clique: usize,
}

pub fn lemma32_miniature(
    k: u32,
    host: &ConstructionExpr,
    parts: &[ConstructionExpr],
) -> Result<RecursiveMiniature, ConstructError> {
    let expr = ConstructionExpr::Compose {
        host: Box::new(host.clone()),
        parts: parts.to_vec(),
    };
    expr.validate()?;
    let graph = expr.build_within(MINIATURE_LIMIT)?;
    Ok(RecursiveMiniature {
        graph,
        level: k,
        forbidden_clique: (1usize << k) + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn c(n: usize) -> Graph {
        Graph::cycle(n).unwrap()
    }

    #[test]
    fn join_examples() {
        let k1 = Graph::complete(1);
        assert!(join(&k1, &k1).same_adjacency(&Graph::complete(2)));
        let j = join(&c(5), &c(5));
        assert_eq!((j.n(), j.edge_count()), (10, 35));
        let k23 = join(&Graph::empty(2), &Graph::empty(3));
        assert_eq!(k23.edge_count(), 6);
        assert!(k23.is_triangle_free());
        assert_eq!(k23.degree_sequence(), vec![3, 3, 2, 2, 2]);
    }

    #[test]
    fn join_many_examples() {
        let k1 = Graph::complete(1);
        assert!(join_many(&[k1.clone(), k1.clone(), k1])
            .unwrap()
            .same_adjacency(&Graph::complete(3)));
        assert!(join_many(&[c(5), c(7)]).unwrap().same_adjacency(&join(&c(5), &c(7))));
        let g = join_many(&[c(5), c(7), c(11)]).unwrap();
        assert_eq!(g.n(), 23);
        assert_eq!(g.edge_count(), 5 + 7 + 11 + 5 * 7 + 5 * 11 + 7 * 11);
        assert_eq!(g.edge_count(), 190);
        assert_eq!(join_many(&[]), Err(ConstructError::EmptyJoin));
    }

    #[test]
    fn compose_examples() {
        let a = compose(&Graph::complete(2), &[c(5), Graph::complete(3)]).unwrap();
        assert!(a.same_adjacency(&join(&c(5), &Graph::complete(3))));
        let k2 = Graph::complete(2);
        let u = compose(&Graph::empty(2), &[k2.clone(), k2]).unwrap();
        assert!(u.same_adjacency(&Graph::new(4, [(0, 1), (2, 3)]).unwrap()));
        let c4 = compose(&c(4), &vec![Graph::complete(1); 4]).unwrap();
        assert!(c4.same_adjacency(&c(4)));
        assert_eq!(
            compose(&c(4), &[Graph::complete(1)]),
            Err(ConstructError::PartCount { host: 4, parts: 1 })
        );
        assert_eq!(a.labels().unwrap()[5], "1:0");
    }

    #[test]
    fn lex_examples() {
        let k2 = Graph::complete(2);
        assert!(lex_product(&k2, &k2).same_adjacency(&Graph::complete(4)));
        let g = lex_product(&c(5), &k2);
        assert_eq!((g.n(), g.edge_count()), (10, 25));
        let p = Graph::petersen();
        assert!(lex_product(&Graph::complete(1), &p).same_adjacency(&p));
    }

    #[test]
    fn mycielski_examples() {
        let m = mycielski(&Graph::complete(2));
        assert_eq!((m.n(), m.edge_count()), (5, 5));
        // 0-1-2-4-3-0 is the cycle; relabel 3->4, 4->3
        assert!(m.relabel(&[0, 1, 2, 4, 3]).unwrap().same_adjacency(&c(5)));
        let g = mycielski(&c(5));
        assert_eq!((g.n(), g.edge_count()), (11, 20));
        assert!(g.is_triangle_free());
        assert!(mycielski(&Graph::complete(1)).same_adjacency(&Graph::new(3, [(1, 2)]).unwrap()));
    }

    #[test]
    fn random_graph_examples() {
        assert!(random_graph(5, &int(0), 99).unwrap().same_adjacency(&Graph::empty(5)));
        assert!(random_graph(5, &int(1), 99).unwrap().same_adjacency(&Graph::complete(5)));
        let a = random_graph(10, &rat(1, 2), 42).unwrap();
        let b = random_graph(10, &rat(1, 2), 42).unwrap();
        assert!(a.same_adjacency(&b));
        assert!(!a.same_adjacency(&random_graph(10, &rat(1, 2), 43).unwrap()));
        assert!(random_graph(3, &rat(3, 2), 1).is_err());
        assert!(random_graph(3, &rat(-1, 2), 1).is_err());
    }

    #[test]
    fn random_graph_density_is_plausible() {
        let g = random_graph(200, &rat(1, 4), 5).unwrap();
        let pairs = 200 * 199 / 2;
        let m = g.edge_count() as f64;
        // mean 4975, sd ≈ 61
        assert!((m - pairs as f64 / 4.0).abs() < 400.0, "{m}");
    }

    #[test]
    fn sampler_examples() {
        let s = sample_triangle_free(30, &int(2), 11, 1000).unwrap();
        assert!(s.graph.is_triangle_free());
        let s = sample_triangle_free(5, &int(0), 11, 1).unwrap();
        assert_eq!(s.tries_used, 1);
        assert_eq!(s.graph.edge_count(), 0);
        assert!(matches!(
            sample_triangle_free(10, &int(9), 1, 3),
            Err(ConstructError::BudgetExhausted { tries: 3, .. })
        ));
        assert!(sample_triangle_free(10, &int(10), 1, 3).is_err());
    }

    #[test]
    fn degree_solver_branches() {
        let f = |d: f64| d / (2.0 * d.ln());
        let lo = solve_average_degree(2.0, 24, DegreeBranch::Sparse).unwrap();
        assert!(lo > 1.0 && lo < std::f64::consts::E);
        assert!((f(lo) - 2.0).abs() < 1e-9);
        let hi = solve_average_degree(2.0, 24, DegreeBranch::Dense).unwrap();
        assert!(hi > std::f64::consts::E && hi < 24.0);
        assert!((f(hi) - 2.0).abs() < 1e-9);
        assert!(solve_average_degree(1.0, 24, DegreeBranch::Sparse).is_err());
        assert!(solve_average_degree(10.0, 24, DegreeBranch::Dense).is_err());
    }

    #[test]
    fn gadget_examples() {
        let r = search_gadget(20, &int(2), 3, 200).unwrap();
        assert!(r.triangle_free);
        assert!(r.is_consistent());
        assert_eq!(r.property_b.max_size, 1);
        assert!(r.property_b.holds && !r.property_b.sampled);
        // χ ≤ 2 < 2.002 would need n/α ≤ 2: the flag is recorded, not forced
        let r = search_gadget(30, &rat(5, 2), 3, 500).unwrap();
        assert!(r.is_consistent());
        assert!(search_gadget(20, &rat(3, 2), 3, 10).is_err());
    }

    #[test]
    fn small_subgraph_sampling_kicks_in() {
        let g = random_graph(300, &rat(1, 100), 1).unwrap();
        // ⌊√ln 300⌋ = 2, C(300,1)+C(300,2) = 45150: exhaustive
        let r = check_small_subgraphs(&g, 0);
        assert!(!r.sampled && r.holds);
        assert_eq!(r.subsets_checked, 300 + 44850);
        assert_eq!(binomial(5000, 2), 12_497_500);
    }

    #[test]
    fn join_miniature_examples() {
        let parts = [ConstructionExpr::Cycle(5), ConstructionExpr::Cycle(7)];
        let m = theorem2_miniature(&parts, &int(2)).unwrap();
        assert_eq!(m.graph.n(), 12);
        assert!(m.graph.same_adjacency(&join(&c(5), &c(7))));
        assert_eq!(m.graph.labels().unwrap()[5], "1:0");
        let single = theorem2_miniature(&[ConstructionExpr::Cycle(5)], &int(2)).unwrap();
        assert!(single.graph.same_adjacency(&c(5)));
        let big = vec![ConstructionExpr::Complete(30); 3];
        assert!(theorem2_miniature(&big, &int(2)).is_err());
    }

    #[test]
    fn split_analysis_on_join_of_cycles() {
        let parts = [ConstructionExpr::Cycle(5), ConstructionExpr::Cycle(7)];
        let m = theorem2_miniature(&parts, &int(2)).unwrap();
        // X = one vertex of C5 (small: 1 < √ln 5 ≈ 1.27) and all of C7 (big)
        let x = VertexSet::from_vertices(12, [0].into_iter().chain(5..12));
        let a = m.analyze(&x);
        assert_eq!(a.small, vec![0]);
        assert_eq!(a.big, vec![1]);
        assert_eq!((a.v_small, a.v_big), (1, 7));
        assert_eq!((a.alpha_small, a.alpha_big), (1, 3));
        assert_eq!(a.alpha_top_big_part, 3);
        assert!(a.small_claim_holds && a.big_claim_holds);
    }

    #[test]
    fn lemma32_small_cases() {
        let s = lemma32_sizes(&BigUint::from(2u32), 2).unwrap();
        assert_eq!(s.m, 1);
        assert_eq!(s.b, vec![BigUint::from(2u32)]);
        assert!(s.certificate);
        // m = 2 needs 2 + F_2(2) = 6 ≤ n
        let s = lemma32_sizes(&BigUint::from(6u32), 2).unwrap();
        assert_eq!(s.m, 2);
        assert_eq!(s.b, vec![BigUint::from(2u32), BigUint::from(4u32)]);
        let s = lemma32_sizes(&BigUint::from(100u32), 2).unwrap();
        // m = 3 needs 3 + F_2(3) + F_2(6) which overflows any budget near 100
        assert_eq!(s.m, 2);
        assert!(lemma32_admissible(2, 2, &BigUint::from(100u32)));
        assert!(!lemma32_admissible(3, 2, &BigUint::from(100u32)));
        assert!(lemma32_sizes(&BigUint::from(1u32), 2).is_err());
        assert!(lemma32_sizes(&BigUint::from(10u32), 1).is_err());
    }

    #[test]
    fn lemma32_miniature_examples() {
        let five = vec![ConstructionExpr::Cycle(5); 5];
        let m = lemma32_miniature(2, &ConstructionExpr::Cycle(5), &five).unwrap();
        assert_eq!(m.graph.n(), 25);
        assert_eq!(m.forbidden_clique, 5);
        assert!(m.graph.same_adjacency(&lex_product(&c(5), &c(5))));
        let j = lemma32_miniature(
            2,
            &ConstructionExpr::Complete(2),
            &[ConstructionExpr::Cycle(5), ConstructionExpr::Cycle(7)],
        )
        .unwrap();
        assert!(j.graph.same_adjacency(&join(&c(5), &c(7))));
        let u = lemma32_miniature(
            2,
            &ConstructionExpr::Base(Graph::empty(2)),
            &[ConstructionExpr::Complete(3), ConstructionExpr::Complete(3)],
        )
        .unwrap();
        assert_eq!(u.graph.components().len(), 2);
        assert!(lemma32_miniature(2, &ConstructionExpr::Cycle(5), &five[..4]).is_err());
    }

    #[test]
    fn expr_display_and_count() {
        let e = ConstructionExpr::Compose {
            host: Box::new(ConstructionExpr::Cycle(3)),
            parts: vec![
                ConstructionExpr::Complete(1),
                ConstructionExpr::Mycielski(Box::new(ConstructionExpr::Complete(2))),
                ConstructionExpr::Random {
                    n: 4,
                    p: rat(1, 4),
                    seed: 7,
                },
            ],
        };
        assert_eq!(
            e.to_string(),
            "compose(cycle(3);complete(1),mycielski(complete(2)),random(4,1/4,seed=7))"
        );
        assert_eq!(e.vertex_count(), 10);
        assert_eq!(e.build().unwrap().n(), 10);
        assert_eq!(ConstructionExpr::Kneser(7, 3).vertex_count(), 35);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
            (1..=max_n, any::<u64>(), 0i64..=4).prop_map(|(n, seed, q)| {
                random_graph(n, &rat(q, 4), seed).unwrap()
            })
        }

        proptest! {
            #[test]
            fn join_edge_count(a in arb_graph(9), b in arb_graph(9)) {
                let j = join(&a, &b);
                prop_assert_eq!(j.edge_count(), a.edge_count() + b.edge_count() + a.n() * b.n());
            }

            #[test]
            fn complete_host_is_join(parts in proptest::collection::vec(arb_graph(5), 1..5)) {
                let c = compose(&Graph::complete(parts.len()), &parts).unwrap();
                prop_assert!(c.same_adjacency(&join_many(&parts).unwrap()));
            }

            #[test]
            fn compose_respects_blocks(
                host in arb_graph(5),
                seed in any::<u64>(),
            ) {
                let parts: Vec<Graph> = (0..host.n())
                    .map(|i| random_graph(1 + i % 3, &rat(1, 2), seed.wrapping_add(i as u64)).unwrap())
                    .collect();
                let g = compose(&host, &parts).unwrap();
                let mut owner = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    owner.extend(std::iter::repeat_n(i, p.n()));
                }
                for u in 0..g.n() {
                    for v in 0..g.n() {
                        if owner[u] != owner[v] {
                            prop_assert_eq!(g.has_edge(u, v), host.has_edge(owner[u], owner[v]));
                        }
                    }
                }
            }

            #[test]
            fn random_graph_is_deterministic(n in 1usize..30, seed in any::<u64>(), q in 0i64..=8) {
                let p = rat(q, 8);
                prop_assert!(random_graph(n, &p, seed).unwrap().same_adjacency(&random_graph(n, &p, seed).unwrap()));
            }
        }
    }

    #[test]
    fn mycielski_keeps_triangle_free() {
        for i in 0..50 {
            let s = sample_triangle_free(12, &rat(5, 2), rng::derive_seed(2024, i), 10_000).unwrap();
            let m = mycielski(&s.graph);
            assert!(m.is_triangle_free());
            assert_eq!(m.edge_count(), 3 * s.graph.edge_count() + s.graph.n());
        }
    }

    #[test]
    fn random_graph_is_thread_independent() {
        let base = random_graph(40, &rat(1, 3), 77).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(|| random_graph(40, &rat(1, 3), 77).unwrap()))
            .collect();
        for h in handles {
            assert!(h.join().unwrap().same_adjacency(&base));
        }
    }
}
