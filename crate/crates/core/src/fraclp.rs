//! Exact fractional chromatic number.
//!
//! The covering LP `min Σ x_I` subject to `Σ_{I∋v} x_I ≥ 1` over independent
//! sets `I` is solved by column generation: an exact revised simplex over
//! [`Rational`] (Bland's rule) on a restricted master that starts from the
//! singleton columns, priced by an exact maximum-weight independent set
//! under the current duals. The output carries both the primal cover and the
//! dual vertex weights, so the optimum can be re-checked independently.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{self, ConstructError};
use crate::graph::Graph;
use crate::invariants::{self, InvariantError, WeightFn};
use crate::rational::{self, Rational};
use crate::vertex_set::VertexSet;

/// Largest graph the column-generation solver accepts by default.
pub const DEFAULT_LP_LIMIT: usize = 60;
/// Default cap on numerator/denominator bit length inside the simplex.
pub const DEFAULT_BIT_CAP: u64 = 4096;
/// Largest graph for which every maximal independent set is enumerated.
pub const FULL_ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpOptions {
    pub max_n: usize,
    pub bit_cap: u64,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_LP_LIMIT,
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("the fractional chromatic number needs at least one vertex")]
    Empty,
    #[error("graph has {n} vertices, solver limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("simplex entries reached {bits} bits (cap {cap}) after {pivots} pivots")]
    BitCap { bits: u64, cap: u64, pivots: usize },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// One column of the primal solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimalEntry {
    pub set: Vec<usize>,
    #[serde(with = "crate::rational")]
    pub weight: Rational,
}

/// Optimal primal cover and dual vertex weights of equal value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionalCertificate {
    #[serde(with = "crate::rational")]
    pub value: Rational,
    /// Sorted by vertex list.
    pub primal: Vec<PrimalEntry>,
    pub dual: WeightFn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub pivots: usize,
    /// Columns in the final restricted master, singletons included.
    pub columns: usize,
    pub pricing_rounds: usize,
    pub max_bits: u64,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub certificate: FractionalCertificate,
    pub stats: SolveStats,
}

/// Restricted master `min Σ x_c` s.t. `A x - s = 1`, `x, s ≥ 0`.
///
/// Variable `j < n` is the surplus of row `j`; variable `n + c` is column
/// `c`. The basis inverse is kept dense.
struct Master {
    n: usize,
    columns: Vec<VertexSet>,
    basis: Vec<usize>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    pivots: usize,
    max_bits: u64,
    bit_cap: u64,
}

impl Master {
    /// Starts from the singleton columns, which form the identity basis.
    fn new(n: usize, extra: Vec<VertexSet>, bit_cap: u64) -> Self {
        let mut columns: Vec<VertexSet> = (0..n).map(|v| VertexSet::from_vertices(n, [v])).collect();
        columns.extend(extra.into_iter().filter(|s| s.len() > 1));
        let binv = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Self {
            n,
            columns,
            basis: (n..2 * n).collect(),
            binv,
            xb: vec![Rational::one(); n],
            pivots: 0,
            max_bits: 1,
            bit_cap,
        }
    }

    fn is_column(&self, var: usize) -> bool {
        var >= self.n
    }

    /// `y = c_B B⁻¹`.
    fn duals(&self) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.n];
        for (i, &var) in self.basis.iter().enumerate() {
            if self.is_column(var) {
                for (yv, b) in y.iter_mut().zip(&self.binv[i]) {
                    if !b.is_zero() {
                        *yv += b;
                    }
                }
            }
        }
        y
    }

    /// Smallest-index variable with negative reduced cost (Bland).
    fn entering(&self, y: &[Rational]) -> Option<usize> {
        if let Some(j) = y.iter().position(Signed::is_negative) {
            return Some(j);
        }
        let one = Rational::one();
        self.columns
            .iter()
            .position(|c| c.iter().map(|v| &y[v]).sum::<Rational>() > one)
            .map(|c| self.n + c)
    }

    /// `B⁻¹ a` for the constraint column of `var`.
    fn direction(&self, var: usize) -> Vec<Rational> {
        if self.is_column(var) {
            let set = &self.columns[var - self.n];
            self.binv
                .iter()
                .map(|row| set.iter().map(|v| &row[v]).sum())
                .collect()
        } else {
            self.binv.iter().map(|row| -&row[var]).collect()
        }
    }

    fn pivot(&mut self, entering: usize) -> Result<(), LpError> {
        let d = self.direction(entering);
        let mut leave: Option<(usize, Rational)> = None;
        for (i, di) in d.iter().enumerate() {
            if !di.is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / di;
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // the objective is bounded below by 0, so a blocking row exists
        let (r, _) = leave.expect("bounded LP has a blocking row");
        let pr = d[r].clone();
        for e in self.binv[r].iter_mut() {
            if !e.is_zero() {
                *e /= &pr;
            }
        }
        self.xb[r] /= &pr;
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r].clone();
        let mut bits = rational::bit_length(&pivot_x);
        for e in &pivot_row {
            bits = bits.max(rational::bit_length(e));
        }
        for (i, di) in d.iter().enumerate() {
            if i == r || di.is_zero() {
                continue;
            }
            for (e, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *e -= di * p;
                    bits = bits.max(rational::bit_length(e));
                }
            }
            self.xb[i] -= di * &pivot_x;
            bits = bits.max(rational::bit_length(&self.xb[i]));
        }
        self.basis[r] = entering;
        self.pivots += 1;
        self.max_bits = self.max_bits.max(bits);
        if self.max_bits > self.bit_cap {
            return Err(LpError::BitCap {
                bits: self.max_bits,
                cap: self.bit_cap,
                pivots: self.pivots,
            });
        }
        Ok(())
    }

    /// Runs primal simplex to optimality over the current columns.
    fn optimize(&mut self) -> Result<Vec<Rational>, LpError> {
        loop {
            let y = self.duals();
            match self.entering(&y) {
                Some(var) => self.pivot(var)?,
                None => return Ok(y),
            }
        }
    }

    fn certificate(&self, y: Vec<Rational>) -> FractionalCertificate {
        let mut primal: Vec<PrimalEntry> = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&var, x)| self.is_column(var) && x.is_positive())
            .map(|(&var, x)| PrimalEntry {
                set: self.columns[var - self.n].to_vec(),
                weight: x.clone(),
            })
            .collect();
        primal.sort_by(|a, b| a.set.cmp(&b.set));
        let value: Rational = primal.iter().map(|p| &p.weight).sum();
        let dual = WeightFn::new(y).expect("optimal duals are nonnegative");
        assert_eq!(dual.total(), value, "simplex ended with a duality gap");
        FractionalCertificate {
            value,
            primal,
            dual,
        }
    }

    fn stats(&self, pricing_rounds: usize) -> SolveStats {
        SolveStats {
            pivots: self.pivots,
            columns: self.columns.len(),
            pricing_rounds,
            max_bits: self.max_bits,
        }
    }
}

fn guard(g: &Graph, limit: usize) -> Result<(), LpError> {
    if g.n() == 0 {
        return Err(LpError::Empty);
    }
    if g.n() > limit {
        return Err(LpError::TooLarge { n: g.n(), limit });
    }
    Ok(())
}

/// `χ_f(G)` by column generation with the default limits.
pub fn chi_f(g: &Graph) -> Result<FractionalCertificate, LpError> {
    Ok(chi_f_with(g, &LpOptions::default())?.certificate)
}

pub fn chi_f_with(g: &Graph, opts: &LpOptions) -> Result<LpSolution, LpError> {
    guard(g, opts.max_n)?;
    let mut master = Master::new(g.n(), Vec::new(), opts.bit_cap);
    let mut rounds = 0;
    loop {
        let y = master.optimize()?;
        rounds += 1;
        let weights = WeightFn::new(y.clone())?;
        let (best, set) = invariants::alpha_weighted(g, &weights)?;
        if best > Rational::one() {
            master.columns.push(set);
        } else {
            return Ok(LpSolution {
                certificate: master.certificate(y),
                stats: master.stats(rounds),
            });
        }
    }
}

/// All maximal independent sets, in increasing mask order.
pub fn maximal_independent_sets(g: &Graph) -> Vec<VertexSet> {
    fn extend(
        g: &Graph,
        current: &mut VertexSet,
        candidates: VertexSet,
        excluded: VertexSet,
        out: &mut Vec<VertexSet>,
    ) {
        if candidates.is_empty() {
            if excluded.is_empty() {
                out.push(current.clone());
            }
            return;
        }
        // pivot: the vertex whose closed neighbourhood meets the fewest candidates
        let closed = |u: usize| {
            let mut s = g.neighbors(u).clone();
            s.insert(u);
            s
        };
        let pivot = candidates
            .union(&excluded)
            .iter()
            .min_by_key(|&u| closed(u).intersection_len(&candidates))
            .expect("nonempty");
        let branch = candidates.intersection(&closed(pivot));
        let mut candidates = candidates;
        let mut excluded = excluded;
        for v in &branch {
            let nv = closed(v);
            current.insert(v);
            extend(
                g,
                current,
                candidates.difference(&nv),
                excluded.difference(&nv),
                out,
            );
            current.remove(v);
            candidates.remove(v);
            excluded.insert(v);
        }
    }
    let n = g.n();
    let mut out = Vec::new();
    if n > 0 {
        extend(g, &mut VertexSet::empty(n), VertexSet::full(n), VertexSet::empty(n), &mut out);
    }
    out.sort();
    out
}

/// `χ_f(G)` from a master holding every maximal independent set up front,
/// with no pricing step.
pub fn chi_f_full_enumeration(g: &Graph) -> Result<FractionalCertificate, LpError> {
    guard(g, FULL_ENUMERATION_LIMIT)?;
    let mut master = Master::new(g.n(), maximal_independent_sets(g), DEFAULT_BIT_CAP);
    let y = master.optimize()?;
    Ok(master.certificate(y))
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum CertificateDefect {
    #[error("a rational is not in lowest terms with positive denominator")]
    NonCanonical,
    #[error("primal entry {index} is empty, unsorted or out of range")]
    MalformedSet { index: usize },
    #[error("primal entry {index} is not an independent set")]
    NotIndependent { index: usize },
    #[error("primal entry {index} has nonpositive weight")]
    NonPositiveWeight { index: usize },
    #[error("primal entries {first} and {second} repeat a set")]
    DuplicateSet { first: usize, second: usize },
    #[error("vertex {vertex} is covered with total weight below 1")]
    CoverageViolated { vertex: usize },
    #[error("primal weights do not sum to the claimed value")]
    PrimalValueMismatch,
    #[error("dual has {got} entries for {n} vertices")]
    DualLength { got: usize, n: usize },
    #[error("dual weights do not sum to the claimed value")]
    DualValueMismatch,
    #[error("independent set {set:?} has dual weight above 1")]
    DualInfeasible { set: Vec<usize> },
    #[error("maximum dual weight of an independent set times the value differs from the dual total")]
    NotTight,
}

/// Re-checks a certificate from scratch.
///
/// Dual weights are nonnegative by construction of [`WeightFn`]; dual
/// feasibility and tightness use an exact maximum-weight independent set.
pub fn verify_certificate(g: &Graph, cert: &FractionalCertificate) -> Result<(), CertificateDefect> {
    let n = g.n();
    let all = std::iter::once(&cert.value)
        .chain(cert.primal.iter().map(|p| &p.weight))
        .chain(cert.dual.weights());
    if !all.into_iter().all(rational::is_canonical) {
        return Err(CertificateDefect::NonCanonical);
    }
    if cert.dual.len() != n {
        return Err(CertificateDefect::DualLength {
            got: cert.dual.len(),
            n,
        });
    }
    let dual_total = cert.dual.total();
    if dual_total != cert.value {
        return Err(CertificateDefect::DualValueMismatch);
    }
    let mut sets = Vec::with_capacity(cert.primal.len());
    let mut coverage = vec![Rational::zero(); n];
    for (index, entry) in cert.primal.iter().enumerate() {
        let sorted = entry.set.windows(2).all(|w| w[0] < w[1]);
        if entry.set.is_empty() || !sorted || entry.set.iter().any(|&v| v >= n) {
            return Err(CertificateDefect::MalformedSet { index });
        }
        let set = VertexSet::from_vertices(n, entry.set.iter().copied());
        if !g.is_independent(&set) {
            return Err(CertificateDefect::NotIndependent { index });
        }
        if !entry.weight.is_positive() {
            return Err(CertificateDefect::NonPositiveWeight { index });
        }
        if let Some(first) = sets.iter().position(|s| *s == set) {
            return Err(CertificateDefect::DuplicateSet {
                first,
                second: index,
            });
        }
        for v in &set {
            coverage[v] += &entry.weight;
        }
        sets.push(set);
    }
    if let Some(vertex) = coverage.iter().position(|c| *c < Rational::one()) {
        return Err(CertificateDefect::CoverageViolated { vertex });
    }
    let primal_total: Rational = cert.primal.iter().map(|p| &p.weight).sum();
    if primal_total != cert.value {
        return Err(CertificateDefect::PrimalValueMismatch);
    }
    let (best, set) = invariants::alpha_weighted(g, &cert.dual).expect("length checked above");
    if best > Rational::one() {
        return Err(CertificateDefect::DualInfeasible { set: set.to_vec() });
    }
    if best * &cert.value != dual_total {
        return Err(CertificateDefect::NotTight);
    }
    Ok(())
}

/// Maximum-weight independent set (smallest mask among the optimal ones).
pub fn max_weight_independent_set(g: &Graph, w: &WeightFn) -> Result<(VertexSet, Rational), InvariantError> {
    invariants::alpha_weighted(g, w).map(|(value, set)| (set, value))
}

/// Lower bound for compositions: `χ_f(H) · min χ_f(G_i) ≤ χ_f(H{G_i})`,
/// plus the product dual `y_{(i,j)} = w^H_i · w^i_j` built from optimal
/// duals of host and parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FracProdCheck {
    #[serde(with = "crate::rational")]
    pub lhs: Rational,
    #[serde(with = "crate::rational")]
    pub rhs: Rational,
    pub inequality_holds: bool,
    #[serde(with = "crate::rational")]
    pub product_dual_value: Rational,
    /// Every independent set of the composition has product-dual weight ≤ 1.
    pub product_dual_feasible: bool,
    /// Feasible, and its value is at least `lhs`.
    pub product_dual_ok: bool,
    pub ok: bool,
}

fn composition_values(
    host: &Graph,
    parts: &[Graph],
    opts: &LpOptions,
) -> Result<(FractionalCertificate, Vec<FractionalCertificate>, Graph, FractionalCertificate), LpError> {
    let composed = construct::compose(host, parts)?;
    guard(&composed, opts.max_n)?;
    let h = chi_f_with(host, opts)?.certificate;
    let ps = parts
        .iter()
        .map(|p| chi_f_with(p, opts).map(|s| s.certificate))
        .collect::<Result<Vec<_>, _>>()?;
    let whole = chi_f_with(&composed, opts)?.certificate;
    Ok((h, ps, composed, whole))
}

pub fn check_fracprod(host: &Graph, parts: &[Graph]) -> Result<FracProdCheck, LpError> {
    check_fracprod_with(host, parts, &LpOptions::default())
}

pub fn check_fracprod_with(host: &Graph, parts: &[Graph], opts: &LpOptions) -> Result<FracProdCheck, LpError> {
    let (h, ps, composed, whole) = composition_values(host, parts, opts)?;
    let min_part = ps.iter().map(|c| &c.value).min().expect("at least one part").clone();
    let lhs = &h.value * min_part;
    let rhs = whole.value;
    let mut y = Vec::with_capacity(composed.n());
    for (wh, part) in h.dual.weights().iter().zip(&ps) {
        y.extend(part.dual.weights().iter().map(|wj| wh * wj));
    }
    let y = WeightFn::new(y)?;
    let product_dual_value = y.total();
    let (heaviest, _) = invariants::alpha_weighted(&composed, &y)?;
    let product_dual_feasible = heaviest <= Rational::one();
    let product_dual_ok = product_dual_feasible && product_dual_value >= lhs;
    let inequality_holds = lhs <= rhs;
    Ok(FracProdCheck {
        ok: inequality_holds && product_dual_ok,
        lhs,
        rhs,
        inequality_holds,
        product_dual_value,
        product_dual_feasible,
        product_dual_ok,
    })
}

/// Upper bound for compositions: `χ_f(H{G_i}) ≤ χ_f(H) · max χ_f(G_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionUpperCheck {
    #[serde(with = "crate::rational")]
    pub value: Rational,
    #[serde(with = "crate::rational")]
    pub bound: Rational,
    pub ok: bool,
}

pub fn check_composition_upper(host: &Graph, parts: &[Graph]) -> Result<CompositionUpperCheck, LpError> {
    check_composition_upper_with(host, parts, &LpOptions::default())
}

pub fn check_composition_upper_with(
    host: &Graph,
    parts: &[Graph],
    opts: &LpOptions,
) -> Result<CompositionUpperCheck, LpError> {
    let (h, ps, _, whole) = composition_values(host, parts, opts)?;
    let max_part = ps.iter().map(|c| &c.value).max().expect("at least one part").clone();
    let bound = &h.value * max_part;
    Ok(CompositionUpperCheck {
        ok: whole.value <= bound,
        value: whole.value,
        bound,
    })
}
