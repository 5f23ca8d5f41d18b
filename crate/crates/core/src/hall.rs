//! Hall ratio `ρ(G) = max |X| / α(G[X])` over nonempty vertex sets, by one
//! sweep of a subset table of independence numbers, and the χ_f/ρ gap
//! report.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::fraclp::{self, LpError, LpOptions};
use crate::graph::Graph;
use crate::invariants;
use crate::rational::{self, Rational};
use crate::rng;
use crate::vertex_set::VertexSet;

/// Default vertex cap for the exact sweep: the table takes `2^n` bytes.
pub const DEFAULT_HALL_CAP: usize = 26;
/// Absolute ceiling on the cap (masks are `u64` and tables are in memory).
pub const MAX_HALL_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HallOptions {
    pub cap: usize,
    /// Only connected induced subgraphs compete for the maximum. The value
    /// is the same; the witness may differ.
    pub connected_only: bool,
}

impl Default for HallOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_HALL_CAP,
            connected_only: false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HallError {
    #[error("the Hall ratio needs at least one vertex")]
    Empty,
    #[error("graph has {n} vertices, above the exact cap {cap}; use hall_ratio_lower_bound instead")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HallResult {
    #[serde(with = "crate::rational")]
    pub value: Rational,
    #[serde(serialize_with = "serialize_set")]
    pub witness: VertexSet,
    pub alpha_of_witness: usize,
}

fn serialize_set<S: serde::Serializer>(set: &VertexSet, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(set.iter())
}

/// `α(G[S])` for every mask `S`, from `α(S) = max(α(S - v), 1 + α(S - N[v]))`
/// with `v` the highest vertex of `S`.
pub fn subset_alpha_table(g: &Graph) -> Vec<u8> {
    let n = g.n();
    assert!(n <= MAX_HALL_CAP, "subset table limited to {MAX_HALL_CAP} vertices");
    let closed: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).to_mask().expect("n <= 64") | 1 << v)
        .collect();
    let mut table = vec![0u8; 1 << n];
    for s in 1..table.len() {
        let v = 63 - (s as u64).leading_zeros() as usize;
        let without = table[s & !(1 << v)];
        let with = 1 + table[s & !(closed[v] as usize)];
        table[s] = without.max(with);
    }
    table
}

fn is_connected_mask(adj: &[u64], s: u64) -> bool {
    let mut seen = s & s.wrapping_neg();
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        next &= s & !seen;
        seen |= next;
        frontier = next;
    }
    seen == s
}

/// Exact `ρ(G)` with the default cap.
pub fn hall_ratio(g: &Graph) -> Result<HallResult, HallError> {
    hall_ratio_with(g, &HallOptions::default())
}

/// Among maximizing sets the witness has the fewest vertices, then the
/// smallest mask.
pub fn hall_ratio_with(g: &Graph, opts: &HallOptions) -> Result<HallResult, HallError> {
    let n = g.n();
    if n == 0 {
        return Err(HallError::Empty);
    }
    let cap = opts.cap.min(MAX_HALL_CAP);
    if n > cap {
        return Err(HallError::TooLarge { n, cap });
    }
    let table = subset_alpha_table(g);
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).to_mask().expect("n <= 64")).collect();
    // best = (|X|, α(X), mask)
    let mut best: (u64, u64, u64) = (0, 1, 0);
    for s in 1..table.len() as u64 {
        let size = u64::from(s.count_ones());
        let a = u64::from(table[s as usize]);
        // size/a against best.0/best.1
        let lhs = size * best.1;
        let rhs = best.0 * a;
        let improves = lhs > rhs || (lhs == rhs && size < best.0);
        if improves && (!opts.connected_only || is_connected_mask(&adj, s)) {
            best = (size, a, s);
        }
    }
    let (size, a, mask) = best;
    Ok(HallResult {
        value: Rational::new(size.into(), a.into()),
        witness: VertexSet::from_mask(n, mask),
        alpha_of_witness: a as usize,
    })
}

fn ratio_of(g: &Graph, set: &VertexSet) -> Option<(Rational, usize)> {
    if set.is_empty() {
        return None;
    }
    let a = invariants::alpha_value(&g.induced(set).expect("nonempty"));
    Some((rational::from_usize(set.len()) / rational::from_usize(a), a))
}

/// A lower bound on `ρ(G)` for any size: the best of the whole vertex set,
/// each component, and `samples` seeded random subsets (uniform size, then
/// a uniform subset of that size).
pub fn hall_ratio_lower_bound(g: &Graph, samples: usize, seed: u64) -> HallResult {
    let n = g.n();
    let mut best: Option<HallResult> = None;
    let mut consider = |set: VertexSet| {
        if let Some((value, a)) = ratio_of(g, &set) {
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(HallResult {
                    value,
                    witness: set,
                    alpha_of_witness: a,
                });
            }
        }
    };
    consider(g.vertex_set());
    for comp in g.components() {
        consider(comp);
    }
    if n > 0 {
        let mut rng = rng::rng_from_seed(seed);
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..samples {
            let k = 1 + rng::below(&mut rng, n as u64) as usize;
            for i in 0..k {
                let j = i + rng::below(&mut rng, (n - i) as u64) as usize;
                pool.swap(i, j);
            }
            consider(VertexSet::from_vertices(n, pool[..k].iter().copied()));
        }
    }
    best.unwrap_or(HallResult {
        value: Rational::zero(),
        witness: VertexSet::empty(0),
        alpha_of_witness: 0,
    })
}

/// `χ_f` against `ρ` on one graph, with the averaging chain
/// `n/α ≤ ρ ≤ χ_f ≤ χ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub alpha: usize,
    #[serde(with = "crate::rational")]
    pub n_over_alpha: Rational,
    #[serde(with = "crate::rational")]
    pub rho: Rational,
    pub rho_witness: Vec<usize>,
    #[serde(with = "crate::rational")]
    pub chi_f: Rational,
    pub chi: usize,
    #[serde(with = "crate::rational")]
    pub ratio: Rational,
    pub chain_ok: bool,
}

pub fn gap_report(g: &Graph) -> Result<GapReport, HallError> {
    gap_report_with(g, &HallOptions::default(), &LpOptions::default())
}

pub fn gap_report_with(g: &Graph, hall: &HallOptions, lp: &LpOptions) -> Result<GapReport, HallError> {
    let rho = hall_ratio_with(g, hall)?;
    let cert = fraclp::chi_f_with(g, lp)?.certificate;
    let alpha = invariants::alpha_value(g);
    let (chi, _) = invariants::chromatic_number(g);
    let n_over_alpha = rational::from_usize(g.n()) / rational::from_usize(alpha);
    let chi_r = rational::from_usize(chi);
    let chain_ok = n_over_alpha <= rho.value && rho.value <= cert.value && cert.value <= chi_r;
    let ratio = &cert.value / &rho.value;
    Ok(GapReport {
        n: g.n(),
        alpha,
        n_over_alpha,
        rho_witness: rho.witness.to_vec(),
        rho: rho.value,
        chi_f: cert.value,
        chi,
        ratio,
        chain_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{join, join_many, random_graph};
    use crate::rational::{int, rat};

    fn c(n: usize) -> Graph {
        Graph::cycle(n).unwrap()
    }

    /// Exhaustive ρ: every nonempty subset, α by branch and bound on the
    /// induced subgraph, same tie-break.
    fn brute_force(g: &Graph) -> (Rational, u64) {
        let n = g.n();
        let mut best: Option<(Rational, u32, u64)> = None;
        for m in 1u64..1 << n {
            let s = VertexSet::from_mask(n, m);
            let a = invariants::alpha_value(&g.induced(&s).unwrap());
            let r = Rational::new((s.len() as i64).into(), (a as i64).into());
            let better = match &best {
                None => true,
                Some((br, bs, _)) => r > *br || (r == *br && m.count_ones() < *bs),
            };
            if better {
                best = Some((r, m.count_ones(), m));
            }
        }
        let (r, _, m) = best.unwrap();
        (r, m)
    }

    #[test]
    fn c5_and_complete() {
        let r = hall_ratio(&c(5)).unwrap();
        assert_eq!(r.value, rat(5, 2));
        assert_eq!(r.witness.to_vec(), vec![0, 1, 2, 3, 4]);
        assert_eq!(r.alpha_of_witness, 2);
        for n in 1..=7 {
            let r = hall_ratio(&Graph::complete(n)).unwrap();
            assert_eq!(r.value, rational::from_usize(n));
            assert_eq!(r.witness.len(), n);
        }
    }

    /// In a join the independence number is the larger of the two sides', so
    /// all of C5 plus a four-vertex path of C7 (α = 2) beats the full set.
    #[test]
    fn join_of_cycles() {
        let g = join(&c(5), &c(7));
        let r = hall_ratio(&g).unwrap();
        assert_eq!(r.value, rat(9, 2));
        assert_eq!(r.witness.to_vec(), (0..9).collect::<Vec<_>>());
        assert_eq!(brute_force(&g), (rat(9, 2), 0x1FF));
        let full = g.vertex_set();
        assert_eq!(invariants::alpha_value(&g.induced(&full).unwrap()), 3);
    }

    #[test]
    fn empty_and_cap() {
        assert_eq!(hall_ratio(&Graph::empty(0)), Err(HallError::Empty));
        assert_eq!(hall_ratio(&Graph::empty(1)).unwrap().value, int(1));
        assert_eq!(
            hall_ratio_with(&Graph::empty(12), &HallOptions { cap: 10, connected_only: false }),
            Err(HallError::TooLarge { n: 12, cap: 10 })
        );
    }

    #[test]
    fn lower_bound_examples() {
        let lb = hall_ratio_lower_bound(&c(5), 0, 1);
        assert!(lb.value >= rat(5, 2));
        let k = Graph::kneser(7, 3).unwrap();
        assert_eq!(invariants::alpha_value(&k), 15);
        assert!(hall_ratio_lower_bound(&k, 50, 3).value >= rat(7, 3));
        for seed in 0..20 {
            let g = random_graph(11, &rat(1, 2), seed).unwrap();
            assert!(hall_ratio_lower_bound(&g, 30, seed).value <= hall_ratio(&g).unwrap().value);
        }
    }

    #[test]
    fn gap_examples() {
        let r = gap_report(&join(&c(5), &c(7))).unwrap();
        assert_eq!((r.rho.clone(), r.chi_f.clone(), r.ratio.clone()), (rat(9, 2), rat(29, 6), rat(29, 27)));
        assert!(r.chain_ok);
        assert_eq!(r.chi, 6);
        for n in 1..=6 {
            let r = gap_report(&Graph::complete(n)).unwrap();
            assert_eq!(r.ratio, int(1));
        }
        let json = serde_json::to_string(&gap_report(&c(5)).unwrap()).unwrap();
        assert!(json.contains(r#""rho":{"num":"5","den":"2"}"#), "{json}");
    }

    #[test]
    fn triple_join() {
        let g = join_many(&[c(5), c(7), c(11)]).unwrap();
        let r = gap_report(&g).unwrap();
        assert_eq!(r.chi_f, rat(211, 30));
        // best: C5 whole, P4 of C7, P4 of C11, all with α = 2
        assert_eq!(r.rho, rat(13, 2));
        assert_eq!(r.ratio, rat(211, 195));
        assert!(r.chain_ok);
    }

    #[test]
    fn dp_matches_branch_and_bound_on_every_subset() {
        for seed in 0..50 {
            let n = 4 + (seed as usize % 9);
            let g = random_graph(n, &rat(1 + (seed as i64 % 3), 4), seed).unwrap();
            let table = subset_alpha_table(&g);
            for m in 1u64..1 << n {
                let s = VertexSet::from_mask(n, m);
                assert_eq!(
                    usize::from(table[m as usize]),
                    invariants::alpha_value(&g.induced(&s).unwrap())
                );
            }
        }
    }

    #[test]
    fn connected_pruning_keeps_value() {
        for seed in 0..50 {
            let n = 6 + (seed as usize % 9);
            let g = random_graph(n, &rat(1 + (seed as i64 % 3), 5), seed + 1000).unwrap();
            let plain = hall_ratio(&g).unwrap();
            let conn = hall_ratio_with(&g, &HallOptions { connected_only: true, ..Default::default() }).unwrap();
            assert_eq!(plain.value, conn.value);
            assert!(g.induced(&conn.witness).unwrap().is_connected());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
            (1..=max_n, any::<u64>(), 0i64..=4).prop_map(|(n, seed, q)| random_graph(n, &rat(q, 4), seed).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn matches_brute_force(g in arb_graph(10)) {
                let r = hall_ratio(&g).unwrap();
                let (value, mask) = brute_force(&g);
                prop_assert_eq!(&r.value, &value);
                prop_assert_eq!(r.witness.to_mask(), Some(mask));
                prop_assert_eq!(
                    r.value.clone(),
                    rational::from_usize(r.witness.len()) / rational::from_usize(r.alpha_of_witness)
                );
            }

            #[test]
            fn bounds(g in arb_graph(12)) {
                let r = hall_ratio(&g).unwrap().value;
                let a = invariants::alpha_value(&g);
                prop_assert!(rational::from_usize(g.n()) / rational::from_usize(a) <= r);
                prop_assert!(rational::from_usize(invariants::clique_number(&g).0) <= r);
                prop_assert!(r <= fraclp::chi_f(&g).unwrap().value);
            }

            #[test]
            fn induced_monotone(g in arb_graph(12), mask in any::<u64>()) {
                let s = VertexSet::from_mask(g.n(), mask);
                prop_assume!(!s.is_empty());
                let sub = g.induced(&s).unwrap();
                prop_assert!(hall_ratio(&sub).unwrap().value <= hall_ratio(&g).unwrap().value);
            }
        }
    }
}
