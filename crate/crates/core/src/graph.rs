//! Immutable simple undirected graphs over dense vertex indices.

use std::fmt;

use thiserror::Error;

use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },
    #[error("loop edge at vertex {0}")]
    Loop(usize),
    #[error("vertex subset must be nonempty")]
    EmptySubset,
    #[error("vertex subset has capacity {got}, graph has {n} vertices")]
    SubsetCapacity { got: usize, n: usize },
    #[error("expected {n} labels, got {got}")]
    LabelCount { n: usize, got: usize },
    #[error("invalid parameters for {family}: {detail}")]
    Family { family: &'static str, detail: String },
}

/// A finite simple graph on `0..n`. Adjacency is stored as one bitset row
/// per vertex; the relation is symmetric and irreflexive by construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<VertexSet>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate and reversed pairs
    /// collapse to a single edge; loops are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows = vec![VertexSet::empty(n); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::EndpointOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            rows[u].insert(v);
            rows[v].insert(u);
        }
        Ok(Self {
            n,
            rows,
            labels: None,
        })
    }

    /// Builds a graph from adjacency rows. The caller guarantees symmetry
    /// and an empty diagonal; checked in debug builds.
    pub(crate) fn from_rows(rows: Vec<VertexSet>) -> Self {
        let n = rows.len();
        debug_assert!(rows.iter().enumerate().all(|(u, r)| {
            r.capacity() == n && !r.contains(u) && r.iter().all(|v| rows[v].contains(u))
        }));
        Self {
            n,
            rows,
            labels: None,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_rows(vec![VertexSet::empty(n); n])
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n)
            .map(|u| {
                let mut r = VertexSet::full(n);
                r.remove(u);
                r
            })
            .collect();
        Self::from_rows(rows)
    }

    /// The cycle `0-1-..-(n-1)-0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::Family {
                family: "cycle",
                detail: format!("needs at least 3 vertices, got {n}"),
            });
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are in range")
    }

    /// Kneser graph: vertices are the `k`-subsets of `0..n` in colexicographic
    /// order of their bitmask, adjacent when disjoint.
    pub fn kneser(n: usize, k: usize) -> Result<Self, GraphError> {
        if k == 0 || n > 63 || k > n {
            return Err(GraphError::Family {
                family: "kneser",
                detail: format!("need 1 <= k <= n <= 63, got n={n}, k={k}"),
            });
        }
        let subsets: Vec<u64> = (0u64..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .collect();
        let count = subsets.len();
        let mut edges = Vec::new();
        for i in 0..count {
            for j in i + 1..count {
                if subsets[i] & subsets[j] == 0 {
                    edges.push((i, j));
                }
            }
        }
        let labels = subsets
            .iter()
            .map(|m| {
                let members: Vec<String> = (0..n)
                    .filter(|b| m >> b & 1 == 1)
                    .map(|b| b.to_string())
                    .collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        Self::new(count, edges)?.with_labels(labels)
    }

    /// The Petersen graph as Kneser(5, 2).
    pub fn petersen() -> Self {
        Self::kneser(5, 2).expect("valid parameters")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::LabelCount {
                n: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.rows[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.rows[u].contains(v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Degrees sorted in non-increasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn is_independent(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| !self.rows[v].intersects(set))
    }

    pub fn is_clique(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| {
            let mut others = set.clone();
            others.remove(v);
            others.is_subset(&self.rows[v])
        })
    }

    /// The subgraph induced by `subset`, relabelled `0..|subset|` in
    /// ascending order of the original indices. Labels are carried along.
    pub fn induced(&self, subset: &VertexSet) -> Result<Graph, GraphError> {
        if subset.capacity() != self.n {
            return Err(GraphError::SubsetCapacity {
                got: subset.capacity(),
                n: self.n,
            });
        }
        if subset.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        let old: Vec<usize> = subset.to_vec();
        let k = old.len();
        let rows = old
            .iter()
            .map(|&u| {
                let mut r = VertexSet::empty(k);
                for (i, &w) in old.iter().enumerate() {
                    if self.rows[u].contains(w) {
                        r.insert(i);
                    }
                }
                r
            })
            .collect();
        let mut g = Graph::from_rows(rows);
        g.labels = self
            .labels
            .as_ref()
            .map(|ls| old.iter().map(|&u| ls[u].clone()).collect());
        Ok(g)
    }

    pub fn complement(&self) -> Graph {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(u, r)| {
                let mut c = r.complement();
                c.remove(u);
                c
            })
            .collect();
        Graph {
            n: self.n,
            rows,
            labels: self.labels.clone(),
        }
    }

    /// Number of triangles.
    pub fn triangle_count(&self) -> usize {
        let mut count = 0;
        for (u, v) in self.edges() {
            // common neighbours above v, so each triangle u<v<w counts once
            count += self.rows[u]
                .intersection(&self.rows[v])
                .iter()
                .filter(|&w| w > v)
                .count();
        }
        count
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges()
            .all(|(u, v)| !self.rows[u].intersects(&self.rows[v]))
    }

    /// Connected components, each ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        components_within(&self.rows, &VertexSet::full(self.n))
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// Returns a copy with vertices permuted: old vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::LabelCount {
                n: self.n,
                got: perm.len(),
            });
        }
        let mut seen = VertexSet::empty(self.n);
        for &p in perm {
            if p >= self.n {
                return Err(GraphError::EndpointOutOfRange { vertex: p, n: self.n });
            }
            seen.insert(p);
        }
        if seen.len() != self.n {
            return Err(GraphError::Family {
                family: "relabel",
                detail: "permutation has repeated entries".into(),
            });
        }
        let mut g = Graph::new(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))?;
        if let Some(ls) = &self.labels {
            let mut out = vec![String::new(); self.n];
            for (v, l) in ls.iter().enumerate() {
                out[perm[v]] = l.clone();
            }
            g.labels = Some(out);
        }
        Ok(g)
    }

    /// True when both graphs have the same vertex count and edge set;
    /// labels are ignored.
    pub fn same_adjacency(&self, other: &Graph) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

/// Connected components of the subgraph induced by `within`, where
/// `rows` are adjacency rows of the ambient graph.
pub(crate) fn components_within(rows: &[VertexSet], within: &VertexSet) -> Vec<VertexSet> {
    let mut remaining = within.clone();
    let mut out = Vec::new();
    while let Some(start) = remaining.first() {
        let mut comp = VertexSet::empty(within.capacity());
        comp.insert(start);
        let mut frontier = comp.clone();
        while !frontier.is_empty() {
            let mut next = VertexSet::empty(within.capacity());
            for v in &frontier {
                next.union_with(&rows[v]);
            }
            next.intersect_with(within);
            next.difference_with(&comp);
            comp.union_with(&next);
            frontier = next;
        }
        remaining.difference_with(&comp);
        out.push(comp);
    }
    out
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen_by_hand() -> Graph {
        // outer 5-cycle, inner pentagram, spokes
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((5 + i, 5 + (i + 2) % 5));
            e.push((i, i + 5));
        }
        Graph::new(10, e).unwrap()
    }

    #[test]
    fn new_graph_examples() {
        let k3 = Graph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert!(k3.same_adjacency(&Graph::complete(3)));
        assert_eq!(Graph::new(4, []).unwrap().edge_count(), 0);
        assert_eq!(Graph::new(2, [(0, 1), (1, 0)]).unwrap().edge_count(), 1);
    }

    #[test]
    fn new_graph_errors() {
        assert_eq!(
            Graph::new(3, [(0, 3)]),
            Err(GraphError::EndpointOutOfRange { vertex: 3, n: 3 })
        );
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::Loop(1)));
    }

    #[test]
    fn induced_examples() {
        let c5 = Graph::cycle(5).unwrap();
        let p3 = c5.induced(&VertexSet::from_vertices(5, [0, 1, 2])).unwrap();
        assert!(p3.same_adjacency(&Graph::path(3)));
        let k4 = Graph::complete(4);
        let k2 = k4.induced(&VertexSet::from_vertices(4, [1, 3])).unwrap();
        assert!(k2.same_adjacency(&Graph::complete(2)));
        let two = c5.induced(&VertexSet::from_vertices(5, [0, 2])).unwrap();
        assert!(two.same_adjacency(&Graph::empty(2)));
        assert_eq!(
            c5.induced(&VertexSet::empty(5)),
            Err(GraphError::EmptySubset)
        );
        assert!(c5.induced(&c5.vertex_set()).unwrap().same_adjacency(&c5));
    }

    #[test]
    fn complement_examples() {
        assert!(Graph::complete(3).complement().same_adjacency(&Graph::empty(3)));
        assert!(Graph::empty(4).complement().same_adjacency(&Graph::complete(4)));
        // C5 complement is the pentagram 0-2-4-1-3-0; relabelling
        // 0->0, 2->1, 4->2, 1->3, 3->4 maps it onto the cycle.
        let c5 = Graph::cycle(5).unwrap();
        let comp = c5.complement();
        assert_eq!(comp.edge_count(), 5);
        assert_eq!(comp.degree_sequence(), vec![2; 5]);
        let perm = [0, 3, 1, 4, 2];
        assert!(comp.relabel(&perm).unwrap().same_adjacency(&c5));
    }

    #[test]
    fn triangle_free_examples() {
        assert!(Graph::cycle(5).unwrap().is_triangle_free());
        assert!(!Graph::complete(3).is_triangle_free());
        // brute force over all vertex triples of Petersen
        let p = petersen_by_hand();
        let mut triangles = 0;
        for a in 0..10 {
            for b in a + 1..10 {
                for c in b + 1..10 {
                    if p.has_edge(a, b) && p.has_edge(b, c) && p.has_edge(a, c) {
                        triangles += 1;
                    }
                }
            }
        }
        assert_eq!(triangles, 0);
        assert!(p.is_triangle_free());
        assert!(Graph::petersen().is_triangle_free());
        assert_eq!(Graph::complete(5).triangle_count(), 10);
    }

    #[test]
    fn petersen_family_matches_hand_built() {
        let p = Graph::petersen();
        assert_eq!(p.n(), 10);
        assert_eq!(p.edge_count(), 15);
        assert_eq!(p.degree_sequence(), petersen_by_hand().degree_sequence());
    }

    #[test]
    fn components_examples() {
        let e3 = Graph::empty(3).components();
        assert_eq!(
            e3.iter().map(VertexSet::to_vec).collect::<Vec<_>>(),
            vec![vec![0], vec![1], vec![2]]
        );
        let c5 = Graph::cycle(5).unwrap().components();
        assert_eq!(c5.len(), 1);
        assert_eq!(c5[0].to_vec(), vec![0, 1, 2, 3, 4]);
        let two_k2 = Graph::new(4, [(0, 1), (2, 3)]).unwrap().components();
        assert_eq!(
            two_k2.iter().map(VertexSet::to_vec).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![2, 3]]
        );
    }

    #[test]
    fn family_errors() {
        assert!(Graph::cycle(2).is_err());
        assert!(Graph::kneser(3, 0).is_err());
    }
}
