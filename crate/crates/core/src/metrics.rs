//! Structural and arrangement-dependent quantities of a single tree.

use thiserror::Error;

use crate::tree::{DependencyTree, Edge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("hubiness is undefined for trees with fewer than 4 vertices (n = {0})")]
    HubinessDomain(usize),
}

/// Two vertex-disjoint edges, ordered so that `first.lo() < second.lo()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgePair {
    pub first: Edge,
    pub second: Edge,
}

impl EdgePair {
    /// Returns `None` when the edges share a vertex and so cannot cross.
    pub fn new(a: Edge, b: Edge) -> Option<Self> {
        if a.shares_vertex(b) {
            return None;
        }
        let (first, second) = if a.lo() < b.lo() { (a, b) } else { (b, a) };
        Some(EdgePair { first, second })
    }

    pub fn crosses(&self) -> bool {
        self.first.lo() < self.second.lo()
            && self.second.lo() < self.first.hi()
            && self.first.hi() < self.second.hi()
    }
}

/// Whether two edges interleave on the line. Edges sharing a vertex never cross.
pub fn crosses(a: Edge, b: Edge) -> bool {
    EdgePair::new(a, b).is_some_and(|p| p.crosses())
}

pub fn edge_length(edge: Edge) -> usize {
    edge.length()
}

pub(crate) fn choose2(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependencyLength {
    pub total: u64,
    pub mean_per_edge: f64,
    /// Expected edge length under a uniformly random arrangement, `(n + 1) / 3`.
    pub random_baseline: f64,
}

pub fn total_dependency_length(tree: &DependencyTree) -> DependencyLength {
    let total: u64 = tree.edges().iter().map(|e| e.length() as u64).sum();
    let n = tree.n();
    let mean_per_edge = if n > 1 { total as f64 / (n - 1) as f64 } else { 0.0 };
    DependencyLength {
        total,
        mean_per_edge,
        random_baseline: (n as f64 + 1.0) / 3.0,
    }
}

fn squared_degree_sum(tree: &DependencyTree) -> u64 {
    tree.degrees().into_iter().map(|k| (k * k) as u64).sum()
}

/// Mean of the squared vertex degrees.
pub fn degree_second_moment(tree: &DependencyTree) -> f64 {
    squared_degree_sum(tree) as f64 / tree.n() as f64
}

pub fn k2_linear(n: usize) -> f64 {
    4.0 - 6.0 / n as f64
}

pub fn k2_star(n: usize) -> f64 {
    n as f64 - 1.0
}

/// Degree variance rescaled so that linear trees score 0 and stars score 1.
pub fn hubiness(tree: &DependencyTree) -> Result<f64, MetricsError> {
    let n = tree.n();
    if n < 4 {
        return Err(MetricsError::HubinessDomain(n));
    }
    let lin = k2_linear(n);
    Ok((degree_second_moment(tree) - lin) / (k2_star(n) - lin))
}

/// Size of Q from the degree sequence: `n/2 (<k^2>_star - <k^2>)`, evaluated
/// in integers as `(n(n-1) - sum k^2) / 2`.
pub fn potential_crossings(tree: &DependencyTree) -> u64 {
    let n = tree.n() as u64;
    (n * (n - 1) - squared_degree_sum(tree)) / 2
}

/// All unordered pairs of vertex-disjoint edges, in edge-list order.
pub fn enumerate_q(tree: &DependencyTree) -> Vec<EdgePair> {
    let edges = tree.edges();
    let mut pairs = Vec::with_capacity(potential_crossings(tree) as usize);
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i + 1..] {
            if let Some(pair) = EdgePair::new(a, b) {
                pairs.push(pair);
            }
        }
    }
    pairs
}

/// Number of crossing edge pairs by scanning every pair of edges.
pub fn count_crossings(tree: &DependencyTree) -> u64 {
    let edges = tree.edges();
    let mut count = 0;
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i + 1..] {
            if crosses(a, b) {
                count += 1;
            }
        }
    }
    count
}

/// Same count as [`count_crossings`] in `O(m log m)`.
///
/// Sweeps edges by left endpoint; a crossing `l1 < l2 < r1 < r2` is charged to
/// the later edge, which counts earlier edges whose right endpoint lies
/// strictly inside `(l2, r2)`.
pub fn count_crossings_fast(tree: &DependencyTree) -> u64 {
    let n = tree.n();
    let mut edges: Vec<Edge> = tree.edges().to_vec();
    edges.sort_unstable();
    let mut fenwick = Fenwick::new(n);
    let mut count = 0u64;
    let mut i = 0;
    while i < edges.len() {
        let lo = edges[i].lo();
        let mut j = i;
        while j < edges.len() && edges[j].lo() == lo {
            let hi = edges[j].hi();
            count += fenwick.prefix(hi - 1) - fenwick.prefix(lo);
            j += 1;
        }
        for e in &edges[i..j] {
            fenwick.add(e.hi());
        }
        i = j;
    }
    count
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn add(&mut self, mut i: usize) {
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingBounds {
    /// Pairs of distinct edges, `(n-1 choose 2)`.
    pub naive: u64,
    /// `(n-2 choose 2)`, attained by some arrangement of the linear tree.
    pub tight: u64,
}

pub fn crossing_bounds(n: usize) -> CrossingBounds {
    CrossingBounds {
        naive: choose2(n.saturating_sub(1)),
        tight: choose2(n.saturating_sub(2)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralMetrics {
    pub n: usize,
    pub total_length: u64,
    pub k2_mean: f64,
    /// `None` below four vertices.
    pub hubiness: Option<f64>,
    pub q_size: u64,
    pub c_true: u64,
    pub bounds: CrossingBounds,
}

impl StructuralMetrics {
    pub fn compute(tree: &DependencyTree) -> Self {
        StructuralMetrics {
            n: tree.n(),
            total_length: total_dependency_length(tree).total,
            k2_mean: degree_second_moment(tree),
            hubiness: hubiness(tree).ok(),
            q_size: potential_crossings(tree),
            c_true: count_crossings(tree),
            bounds: crossing_bounds(tree.n()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> DependencyTree {
        // edges {1,3}, {3,2}, {2,4}
        DependencyTree::from_heads(vec![3, 3, 0, 2]).unwrap()
    }

    #[test]
    fn edge_lengths() {
        assert_eq!(edge_length(Edge::new(1, 2)), 1);
        assert_eq!(edge_length(Edge::new(2, 4)), 2);
        assert_eq!(edge_length(Edge::new(9, 1)), 8);
    }

    #[test]
    fn dependency_length() {
        assert_eq!(total_dependency_length(&DependencyTree::linear(4)).total, 3);
        let d = total_dependency_length(&worked());
        assert_eq!(d.total, 5);
        assert!((d.mean_per_edge - 5.0 / 3.0).abs() < 1e-15);
        assert!((d.random_baseline - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(total_dependency_length(&DependencyTree::star(4, 1)).total, 6);
    }

    #[test]
    fn second_moment() {
        assert_eq!(degree_second_moment(&DependencyTree::star(5, 2)), 4.0);
        assert_eq!(degree_second_moment(&DependencyTree::linear(6)), 3.0);
        assert_eq!(degree_second_moment(&worked()), 2.5);
    }

    #[test]
    fn hubiness_extremes() {
        for n in 4..12 {
            assert!(hubiness(&DependencyTree::linear(n)).unwrap().abs() < 1e-12);
            assert!((hubiness(&DependencyTree::star(n, 1)).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(hubiness(&worked()).unwrap(), 0.0);
        assert_eq!(hubiness(&DependencyTree::linear(3)), Err(MetricsError::HubinessDomain(3)));
    }

    #[test]
    fn q_size() {
        assert_eq!(potential_crossings(&worked()), 1);
        assert_eq!(potential_crossings(&DependencyTree::linear(6)), 6);
        assert_eq!(potential_crossings(&DependencyTree::star(5, 3)), 0);
    }

    #[test]
    fn q_enumeration() {
        let q = enumerate_q(&worked());
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].first, Edge::new(1, 3));
        assert_eq!(q[0].second, Edge::new(2, 4));
        assert!(enumerate_q(&DependencyTree::star(6, 4)).is_empty());
        assert_eq!(enumerate_q(&DependencyTree::linear(5)).len(), 3);
    }

    #[test]
    fn crossings() {
        assert_eq!(count_crossings(&worked()), 1);
        assert_eq!(count_crossings(&DependencyTree::linear(4)), 0);
        let zigzag = DependencyTree::linear(6).rearranged(&[1, 4, 2, 5, 3, 6]).unwrap();
        assert_eq!(count_crossings(&zigzag), 6);
        assert_eq!(count_crossings_fast(&zigzag), 6);
        assert_eq!(count_crossings_fast(&worked()), 1);
    }

    #[test]
    fn crossing_is_symmetric_and_excludes_shared_vertices() {
        let a = Edge::new(1, 3);
        let b = Edge::new(2, 4);
        assert!(crosses(a, b) && crosses(b, a));
        assert!(!crosses(Edge::new(1, 3), Edge::new(3, 5)));
        assert!(!crosses(Edge::new(1, 4), Edge::new(2, 3)));
    }

    #[test]
    fn bounds() {
        assert_eq!(crossing_bounds(4), CrossingBounds { naive: 3, tight: 1 });
        assert_eq!(crossing_bounds(6), CrossingBounds { naive: 10, tight: 6 });
        assert_eq!(crossing_bounds(10), CrossingBounds { naive: 36, tight: 28 });
    }
}
