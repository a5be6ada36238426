//! Rooted dependency trees over a linear arrangement.
//!
//! Vertices are identified by their position `1..=n` in the sentence. The
//! head of the root vertex is the virtual root `0`. All arrangement-dependent
//! quantities (edge lengths, crossings) are read directly from positions.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no vertices")]
    Empty,
    #[error("vertex {vertex} has head {head} outside 0..={n}")]
    HeadOutOfRange { vertex: usize, head: usize, n: usize },
    #[error("vertex {0} is its own head")]
    SelfLoop(usize),
    #[error("expected exactly one root-attached vertex, found {0}")]
    RootCount(usize),
    #[error("head assignment contains a cycle through vertex {0}")]
    Cycle(usize),
    #[error("edge list does not describe a tree on {0} vertices")]
    NotSpanning(usize),
    #[error("arrangement is not a permutation of 1..={0}")]
    BadArrangement(usize),
}

/// An undirected edge between two positions, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    lo: usize,
    hi: usize,
}

impl Edge {
    /// Panics if `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        Edge {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    pub fn length(self) -> usize {
        self.hi - self.lo
    }

    pub fn shares_vertex(self, other: Edge) -> bool {
        self.lo == other.lo || self.lo == other.hi || self.hi == other.lo || self.hi == other.hi
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyTree {
    heads: Vec<usize>,
    edges: Vec<Edge>,
}

impl DependencyTree {
    /// Builds a tree from a head vector: `heads[i]` is the head of the vertex
    /// at position `i + 1`, with `0` for the root.
    pub fn from_heads(heads: Vec<usize>) -> Result<Self, TreeError> {
        let n = heads.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut roots = 0;
        for (i, &h) in heads.iter().enumerate() {
            let v = i + 1;
            if h > n {
                return Err(TreeError::HeadOutOfRange { vertex: v, head: h, n });
            }
            if h == v {
                return Err(TreeError::SelfLoop(v));
            }
            if h == 0 {
                roots += 1;
            }
        }
        if roots != 1 {
            return Err(TreeError::RootCount(roots));
        }

        // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        let mut walk = Vec::new();
        for start in 1..=n {
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                v = heads[v - 1];
            }
            if state[v] == 1 {
                return Err(TreeError::Cycle(v));
            }
            for u in walk.drain(..) {
                state[u] = 2;
            }
        }

        let edges = heads
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0)
            .map(|(i, &h)| Edge::new(i + 1, h))
            .collect();
        Ok(DependencyTree { heads, edges })
    }

    /// Orients an undirected edge list away from `root`.
    pub fn from_undirected(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if edges.len() + 1 != n || root == 0 || root > n {
            return Err(TreeError::NotSpanning(n));
        }
        let mut adjacency = vec![Vec::new(); n + 1];
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(TreeError::NotSpanning(n));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut heads = vec![usize::MAX; n];
        heads[root - 1] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in &adjacency[v] {
                if u != root && heads[u - 1] == usize::MAX {
                    heads[u - 1] = v;
                    queue.push_back(u);
                }
            }
        }
        if heads.contains(&usize::MAX) {
            return Err(TreeError::NotSpanning(n));
        }
        Self::from_heads(heads)
    }

    /// The path `1 - 2 - ... - n` in its natural order, rooted at `1`.
    pub fn linear(n: usize) -> Self {
        let heads = (0..n).collect();
        Self::from_heads(heads).expect("path heads are a tree")
    }

    /// Star with its hub at position `hub`.
    pub fn star(n: usize, hub: usize) -> Self {
        let heads = (1..=n).map(|v| if v == hub { 0 } else { hub }).collect();
        Self::from_heads(heads).expect("star heads are a tree")
    }

    pub fn n(&self) -> usize {
        self.heads.len()
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn head(&self, position: usize) -> usize {
        self.heads[position - 1]
    }

    pub fn root(&self) -> usize {
        self.heads.iter().position(|&h| h == 0).unwrap() + 1
    }

    /// Edges in order of their dependent position.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `degrees()[v - 1]` is the degree of the vertex at position `v`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0; self.n()];
        for e in &self.edges {
            degrees[e.lo - 1] += 1;
            degrees[e.hi - 1] += 1;
        }
        degrees
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Some vertex is adjacent to all others. Every tree with `n <= 3` is a star.
    pub fn is_star(&self) -> bool {
        self.max_degree() + 1 == self.n()
    }

    /// No vertex has degree above two.
    pub fn is_linear(&self) -> bool {
        self.degrees().into_iter().all(|k| k <= 2)
    }

    /// Moves the vertex at position `v` to position `arrangement[v - 1]`,
    /// keeping head relations intact.
    pub fn rearranged(&self, arrangement: &[usize]) -> Result<Self, TreeError> {
        let n = self.n();
        if arrangement.len() != n {
            return Err(TreeError::BadArrangement(n));
        }
        let mut seen = vec![false; n + 1];
        for &p in arrangement {
            if p == 0 || p > n || seen[p] {
                return Err(TreeError::BadArrangement(n));
            }
            seen[p] = true;
        }
        let mut heads = vec![0; n];
        for (i, &h) in self.heads.iter().enumerate() {
            heads[arrangement[i] - 1] = if h == 0 { 0 } else { arrangement[h - 1] };
        }
        Self::from_heads(heads)
    }

    /// Mirror image of the arrangement: position `i` becomes `n + 1 - i`.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        let mirror: Vec<usize> = (1..=n).map(|i| n + 1 - i).collect();
        self.rearranged(&mirror).expect("mirror is a permutation")
    }
}
