//! Crossing predictors.
//!
//! `E0` assumes every pair of vertex-disjoint edges crosses with probability
//! 1/3. `E2` replaces that constant with the probability that two edges of the
//! observed lengths cross when both are dropped uniformly at random onto the
//! `n` positions without sharing a vertex:
//!
//! ```text
//! p(d1, d2) = |alpha(d1, d2)| / |beta(d1, d2)|
//! ```
//!
//! where `beta` holds the ordered pairs of starting positions `(s1, s2)` that
//! put the edges `{s1, s1 + d1}` and `{s2, s2 + d2}` on four distinct
//! positions, and `alpha` is the subset of those that interleave.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

use crate::metrics::{count_crossings, potential_crossings};
use crate::stats::NeumaierSum;
use crate::tree::DependencyTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictorError {
    #[error("edge length {length} is outside 1..={max} for n = {n}")]
    LengthOutOfRange { n: usize, length: usize, max: usize },
    #[error("edges of lengths {d1} and {d2} cannot be placed disjointly on {n} positions")]
    NoDisjointPlacement { n: usize, d1: usize, d2: usize },
    #[error("probability table is for n = {table} but the tree has n = {tree}")]
    SizeMismatch { table: usize, tree: usize },
    #[error("tree has no pair of vertex-disjoint edges")]
    EmptyQ,
}

/// Sizes of the crossing (`alpha`) and disjoint (`beta`) placement sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placements {
    pub alpha: u64,
    pub beta: u64,
}

impl Placements {
    pub fn probability(&self) -> f64 {
        self.alpha as f64 / self.beta as f64
    }
}

fn check_length(n: usize, d: usize) -> Result<(), PredictorError> {
    if d == 0 || d >= n {
        return Err(PredictorError::LengthOutOfRange {
            n,
            length: d,
            max: n.saturating_sub(1),
        });
    }
    Ok(())
}

/// Number of integers strictly between `lo` and `hi` that also lie in `1..=max`.
fn open_interval_count(lo: i64, hi: i64, max: i64) -> u64 {
    let from = (lo + 1).max(1);
    let to = (hi - 1).min(max);
    if to >= from {
        (to - from + 1) as u64
    } else {
        0
    }
}

/// Counts ordered placements of two edges of lengths `d1`, `d2` on `n` positions.
///
/// The first edge's start is enumerated; the second edge's admissible and
/// crossing starts are counted by interval arithmetic, so the cost is `O(n)`.
pub fn pair_placements(n: usize, d1: usize, d2: usize) -> Result<Placements, PredictorError> {
    check_length(n, d1)?;
    check_length(n, d2)?;
    let (n_, d1_, d2_) = (n as i64, d1 as i64, d2 as i64);
    let last_start = n_ - d2_;
    let mut alpha = 0u64;
    let mut beta = 0u64;
    for a in 1..=(n_ - d1_) {
        let b = a + d1_;

        // second edge [c, c + d2] touches {a, b} iff c is one of these
        let mut blocked = [a, b, a - d2_, b - d2_];
        blocked.sort_unstable();
        let mut hits = 0;
        for (i, &c) in blocked.iter().enumerate() {
            if (1..=last_start).contains(&c) && (i == 0 || blocked[i - 1] != c) {
                hits += 1;
            }
        }
        beta += (last_start - hits) as u64;

        // a < c < b < c + d2
        alpha += open_interval_count(a.max(b - d2_), b, last_start);
        // c < a < c + d2 < b
        alpha += open_interval_count(a - d2_, a.min(b - d2_), last_start);
    }
    if beta == 0 {
        return Err(PredictorError::NoDisjointPlacement { n, d1, d2 });
    }
    Ok(Placements { alpha, beta })
}

/// Lazily filled `p(d1, d2)` values for one sentence length.
///
/// Cells are keyed on `(min(d1, d2), max(d1, d2))` and computed at most once;
/// concurrent readers never block each other once a cell is filled.
#[derive(Debug)]
pub struct CrossingProbabilityTable {
    n: usize,
    cells: Vec<OnceLock<Option<Placements>>>,
}

impl CrossingProbabilityTable {
    pub fn new(n: usize) -> Self {
        let lengths = n.saturating_sub(1);
        let cells = (0..lengths * (lengths + 1) / 2).map(|_| OnceLock::new()).collect();
        CrossingProbabilityTable { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(short: usize, long: usize) -> usize {
        (long - 1) * long / 2 + (short - 1)
    }

    pub fn placements(&self, d1: usize, d2: usize) -> Result<Placements, PredictorError> {
        check_length(self.n, d1)?;
        check_length(self.n, d2)?;
        let (short, long) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let cell = self.cells[Self::index(short, long)]
            .get_or_init(|| pair_placements(self.n, short, long).ok());
        cell.ok_or(PredictorError::NoDisjointPlacement { n: self.n, d1, d2 })
    }

    /// `p(C = 1 | d1, d2)`.
    pub fn probability(&self, d1: usize, d2: usize) -> Result<f64, PredictorError> {
        self.placements(d1, d2).map(|p| p.probability())
    }
}

/// Per-length tables shared across sentences and threads.
#[derive(Debug, Default)]
pub struct ProbabilityCache {
    tables: RwLock<HashMap<usize, Arc<CrossingProbabilityTable>>>,
}

impl ProbabilityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn table(&self, n: usize) -> Arc<CrossingProbabilityTable> {
        if let Some(t) = self.tables.read().unwrap().get(&n) {
            return Arc::clone(t);
        }
        let mut tables = self.tables.write().unwrap();
        Arc::clone(
            tables
                .entry(n)
                .or_insert_with(|| Arc::new(CrossingProbabilityTable::new(n))),
        )
    }
}

/// One cell of a probability map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub d1: usize,
    pub d2: usize,
    pub placements: Placements,
    pub p: f64,
}

/// Every `(d1, d2)` cell that admits a disjoint placement, row-major.
/// With `full = false` only cells with `d1 <= d2` are returned.
pub fn probability_map(table: &CrossingProbabilityTable, full: bool) -> Vec<MapCell> {
    let max = table.n().saturating_sub(1);
    let mut cells = Vec::new();
    for d1 in 1..=max {
        let from = if full { 1 } else { d1 };
        for d2 in from..=max {
            if let Ok(placements) = table.placements(d1, d2) {
                cells.push(MapCell {
                    d1,
                    d2,
                    placements,
                    p: placements.probability(),
                });
            }
        }
    }
    cells
}

/// `E0[C] = |Q| / 3`.
pub fn expected_crossings_null(q_size: u64) -> f64 {
    q_size as f64 / 3.0
}

/// `E2[C]`: the sum of `p(d(e1), d(e2))` over every pair of vertex-disjoint edges.
pub fn predicted_crossings_by_length(
    tree: &DependencyTree,
    table: &CrossingProbabilityTable,
) -> Result<f64, PredictorError> {
    if table.n() != tree.n() {
        return Err(PredictorError::SizeMismatch {
            table: table.n(),
            tree: tree.n(),
        });
    }
    let edges = tree.edges();
    let mut sum = NeumaierSum::default();
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i + 1..] {
            if !a.shares_vertex(b) {
                sum.add(table.probability(a.length(), b.length())?);
            }
        }
    }
    Ok(sum.total())
}

/// `(E - C_true) / |Q|`; positive values mean the predictor overestimates.
pub fn relative_error(prediction: f64, c_true: u64, q_size: u64) -> f64 {
    (prediction - c_true as f64) / q_size as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionResult {
    pub e0: f64,
    pub e2: f64,
    pub delta0: f64,
    pub delta2: f64,
    /// `C_true / |Q|`.
    pub c_bar_true: f64,
}

impl PredictionResult {
    pub fn evaluate(
        tree: &DependencyTree,
        table: &CrossingProbabilityTable,
    ) -> Result<Self, PredictorError> {
        let q = potential_crossings(tree);
        let c = count_crossings(tree);
        Self::from_parts(tree, table, q, c)
    }

    /// Same as [`evaluate`](Self::evaluate) for callers that already hold `|Q|` and `C_true`.
    pub fn from_parts(
        tree: &DependencyTree,
        table: &CrossingProbabilityTable,
        q_size: u64,
        c_true: u64,
    ) -> Result<Self, PredictorError> {
        if q_size == 0 {
            return Err(PredictorError::EmptyQ);
        }
        let e0 = expected_crossings_null(q_size);
        let e2 = predicted_crossings_by_length(tree, table)?;
        let c_bar_true = c_true as f64 / q_size as f64;
        Ok(PredictionResult {
            e0,
            e2,
            delta0: 1.0 / 3.0 - c_bar_true,
            delta2: relative_error(e2, c_true, q_size),
            c_bar_true,
        })
    }
}
