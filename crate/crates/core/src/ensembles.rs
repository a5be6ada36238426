//! Random baselines: uniform arrangements, uniform labeled trees and Monte
//! Carlo estimates of crossing statistics.
//!
//! Every stochastic function takes a [`RandomSource`], so results are a pure
//! function of the inputs and the seed. Parallel runs use one ChaCha stream
//! per worker and pool the per-stream accumulators.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{count_crossings, potential_crossings};
use crate::predictor::{predicted_crossings_by_length, CrossingProbabilityTable, PredictorError};
use crate::stats::Accumulator;
use crate::tree::{DependencyTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnsembleError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("tree has no pair of vertex-disjoint edges")]
    EmptyQ,
    #[error("random trees need n >= 2, got {0}")]
    TooSmall(usize),
    #[error("invalid Pruefer code: {0}")]
    BadCode(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
}

/// Seeded generator. The same seed and stream always give the same sequence.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `stream` of the generator seeded with `seed`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomSource { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..bound)
    }

    /// Uniform permutation of `1..=n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (1..=n).collect();
        p.shuffle(&mut self.rng);
        p
    }
}

/// The same tree with its vertices placed in uniformly random order.
pub fn shuffle_arrangement(tree: &DependencyTree, rng: &mut RandomSource) -> DependencyTree {
    let arrangement = rng.permutation(tree.n());
    tree.rearranged(&arrangement).expect("a permutation is a valid arrangement")
}

/// Decodes a Pruefer sequence over labels `1..=n` (`code.len() == n - 2`).
/// The tree is rooted at label `n` and each vertex sits at the position equal
/// to its label.
pub fn prufer_decode(code: &[usize], n: usize) -> Result<DependencyTree, EnsembleError> {
    if n < 2 {
        return Err(EnsembleError::TooSmall(n));
    }
    if code.len() != n - 2 {
        return Err(EnsembleError::BadCode(format!("length {} for n = {n}", code.len())));
    }
    if let Some(&bad) = code.iter().find(|&&v| v == 0 || v > n) {
        return Err(EnsembleError::BadCode(format!("label {bad} outside 1..={n}")));
    }
    let mut degree = vec![1usize; n + 1];
    for &v in code {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (1..=n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in code {
        let Reverse(leaf) = leaves.pop().expect("a Pruefer step always has a leaf");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    Ok(DependencyTree::from_undirected(n, &edges, n)?)
}

/// Uniformly random labeled tree on `n` vertices, positions equal to labels.
pub fn uniform_random_tree(n: usize, rng: &mut RandomSource) -> Result<DependencyTree, EnsembleError> {
    if n < 2 {
        return Err(EnsembleError::TooSmall(n));
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.below(n) + 1).collect();
    prufer_decode(&code, n)
}

/// Preorder arrangement: each vertex precedes its subtree and children keep
/// their current relative order. Never has crossings.
pub fn planar_arrangement(tree: &DependencyTree) -> DependencyTree {
    let n = tree.n();
    let mut children = vec![Vec::new(); n + 1];
    for v in 1..=n {
        children[tree.head(v)].push(v);
    }
    let mut arrangement = vec![0; n];
    let mut next = 0;
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        next += 1;
        arrangement[v - 1] = next;
        stack.extend(children[v].iter().rev());
    }
    tree.rearranged(&arrangement).expect("preorder is a permutation")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrangementPolicy {
    /// Keep the given arrangement.
    Identity,
    /// Uniformly random order.
    Uniform,
    /// Crossing-free preorder arrangement.
    Planar,
}

impl std::str::FromStr for ArrangementPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(ArrangementPolicy::Identity),
            "random" | "uniform" => Ok(ArrangementPolicy::Uniform),
            "planar" => Ok(ArrangementPolicy::Planar),
            other => Err(format!("unknown arrangement policy '{other}'")),
        }
    }
}

impl ArrangementPolicy {
    pub fn apply(self, tree: &DependencyTree, rng: &mut RandomSource) -> DependencyTree {
        match self {
            ArrangementPolicy::Identity => tree.clone(),
            ArrangementPolicy::Uniform => shuffle_arrangement(tree, rng),
            ArrangementPolicy::Planar => planar_arrangement(tree),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub samples: u64,
}

impl MonteCarloEstimate {
    fn from_accumulator(acc: &Accumulator) -> Self {
        MonteCarloEstimate {
            mean: acc.mean(),
            std_error: (acc.variance() / acc.count() as f64).sqrt(),
            samples: acc.count(),
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Minimum sample count for [`estimate_null_crossings`].
pub const MIN_NULL_SAMPLES: usize = 1000;

fn require_q(tree: &DependencyTree) -> Result<(), EnsembleError> {
    if potential_crossings(tree) == 0 {
        Err(EnsembleError::EmptyQ)
    } else {
        Ok(())
    }
}

fn require_samples(got: usize, min: usize) -> Result<(), EnsembleError> {
    if got < min {
        Err(EnsembleError::TooFewSamples { min, got })
    } else {
        Ok(())
    }
}

/// Mean crossing count over uniformly random arrangements of `tree`.
pub fn estimate_null_crossings(
    tree: &DependencyTree,
    samples: usize,
    rng: &mut RandomSource,
) -> Result<MonteCarloEstimate, EnsembleError> {
    require_q(tree)?;
    require_samples(samples, MIN_NULL_SAMPLES)?;
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        acc.push(count_crossings(&shuffle_arrangement(tree, rng)) as f64);
    }
    Ok(MonteCarloEstimate::from_accumulator(&acc))
}

/// Mean of `E2[C]` over uniformly random arrangements of `tree`.
pub fn estimate_e2_mean_over_arrangements(
    tree: &DependencyTree,
    samples: usize,
    rng: &mut RandomSource,
    table: &CrossingProbabilityTable,
) -> Result<MonteCarloEstimate, EnsembleError> {
    estimate_e2_with_policy(tree, samples, ArrangementPolicy::Uniform, rng, table)
}

/// Mean of `E2[C]` over arrangements drawn from `policy`.
pub fn estimate_e2_with_policy(
    tree: &DependencyTree,
    samples: usize,
    policy: ArrangementPolicy,
    rng: &mut RandomSource,
    table: &CrossingProbabilityTable,
) -> Result<MonteCarloEstimate, EnsembleError> {
    require_q(tree)?;
    require_samples(samples, 2)?;
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        let arranged = policy.apply(tree, rng);
        acc.push(predicted_crossings_by_length(&arranged, table)?);
    }
    Ok(MonteCarloEstimate::from_accumulator(&acc))
}

/// Joint estimate of `C` and `E2[C]` over uniformly random arrangements,
/// split across `streams` independently seeded generators and pooled.
pub fn par_estimate_crossings(
    tree: &DependencyTree,
    samples: usize,
    seed: u64,
    streams: usize,
    table: &CrossingProbabilityTable,
) -> Result<(MonteCarloEstimate, MonteCarloEstimate), EnsembleError> {
    require_q(tree)?;
    require_samples(samples, 2)?;
    let streams = streams.max(1);
    let parts: Result<Vec<(Accumulator, Accumulator)>, EnsembleError> = (0..streams)
        .into_par_iter()
        .map(|k| {
            let share = samples / streams + usize::from(k < samples % streams);
            let mut rng = RandomSource::stream(seed, k as u64);
            let mut c = Accumulator::default();
            let mut e2 = Accumulator::default();
            for _ in 0..share {
                let arranged = shuffle_arrangement(tree, &mut rng);
                c.push(count_crossings(&arranged) as f64);
                e2.push(predicted_crossings_by_length(&arranged, table)?);
            }
            Ok((c, e2))
        })
        .collect();
    let mut c = Accumulator::default();
    let mut e2 = Accumulator::default();
    for (pc, pe) in parts? {
        c.merge(&pc);
        e2.merge(&pe);
    }
    Ok((MonteCarloEstimate::from_accumulator(&c), MonteCarloEstimate::from_accumulator(&e2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::count_crossings;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        let t = DependencyTree::linear(9);
        for _ in 0..20 {
            assert_eq!(shuffle_arrangement(&t, &mut a), shuffle_arrangement(&t, &mut b));
        }
        let mut c = RandomSource::stream(42, 1);
        let mut d = RandomSource::new(42);
        assert_ne!(c.permutation(20), d.permutation(20));
    }

    #[test]
    fn shuffling_keeps_degrees() {
        let t = DependencyTree::from_heads(vec![3, 3, 0, 2]).unwrap();
        let mut rng = RandomSource::new(1);
        for _ in 0..50 {
            let s = shuffle_arrangement(&t, &mut rng);
            let mut a = s.degrees();
            a.sort_unstable();
            assert_eq!(a, vec![1, 1, 2, 2]);
        }
    }

    #[test]
    fn prufer_examples() {
        let t = prufer_decode(&[4, 4, 4], 5).unwrap();
        assert!(t.is_star());
        let t = prufer_decode(&[2, 3], 4).unwrap();
        assert!(t.is_linear());
        assert_eq!(prufer_decode(&[], 2).unwrap().n(), 2);
        assert!(prufer_decode(&[7], 3).is_err());
        assert!(prufer_decode(&[1], 4).is_err());
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = RandomSource::new(7);
        for n in 2..40 {
            let t = uniform_random_tree(n, &mut rng).unwrap();
            assert_eq!(t.edges().len(), n - 1);
        }
        assert_eq!(uniform_random_tree(1, &mut rng), Err(EnsembleError::TooSmall(1)));
    }

    #[test]
    fn planar_has_no_crossings() {
        let mut rng = RandomSource::new(3);
        for _ in 0..200 {
            let t = shuffle_arrangement(&uniform_random_tree(25, &mut rng).unwrap(), &mut rng);
            assert_eq!(count_crossings(&planar_arrangement(&t)), 0);
        }
    }

    #[test]
    fn preconditions() {
        let mut rng = RandomSource::new(0);
        let star = DependencyTree::star(5, 1);
        assert_eq!(estimate_null_crossings(&star, 5000, &mut rng), Err(EnsembleError::EmptyQ));
        let path = DependencyTree::linear(4);
        assert!(matches!(
            estimate_null_crossings(&path, 10, &mut rng),
            Err(EnsembleError::TooFewSamples { min: 1000, got: 10 })
        ));
    }

    #[test]
    fn null_mean_near_a_third_of_q() {
        let mut rng = RandomSource::new(11);
        let path = DependencyTree::linear(4);
        let est = estimate_null_crossings(&path, 20_000, &mut rng).unwrap();
        assert!(est.agrees_with(1.0 / 3.0, 3.0), "{est:?}");
        let lin6 = DependencyTree::linear(6);
        let est = estimate_null_crossings(&lin6, 20_000, &mut rng).unwrap();
        assert!(est.agrees_with(2.0, 3.0), "{est:?}");
    }

    #[test]
    fn e2_means() {
        let mut rng = RandomSource::new(5);
        let table = CrossingProbabilityTable::new(8);
        let est = estimate_e2_mean_over_arrangements(&DependencyTree::linear(8), 20_000, &mut rng, &table).unwrap();
        assert!(est.agrees_with(5.0, 3.0), "{est:?}");

        let t = DependencyTree::linear(8).rearranged(&[1, 5, 2, 6, 3, 7, 4, 8]).unwrap();
        let fixed = estimate_e2_with_policy(&t, 10, ArrangementPolicy::Identity, &mut rng, &table).unwrap();
        assert_eq!(fixed.mean, predicted_crossings_by_length(&t, &table).unwrap());
        assert_eq!(fixed.std_error, 0.0);
    }

    #[test]
    fn parallel_streams_are_deterministic() {
        let table = CrossingProbabilityTable::new(7);
        let t = DependencyTree::linear(7);
        let a = par_estimate_crossings(&t, 3001, 9, 4, &table).unwrap();
        let b = par_estimate_crossings(&t, 3001, 9, 4, &table).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.0.samples, 3001);
        assert!(a.0.agrees_with(10.0 / 3.0, 4.0));
    }
}
