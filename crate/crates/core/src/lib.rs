//! Dependency-crossing statistics for treebanks.
//!
//! The pipeline reads CoNLL sentences ([`ingest`]), removes punctuation and
//! null elements and keeps only non-star trees ([`preprocess`]), measures each
//! tree ([`metrics`]) and compares the observed crossing count with two
//! predictors ([`predictor`]): one that only knows the tree's degree sequence
//! and one that also knows its dependency lengths. [`ensembles`] holds random
//! baselines and [`report`] turns per-sentence values into tables.

pub mod analysis;
pub mod cli;
pub mod ensembles;
pub mod ingest;
pub mod metrics;
pub mod predictor;
pub mod preprocess;
pub mod report;
pub mod stats;
pub mod tree;

pub use analysis::{analyze_sentence, analyze_stream, evaluate_tree, SentenceMetrics, TreebankAnalysis};
pub use ingest::{classify_token, parse_conll, IngestConfig, RawSentence, RawToken, TokenClass};
pub use metrics::StructuralMetrics;
pub use predictor::{CrossingProbabilityTable, PredictionResult, ProbabilityCache};
pub use preprocess::{filter, prune_non_words, InclusionDecision};
pub use tree::{DependencyTree, Edge};
