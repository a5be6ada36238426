//! Per-sentence pipeline: classify, prune, filter, measure, predict.

use std::io::{self, BufRead};

use rayon::prelude::*;

use crate::ingest::{classify_sentence, ConllReader, IngestConfig, MalformedSentence, RawSentence, ReadError};
use crate::metrics::{
    count_crossings, degree_second_moment, hubiness, potential_crossings, total_dependency_length,
};
use crate::predictor::{PredictionResult, PredictorError, ProbabilityCache};
use crate::preprocess::{admit, prune_non_words, ExclusionTally, InclusionDecision};
use crate::tree::DependencyTree;

/// Sentences handed to the thread pool at a time.
const BATCH: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceMetrics {
    pub id: usize,
    pub n: usize,
    pub c_true: u64,
    pub q_size: u64,
    pub total_length: u64,
    pub k2_mean: f64,
    pub hubiness: f64,
    pub e0: f64,
    pub e2: f64,
    pub delta0: f64,
    pub delta2: f64,
}

/// Metrics of an included tree. Fails only for trees with empty Q.
pub fn evaluate_tree(id: usize, tree: &DependencyTree, cache: &ProbabilityCache) -> Result<SentenceMetrics, PredictorError> {
    let q_size = potential_crossings(tree);
    let c_true = count_crossings(tree);
    let table = cache.table(tree.n());
    let prediction = PredictionResult::from_parts(tree, &table, q_size, c_true)?;
    Ok(SentenceMetrics {
        id,
        n: tree.n(),
        c_true,
        q_size,
        total_length: total_dependency_length(tree).total,
        k2_mean: degree_second_moment(tree),
        hubiness: hubiness(tree).map_err(|_| PredictorError::EmptyQ)?,
        e0: prediction.e0,
        e2: prediction.e2,
        delta0: prediction.delta0,
        delta2: prediction.delta2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SentenceOutcome {
    Included(SentenceMetrics),
    Excluded { id: usize, decision: InclusionDecision },
}

pub fn analyze_sentence(sentence: &RawSentence, config: &IngestConfig, cache: &ProbabilityCache) -> SentenceOutcome {
    let excluded = |decision| SentenceOutcome::Excluded { id: sentence.id, decision };
    let classes = classify_sentence(sentence, config);
    let candidate = match prune_non_words(sentence, &classes) {
        Ok(c) => c,
        Err(e) => return excluded(e.decision()),
    };
    let tree = match admit(&candidate) {
        Ok(t) => t,
        Err(decision) => return excluded(decision),
    };
    match evaluate_tree(sentence.id, &tree, cache) {
        Ok(m) => SentenceOutcome::Included(m),
        // admitted trees are never stars, so Q is nonempty
        Err(_) => excluded(InclusionDecision::ExcludedStarTree),
    }
}

#[derive(Debug, Clone, Default)]
pub struct TreebankAnalysis {
    pub id: String,
    pub sentences_raw: usize,
    pub tally: ExclusionTally,
    /// Included sentences in input order.
    pub metrics: Vec<SentenceMetrics>,
    pub malformed: Vec<MalformedSentence>,
}

impl TreebankAnalysis {
    pub fn filtered(&self) -> usize {
        self.metrics.len()
    }
}

/// Runs the whole pipeline over one treebank stream. Batches of sentences are
/// processed on the current rayon pool; results keep input order.
pub fn analyze_stream<R: BufRead>(
    id: &str,
    reader: R,
    config: &IngestConfig,
    cache: &ProbabilityCache,
) -> io::Result<TreebankAnalysis> {
    let mut analysis = TreebankAnalysis {
        id: id.to_owned(),
        ..Default::default()
    };
    let mut batch: Vec<RawSentence> = Vec::with_capacity(BATCH);
    let mut sentences = ConllReader::new(reader, config.format);

    loop {
        let mut exhausted = true;
        for item in sentences.by_ref() {
            analysis.sentences_raw += 1;
            match item {
                Ok(s) => batch.push(s),
                Err(ReadError::Malformed(m)) => {
                    analysis.tally.record(InclusionDecision::ExcludedMalformed);
                    analysis.malformed.push(m);
                }
                Err(ReadError::Io(e)) => return Err(e),
            }
            if batch.len() == BATCH {
                exhausted = false;
                break;
            }
        }
        let outcomes: Vec<SentenceOutcome> = batch
            .par_iter()
            .map(|s| analyze_sentence(s, config, cache))
            .collect();
        for outcome in outcomes {
            match outcome {
                SentenceOutcome::Included(m) => analysis.metrics.push(m),
                SentenceOutcome::Excluded { decision, .. } => analysis.tally.record(decision),
            }
        }
        batch.clear();
        if exhausted {
            return Ok(analysis);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = "1\ta\t_\tX\tX\t_\t3\t_\t_\t_\n2\tb\t_\tX\tX\t_\t3\t_\t_\t_\n\
                          3\tc\t_\tX\tX\t_\t0\t_\t_\t_\n4\td\t_\tX\tX\t_\t2\t_\t_\t_\n5\t.\t_\tZ\tZ\t_\t3\t_\t_\t_\n\n";

    #[test]
    fn worked_sentence() {
        let cache = ProbabilityCache::new();
        let a = analyze_stream("t", WORKED.as_bytes(), &IngestConfig::default(), &cache).unwrap();
        assert_eq!((a.sentences_raw, a.filtered()), (1, 1));
        let m = &a.metrics[0];
        assert_eq!((m.n, m.c_true, m.q_size, m.total_length), (4, 1, 1, 5));
        assert_eq!(m.k2_mean, 2.5);
        assert_eq!(m.hubiness, 0.0);
        assert_eq!(m.e2, 1.0);
        assert_eq!(m.delta2, 0.0);
        assert!((m.delta0 + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tallies_every_sentence() {
        let text = format!(
            "{WORKED}1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n2\tb\t_\t_\t_\t_\t0\t_\t_\t_\n\n\
             1\ta\t_\t_\t_\t_\tx\t_\t_\t_\n\n1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n\n"
        );
        let cache = ProbabilityCache::new();
        let a = analyze_stream("t", text.as_bytes(), &IngestConfig::default(), &cache).unwrap();
        assert_eq!(a.sentences_raw, 4);
        assert_eq!(a.filtered(), 1);
        assert_eq!(a.tally, ExclusionTally { malformed: 1, not_tree: 1, star_tree: 1 });
        assert_eq!(a.malformed[0].sentence, 3);
    }

    #[test]
    fn order_is_stable_across_batches() {
        let mut text = String::new();
        for _ in 0..(BATCH + 10) {
            text.push_str(WORKED);
        }
        let cache = ProbabilityCache::new();
        let a = analyze_stream("t", text.as_bytes(), &IngestConfig::default(), &cache).unwrap();
        assert_eq!(a.filtered(), BATCH + 10);
        assert!(a.metrics.windows(2).all(|w| w[0].id + 1 == w[1].id));
    }
}
