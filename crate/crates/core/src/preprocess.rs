//! Removal of non-word tokens and the inclusion filter.

use std::fmt;

use thiserror::Error;

use crate::ingest::{RawSentence, TokenClass};
use crate::tree::DependencyTree;

/// Head vector over the surviving words, before it is known to be a tree.
/// `heads[i]` is the head of word `i + 1`; `0` is the virtual root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCandidate {
    pub id: usize,
    pub heads: Vec<usize>,
}

impl TreeCandidate {
    pub fn n(&self) -> usize {
        self.heads.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InclusionDecision {
    Included,
    ExcludedMalformed,
    ExcludedNotTree,
    ExcludedStarTree,
}

impl fmt::Display for InclusionDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InclusionDecision::Included => "included",
            InclusionDecision::ExcludedMalformed => "malformed",
            InclusionDecision::ExcludedNotTree => "not-tree",
            InclusionDecision::ExcludedStarTree => "star-tree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PruneError {
    #[error("sentence {sentence}: {tokens} tokens but {classes} classes")]
    Misaligned {
        sentence: usize,
        tokens: usize,
        classes: usize,
    },
    #[error("sentence {sentence}: head cycle above token {token}")]
    AncestorCycle { sentence: usize, token: usize },
    #[error("sentence {sentence}: token {token} has head {head} outside the sentence")]
    HeadOutOfRange {
        sentence: usize,
        token: usize,
        head: usize,
    },
}

impl PruneError {
    pub fn decision(&self) -> InclusionDecision {
        InclusionDecision::ExcludedMalformed
    }
}

/// Drops punctuation and null elements. A word whose head was dropped is
/// attached to its nearest surviving ancestor in the original annotation, or
/// to the virtual root if none survives. Surviving words keep their order and
/// are renumbered `1..=n`.
pub fn prune_non_words(sentence: &RawSentence, classes: &[TokenClass]) -> Result<TreeCandidate, PruneError> {
    let len = sentence.len();
    if classes.len() != len {
        return Err(PruneError::Misaligned {
            sentence: sentence.id,
            tokens: len,
            classes: classes.len(),
        });
    }
    let original: Vec<usize> = sentence.tokens.iter().map(|t| t.head).collect();
    if let Some((i, &head)) = original.iter().enumerate().find(|(_, &h)| h > len) {
        return Err(PruneError::HeadOutOfRange {
            sentence: sentence.id,
            token: i + 1,
            head,
        });
    }

    let mut renumbered = vec![0usize; len + 1];
    let mut next = 0;
    for (i, class) in classes.iter().enumerate() {
        if *class == TokenClass::Word {
            next += 1;
            renumbered[i + 1] = next;
        }
    }
    let kept = |v: usize| renumbered[v] != 0;

    let mut heads = Vec::with_capacity(next);
    for (i, &head) in original.iter().enumerate() {
        if !kept(i + 1) {
            continue;
        }
        let mut ancestor = head;
        let mut steps = 0;
        while ancestor != 0 && !kept(ancestor) {
            steps += 1;
            if steps > len {
                return Err(PruneError::AncestorCycle {
                    sentence: sentence.id,
                    token: i + 1,
                });
            }
            ancestor = original[ancestor - 1];
        }
        heads.push(renumbered[ancestor]);
    }
    Ok(TreeCandidate { id: sentence.id, heads })
}

/// Classifies a candidate: not a tree, a star tree (which covers every tree
/// with at most three vertices), or included.
pub fn filter(candidate: &TreeCandidate) -> InclusionDecision {
    match admit(candidate) {
        Ok(_) => InclusionDecision::Included,
        Err(decision) => decision,
    }
}

/// Like [`filter`] but hands back the tree when it is included.
pub fn admit(candidate: &TreeCandidate) -> Result<DependencyTree, InclusionDecision> {
    let tree = DependencyTree::from_heads(candidate.heads.clone())
        .map_err(|_| InclusionDecision::ExcludedNotTree)?;
    if tree.is_star() {
        return Err(InclusionDecision::ExcludedStarTree);
    }
    Ok(tree)
}

/// Number of sentences that ended in each exclusion class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExclusionTally {
    pub malformed: usize,
    pub not_tree: usize,
    pub star_tree: usize,
}

impl ExclusionTally {
    pub fn record(&mut self, decision: InclusionDecision) {
        match decision {
            InclusionDecision::Included => {}
            InclusionDecision::ExcludedMalformed => self.malformed += 1,
            InclusionDecision::ExcludedNotTree => self.not_tree += 1,
            InclusionDecision::ExcludedStarTree => self.star_tree += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.malformed + self.not_tree + self.star_tree
    }
}
