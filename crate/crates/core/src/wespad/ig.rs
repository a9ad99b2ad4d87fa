use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::embeddings::{EmbeddingTable, NeighborIndex};
use crate::error::{Error, Result};

/// Binary entropy in bits of a set with `positive` of `total` members
/// positive; zero for an empty set.
pub fn binary_entropy(positive: usize, total: usize) -> f64 {
    if total == 0 || positive == 0 || positive == total {
        return 0.0;
    }
    let p = positive as f64 / total as f64;
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Per-word information gain of word presence with respect to the labels
/// of the training posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IGWeights {
    pub table: BTreeMap<String, f64>,
    pub corpus_entropy: f64,
}

impl IGWeights {
    pub fn get(&self, word: &str) -> Option<f64> {
        self.table.get(word).copied()
    }

    pub fn train_vocab(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    /// Stored gain for training words; otherwise the gain of the nearest
    /// training word in embedding space; otherwise zero.
    pub fn lookup(&self, word: &str, neighbors: &NeighborIndex, table: &EmbeddingTable) -> f64 {
        if let Some(ig) = self.get(word) {
            return ig;
        }
        neighbors
            .nearest(word, table)
            .and_then(|w| self.get(w))
            .unwrap_or(0.0)
    }

    /// Candidate index over training words that have vectors.
    pub fn neighbor_index(&self, table: &EmbeddingTable) -> NeighborIndex {
        NeighborIndex::build(table, self.train_vocab())
    }
}

pub fn compute_ig(train: &Corpus) -> Result<IGWeights> {
    let total = train.len();
    let positives = train.positive_count();
    if positives == 0 || positives == total {
        return Err(Error::SingleClass);
    }
    // word -> (documents containing it, positive documents containing it)
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for post in train.posts() {
        let distinct: HashSet<&str> = post.tokens.iter().map(String::as_str).collect();
        for word in distinct {
            let entry = counts.entry(word).or_default();
            entry.0 += 1;
            if post.label.is_positive() {
                entry.1 += 1;
            }
        }
    }
    let corpus_entropy = binary_entropy(positives, total);
    let n = total as f64;
    let table = counts
        .into_iter()
        .map(|(word, (with, with_pos))| {
            let without = total - with;
            let without_pos = positives - with_pos;
            let conditional = with as f64 / n * binary_entropy(with_pos, with)
                + without as f64 / n * binary_entropy(without_pos, without);
            let ig = (corpus_entropy - conditional).clamp(0.0, corpus_entropy);
            (word.to_string(), ig)
        })
        .collect();
    Ok(IGWeights {
        table,
        corpus_entropy,
    })
}

pub fn ig_lookup(word: &str, ig: &IGWeights, table: &EmbeddingTable) -> f64 {
    ig.lookup(word, &ig.neighbor_index(table), table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Label, Post};

    fn corpus(docs: &[(&str, bool)]) -> Corpus {
        Corpus::new(
            docs.iter()
                .enumerate()
                .map(|(i, &(text, pos))| Post::new(format!("d{i}"), text, Label::from_bool(pos)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_evaluated_gains() {
        let d = corpus(&[
            ("all pair one", true),
            ("all pair", true),
            ("all two", false),
            ("all", false),
        ]);
        let ig = compute_ig(&d).unwrap();
        assert_eq!(ig.corpus_entropy, 1.0);
        assert_eq!(ig.get("all"), Some(0.0));
        // 1 - (0.5 * 0 + 0.5 * 0)
        assert_eq!(ig.get("pair"), Some(1.0));
        // word in one + and one - doc: 1 - (0.5 * 1 + 0.5 * 1)
        let d2 = corpus(&[("w", true), ("x", true), ("w", false), ("y", false)]);
        assert_eq!(compute_ig(&d2).unwrap().get("w"), Some(0.0));
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(
            compute_ig(&corpus(&[("a", true), ("b", true)])),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn lookup_falls_back_to_nearest_training_word() {
        let mut ig = IGWeights {
            table: BTreeMap::new(),
            corpus_entropy: 1.0,
        };
        ig.table.insert("fever".into(), 0.7);
        ig.table.insert("walk".into(), 0.1);
        ig.table.insert("known".into(), 0.4);
        let table = EmbeddingTable::from_pairs(
            2,
            [
                ("fever", vec![1.0, 0.1]),
                ("walk", vec![0.0, 1.0]),
                ("chills", vec![0.9, 0.2]),
            ],
        )
        .unwrap();
        assert_eq!(ig_lookup("known", &ig, &table), 0.4);
        // cos(chills, fever) ~ 0.99 > cos(chills, walk) ~ 0.22
        assert_eq!(ig_lookup("chills", &ig, &table), 0.7);
        assert_eq!(ig_lookup("unseen", &ig, &table), 0.0);
    }
}
