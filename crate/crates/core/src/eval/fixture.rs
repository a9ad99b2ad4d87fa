//! Seeded synthetic corpora with a matching embedding table and treebank.
//!
//! Words come in four kinds. Common words and topic words are shared by
//! both classes; topic words pull a post's centroid toward one of a few
//! topic directions. Class words sit near a positive or a negative anchor
//! direction. A few class words per class are frequent, the rest form a
//! long tail, so most tail words in a test fold never occur in its
//! training folds and only their embeddings carry the label.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label, Post, PostRecord};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::treebank::{DependencyForest, DependencyTree, Treebank};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub posts: usize,
    pub positive_rate: f64,
    pub dim: usize,
    pub seed: u64,
    pub topics: usize,
    pub common_words: usize,
    pub topic_words: usize,
    /// Frequent class words per class.
    pub head_words: usize,
    /// Rare class words per class.
    pub tail_words: usize,
    /// Chance that a class word is drawn from the frequent head.
    pub head_rate: f64,
    /// Chance that a class word comes from the other class's vocabulary.
    pub crossover: f64,
    /// Topic whose negatives borrow positive vocabulary.
    pub impure_topic: Option<usize>,
    /// Share of the impure topic's negatives that do so.
    pub impure_rate: f64,
    pub context_rate: f64,
    /// Length of the anchor and topic components of a word vector.
    pub strength: f64,
    /// Per-component standard deviation of word vector noise.
    pub noise: f64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec::held_out(7)
    }
}

impl FixtureSpec {
    /// 800 posts, 20% positive, most positive vocabulary rare.
    pub fn held_out(seed: u64) -> Self {
        FixtureSpec {
            posts: 800,
            positive_rate: 0.2,
            dim: 50,
            seed,
            topics: 4,
            common_words: 40,
            topic_words: 12,
            head_words: 8,
            tail_words: 400,
            head_rate: 0.3,
            crossover: 0.1,
            impure_topic: None,
            impure_rate: 0.0,
            context_rate: 0.5,
            strength: 3.0,
            noise: 0.3,
        }
    }

    /// Like [`held_out`](Self::held_out), with one topic whose negatives
    /// often use positive vocabulary.
    pub fn impure(seed: u64) -> Self {
        FixtureSpec {
            impure_topic: Some(0),
            impure_rate: 0.8,
            ..FixtureSpec::held_out(seed)
        }
    }

    /// A 40-post corpus for quick checks.
    pub fn small(seed: u64) -> Self {
        FixtureSpec {
            posts: 40,
            positive_rate: 0.3,
            tail_words: 30,
            ..FixtureSpec::held_out(seed)
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.posts >= 2
            && self.positive_rate > 0.0
            && self.positive_rate < 1.0
            && self.dim > 0
            && self.topics > 0
            && self.common_words > 0
            && self.topic_words > 0
            && self.head_words + self.tail_words > 0
            && self.impure_topic.is_none_or(|t| t < self.topics);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid fixture spec: {self:?}")))
        }
    }
}

pub struct Fixture {
    pub spec: FixtureSpec,
    pub corpus: Corpus,
    pub table: EmbeddingTable,
    pub trees: Treebank,
}

struct Vocab {
    common: Vec<String>,
    topics: Vec<Vec<String>>,
    head: [Vec<String>; 2],
    tail: [Vec<String>; 2],
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn word_vector(
    rng: &mut ChaCha8Rng,
    direction: Option<&[f64]>,
    noise: &Normal<f64>,
    dim: usize,
) -> Vec<f32> {
    (0..dim)
        .map(|i| (direction.map_or(0.0, |d| d[i]) + noise.sample(rng)) as f32)
        .collect()
}

impl Fixture {
    pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let dim = spec.dim;
        let noise = Normal::new(0.0, spec.noise).expect("finite noise");
        let common_noise = Normal::new(0.0, spec.noise * 2.0).expect("finite noise");

        let scaled =
            |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x * spec.strength).collect() };
        let anchors = [scaled(unit(&mut rng, dim)), scaled(unit(&mut rng, dim))];
        let topic_dirs: Vec<Vec<f64>> = (0..spec.topics)
            .map(|_| scaled(unit(&mut rng, dim)))
            .collect();

        let names = |prefix: &str, n: usize| -> Vec<String> {
            (0..n).map(|i| format!("{prefix}{i}")).collect()
        };
        let vocab = Vocab {
            common: names("w", spec.common_words),
            topics: (0..spec.topics)
                .map(|t| names(&format!("t{t}w"), spec.topic_words))
                .collect(),
            head: [names("s", spec.head_words), names("g", spec.head_words)],
            tail: [names("sx", spec.tail_words), names("gx", spec.tail_words)],
        };

        let mut pairs: Vec<(String, Vec<f32>)> = Vec::new();
        for w in &vocab.common {
            pairs.push((w.clone(), word_vector(&mut rng, None, &common_noise, dim)));
        }
        for (t, words) in vocab.topics.iter().enumerate() {
            for w in words {
                pairs.push((
                    w.clone(),
                    word_vector(&mut rng, Some(&topic_dirs[t]), &noise, dim),
                ));
            }
        }
        for (class, anchor) in anchors.iter().enumerate() {
            for w in vocab.head[class].iter().chain(&vocab.tail[class]) {
                pairs.push((w.clone(), word_vector(&mut rng, Some(anchor), &noise, dim)));
            }
        }
        let table = EmbeddingTable::from_pairs(dim, pairs)?;

        let n_pos = ((spec.posts as f64) * spec.positive_rate).round() as usize;
        let mut labels: Vec<bool> = (0..spec.posts).map(|i| i < n_pos).collect();
        labels.shuffle(&mut rng);

        let mut posts = Vec::with_capacity(spec.posts);
        let mut trees = Treebank::new();
        for (i, &positive) in labels.iter().enumerate() {
            let topic = rng.random_range(0..spec.topics);
            let mut class = if positive { 0 } else { 1 };
            if !positive && spec.impure_topic == Some(topic) && rng.random_bool(spec.impure_rate) {
                class = 0;
            }
            let tokens = post_tokens(&mut rng, &vocab, spec, topic, class);
            let id = format!("p{i:04}");
            let text = tokens.join(" ");
            let prev = context_text(&mut rng, &vocab, spec, class);
            let next = context_text(&mut rng, &vocab, spec, class);
            let mut post =
                Post::new(id.clone(), text, Label::from_bool(positive)).with_context(prev, next);
            post.topic = Some(format!("topic{topic}"));
            trees.insert(
                id.clone(),
                DependencyForest {
                    post_id: id,
                    sentences: vec![random_tree(&mut rng, &post.tokens)],
                },
            );
            posts.push(post);
        }
        Ok(Fixture {
            spec: spec.clone(),
            corpus: Corpus::new(posts)?,
            table,
            trees,
        })
    }

    /// Writes `posts.jsonl`, `embeddings.txt` (word2vec text) and
    /// `trees.conll` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut posts = String::new();
        for post in self.corpus.posts() {
            posts.push_str(&serde_json::to_string(&PostRecord::from(post))?);
            posts.push('\n');
        }
        let path = dir.join("posts.jsonl");
        fs::write(&path, posts).map_err(|e| Error::io(&path, e))?;

        let path = dir.join("embeddings.txt");
        let mut buf = Vec::new();
        self.table
            .write_text(&mut buf, true)
            .map_err(|e| Error::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;

        let path = dir.join("trees.conll");
        fs::write(&path, conll_text(&self.trees)).map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

fn class_word(rng: &mut ChaCha8Rng, vocab: &Vocab, spec: &FixtureSpec, class: usize) -> String {
    let class = if rng.random_bool(spec.crossover) {
        1 - class
    } else {
        class
    };
    let use_head = vocab.tail[class].is_empty()
        || (!vocab.head[class].is_empty() && rng.random_bool(spec.head_rate));
    let pool = if use_head {
        &vocab.head[class]
    } else {
        &vocab.tail[class]
    };
    pool.choose(rng).expect("non-empty pool").clone()
}

fn post_tokens(
    rng: &mut ChaCha8Rng,
    vocab: &Vocab,
    spec: &FixtureSpec,
    topic: usize,
    class: usize,
) -> Vec<String> {
    let mut tokens = Vec::new();
    for _ in 0..2 {
        tokens.push(
            vocab.topics[topic]
                .choose(rng)
                .expect("topic words")
                .clone(),
        );
    }
    for _ in 0..rng.random_range(3..=4) {
        tokens.push(class_word(rng, vocab, spec, class));
    }
    for _ in 0..rng.random_range(3..=6) {
        tokens.push(vocab.common.choose(rng).expect("common words").clone());
    }
    tokens.shuffle(rng);
    tokens
}

fn context_text(
    rng: &mut ChaCha8Rng,
    vocab: &Vocab,
    spec: &FixtureSpec,
    class: usize,
) -> Option<String> {
    if !rng.random_bool(spec.context_rate) {
        return None;
    }
    let mut tokens: Vec<String> = (0..rng.random_range(3..=5))
        .map(|_| vocab.common.choose(rng).expect("common words").clone())
        .collect();
    if rng.random_bool(0.5) {
        tokens.push(class_word(rng, vocab, spec, class));
    }
    tokens.shuffle(rng);
    Some(tokens.join(" "))
}

/// Each token after the first attaches to a uniformly chosen earlier one.
fn random_tree(rng: &mut ChaCha8Rng, tokens: &[String]) -> DependencyTree {
    let rows: Vec<(&str, usize)> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), if i == 0 { 0 } else { rng.random_range(1..=i) }))
        .collect();
    DependencyTree::from_conll_heads(&rows).expect("attachment to earlier tokens is acyclic")
}

fn conll_text(trees: &Treebank) -> String {
    let mut out = String::new();
    for (id, forest) in trees {
        let _ = writeln!(out, "# id = {id}");
        for tree in &forest.sentences {
            for (i, node) in tree.nodes().iter().enumerate() {
                let head = node.head.map_or(0, |h| h + 1);
                let _ = writeln!(out, "{}\t{}\t_\t_\t_\t_\t{head}\t_\t_\t_", i + 1, node.form);
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_posts, PostFormat};
    use crate::embeddings::{load_embeddings, EmbeddingFormat, LoadOptions};
    use crate::treebank::{load_conll, ConllColumns};

    #[test]
    fn seeded() {
        let a = Fixture::generate(&FixtureSpec::small(3)).unwrap();
        let b = Fixture::generate(&FixtureSpec::small(3)).unwrap();
        assert_eq!(a.corpus.posts(), b.corpus.posts());
        assert_eq!(a.trees, b.trees);
        let c = Fixture::generate(&FixtureSpec::small(4)).unwrap();
        assert_ne!(a.corpus.posts(), c.corpus.posts());
        assert_eq!(a.corpus.len(), 40);
        assert_eq!(a.corpus.positive_count(), 12);
    }

    #[test]
    fn files_read_back() {
        let fx = Fixture::generate(&FixtureSpec::small(1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        fx.write_to(dir.path()).unwrap();
        let corpus = load_posts(&dir.path().join("posts.jsonl"), PostFormat::Jsonl).unwrap();
        assert_eq!(corpus.posts(), fx.corpus.posts());
        let trees = load_conll(&dir.path().join("trees.conll"), ConllColumns::default()).unwrap();
        assert_eq!(trees, fx.trees);
        let table = load_embeddings(
            &dir.path().join("embeddings.txt"),
            EmbeddingFormat::Word2vecText,
            &LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(table.words(), fx.table.words());
        for w in table.words() {
            assert_eq!(table.get(w), fx.table.get(w));
        }
    }
}
