//! Labeled posts, tokenization, n-gram vocabularies and fold plans.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "pos",
            Label::Negative => "neg",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "pos" => Ok(Label::Positive),
            "neg" => Ok(Label::Negative),
            _ => Err(()),
        }
    }
}

/// A single labeled post. Dependency trees are kept apart, keyed by `id`.
#[derive(Debug, Clone, PartialEq)]
pub struct Post {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub label: Label,
    pub topic: Option<String>,
    pub prev_text: Option<String>,
    pub next_text: Option<String>,
}

impl Post {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        let text = text.into();
        Post {
            id: id.into(),
            tokens: tokenize(&text),
            text,
            label,
            topic: None,
            prev_text: None,
            next_text: None,
        }
    }

    pub fn with_context(mut self, prev: Option<String>, next: Option<String>) -> Self {
        self.prev_text = prev;
        self.next_text = next;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    posts: Vec<Post>,
    positive_count: usize,
    negative_count: usize,
}

impl Corpus {
    pub fn new(posts: Vec<Post>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(posts.len());
        for post in &posts {
            if !seen.insert(post.id.as_str()) {
                return Err(Error::DuplicateId(post.id.clone()));
            }
        }
        let positive_count = posts.iter().filter(|p| p.label.is_positive()).count();
        let negative_count = posts.len() - positive_count;
        Ok(Corpus {
            posts,
            positive_count,
            negative_count,
        })
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    pub fn labels(&self) -> Vec<Label> {
        self.posts.iter().map(|p| p.label).collect()
    }

    /// Posts at `indices`, in the order given.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        let posts: Vec<Post> = indices.iter().map(|&i| self.posts[i].clone()).collect();
        let positive_count = posts.iter().filter(|p| p.label.is_positive()).count();
        Corpus {
            negative_count: posts.len() - positive_count,
            positive_count,
            posts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostFormat {
    Jsonl,
    Tsv,
}

impl PostFormat {
    /// Guess from the file extension; anything other than `.tsv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => PostFormat::Tsv,
            _ => PostFormat::Jsonl,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PostRecord {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_text: Option<String>,
}

impl From<&Post> for PostRecord {
    fn from(post: &Post) -> Self {
        PostRecord {
            id: post.id.clone(),
            text: post.text.clone(),
            label: Some(post.label.as_str().to_string()),
            topic: post.topic.clone(),
            prev_text: post.prev_text.clone(),
            next_text: post.next_text.clone(),
        }
    }
}

pub fn load_posts(path: &Path, format: PostFormat) -> Result<Corpus> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_posts(&content, format)
}

pub fn parse_posts(content: &str, format: PostFormat) -> Result<Corpus> {
    Corpus::new(parse_records(content, format, true)?)
}

/// Reads posts whose labels may be missing, as for prediction. Posts
/// without a label are marked negative; the label is not used by
/// prediction.
pub fn parse_unlabeled_posts(content: &str, format: PostFormat) -> Result<Vec<Post>> {
    parse_records(content, format, false)
}

pub fn load_unlabeled_posts(path: &Path, format: PostFormat) -> Result<Vec<Post>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_unlabeled_posts(&content, format)
}

fn parse_records(content: &str, format: PostFormat, labeled: bool) -> Result<Vec<Post>> {
    let mut posts = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let post = match format {
            PostFormat::Jsonl => parse_jsonl_line(line, line_no, labeled)?,
            PostFormat::Tsv => parse_tsv_line(line, line_no, labeled)?,
        };
        if !seen.insert(post.id.clone()) {
            return Err(Error::DuplicateId(post.id));
        }
        posts.push(post);
    }
    Ok(posts)
}

fn parse_label(label: &str, line: usize) -> Result<Label> {
    label.parse().map_err(|_| Error::UnknownLabel {
        line,
        label: label.to_string(),
    })
}

fn parse_jsonl_line(line: &str, line_no: usize, labeled: bool) -> Result<Post> {
    let record: PostRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    let label = match (&record.label, labeled) {
        (Some(l), _) => parse_label(l, line_no)?,
        (None, false) => Label::Negative,
        (None, true) => {
            return Err(Error::Parse {
                line: line_no,
                message: "missing field `label`".to_string(),
            })
        }
    };
    let mut post = Post::new(record.id, record.text, label);
    post.topic = record.topic;
    post.prev_text = record.prev_text;
    post.next_text = record.next_text;
    Ok(post)
}

// TSV rows carry no id; the 1-based line number stands in for one. Without
// labels a row is either `label<TAB>text` or just the text.
fn parse_tsv_line(line: &str, line_no: usize, labeled: bool) -> Result<Post> {
    let id = format!("L{line_no}");
    match line.split_once('\t') {
        Some((label, text)) => {
            if !labeled {
                if let Ok(label) = label.trim().parse::<Label>() {
                    return Ok(Post::new(id, text, label));
                }
                return Ok(Post::new(id, line, Label::Negative));
            }
            Ok(Post::new(id, text, parse_label(label.trim(), line_no)?))
        }
        None if !labeled => Ok(Post::new(id, line, Label::Negative)),
        None => Err(Error::Parse {
            line: line_no,
            message: "expected `label<TAB>text`".to_string(),
        }),
    }
}

/// Lowercased word tokens. Letters and digits form tokens; an apostrophe
/// between two word characters stays inside the token, and a leading `#` or
/// `@` directly followed by a word character stays attached.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let next_is_word = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() {
            current.push(c);
        } else if (c == '\'' || c == '\u{2019}') && !current.is_empty() && next_is_word {
            current.push('\'');
        } else if (c == '#' || c == '@') && current.is_empty() && next_is_word {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Dense feature indices for every unigram and bigram, in first-seen order.
/// Bigrams are keyed as `"first second"`; tokens never contain whitespace.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct NgramVocab {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl NgramVocab {
    pub fn build<'a>(token_lists: impl IntoIterator<Item = &'a [String]>) -> Self {
        let mut vocab = NgramVocab::default();
        for tokens in token_lists {
            for gram in ngrams(tokens) {
                if !vocab.index.contains_key(&gram) {
                    vocab.index.insert(gram.clone(), vocab.terms.len());
                    vocab.terms.push(gram);
                }
            }
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, gram: &str) -> Option<usize> {
        self.index.get(gram).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Sorted, deduplicated indices of the known n-grams in `tokens`.
    pub fn features(&self, tokens: &[String]) -> Vec<usize> {
        let mut out: Vec<usize> = ngrams(tokens).filter_map(|g| self.get(&g)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl From<Vec<String>> for NgramVocab {
    fn from(terms: Vec<String>) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        NgramVocab { terms, index }
    }
}

impl From<NgramVocab> for Vec<String> {
    fn from(vocab: NgramVocab) -> Self {
        vocab.terms
    }
}

fn ngrams(tokens: &[String]) -> impl Iterator<Item = String> + '_ {
    tokens
        .iter()
        .cloned()
        .chain(tokens.windows(2).map(|w| format!("{} {}", w[0], w[1])))
}

pub fn ngram_vocab(corpus: &Corpus) -> NgramVocab {
    NgramVocab::build(corpus.posts().iter().map(|p| p.tokens.as_slice()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    /// Fold index per post, in corpus order. Panics if a post is not in the plan.
    pub fn folds_for(&self, corpus: &Corpus) -> Vec<usize> {
        corpus
            .posts()
            .iter()
            .map(|p| {
                self.fold_of(&p.id)
                    .unwrap_or_else(|| panic!("post {:?} missing from fold plan", p.id))
            })
            .collect()
    }

    /// Hex SHA-256 over k, seed and the sorted assignment.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("k={};seed={}\n", self.k, self.seed));
        for (id, fold) in &self.assignment {
            hasher.update(id.as_bytes());
            hasher.update(format!("\t{fold}\n"));
        }
        hex(&hasher.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn stratified_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if corpus.positive_count() < k {
        return Err(Error::TooFewExamples {
            class: "positive",
            count: corpus.positive_count(),
            k,
        });
    }
    if corpus.negative_count() < k {
        return Err(Error::TooFewExamples {
            class: "negative",
            count: corpus.negative_count(),
            k,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_order: Vec<usize> = (0..k).collect();
    fold_order.shuffle(&mut rng);

    let mut positives = Vec::with_capacity(corpus.positive_count());
    let mut negatives = Vec::with_capacity(corpus.negative_count());
    for (i, post) in corpus.posts().iter().enumerate() {
        if post.label.is_positive() {
            positives.push(i);
        } else {
            negatives.push(i);
        }
    }
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);

    // Negatives continue the deal where positives stopped so that fold sizes
    // differ by at most one.
    let mut assignment = BTreeMap::new();
    for (slot, &i) in positives.iter().chain(negatives.iter()).enumerate() {
        let fold = fold_order[slot % k];
        assignment.insert(corpus.posts()[i].id.clone(), fold);
    }
    Ok(FoldPlan {
        k,
        seed,
        assignment,
    })
}

/// Keeps every negative and `round(fraction * positives)` positives drawn
/// without replacement. Post order is preserved.
pub fn subsample_positives(corpus: &Corpus, fraction: f64, seed: u64) -> Result<Corpus> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!(
            "positive fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let mut positives: Vec<usize> = (0..corpus.len())
        .filter(|&i| corpus.posts()[i].label.is_positive())
        .collect();
    let keep = (fraction * positives.len() as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    positives.shuffle(&mut rng);
    let kept: HashSet<usize> = positives[..keep].iter().copied().collect();
    let indices: Vec<usize> = (0..corpus.len())
        .filter(|&i| !corpus.posts()[i].label.is_positive() || kept.contains(&i))
        .collect();
    Ok(corpus.subset(&indices))
}
