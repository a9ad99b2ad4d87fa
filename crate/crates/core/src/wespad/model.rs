use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{FeatureGroup, RegionParams, WespadConfig};
use super::ig::{compute_ig, IGWeights};
use super::region::{CentroidFit, RegionFlagModel, Space};
use crate::corpus::{hex, tokenize, Corpus, Label, NgramVocab, Post};
use crate::embeddings::{
    centroid, weighted_centroid, CentroidVector, EmbeddingTable, NeighborIndex,
};
use crate::error::{Error, Result};
use crate::learners::{train_logreg, LinearModel, LogRegConfig, SparseVector};
use crate::treebank::{
    mine_frequent_subtrees, mine_per_class, DependencyForest, PatternSet, Treebank,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpan {
    pub group: FeatureGroup,
    pub offset: usize,
    pub size: usize,
}

/// Where each enabled group lives in the joint feature vector.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub spans: Vec<GroupSpan>,
    pub dim: usize,
}

impl FeatureLayout {
    fn push(&mut self, group: FeatureGroup, size: usize) {
        self.spans.push(GroupSpan {
            group,
            offset: self.dim,
            size,
        });
        self.dim += size;
    }

    pub fn span(&self, group: FeatureGroup) -> Option<GroupSpan> {
        self.spans.iter().copied().find(|s| s.group == group)
    }
}

/// Everything fitted before the final classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureExtractor {
    pub config: WespadConfig,
    pub embedding_dim: usize,
    pub layout: FeatureLayout,
    pub vocab: NgramVocab,
    pub patterns: PatternSet,
    pub ig: Option<IGWeights>,
    pub regular: Option<RegionFlagModel>,
    pub distorted: Option<RegionFlagModel>,
    pub context_prev: Option<RegionFlagModel>,
    pub context_next: Option<RegionFlagModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WespadModel {
    pub extractor: FeatureExtractor,
    pub final_classifier: LinearModel,
    /// SHA-256 over the sorted ids of the training posts.
    pub training_digest: String,
}

impl WespadModel {
    pub fn config(&self) -> &WespadConfig {
        &self.extractor.config
    }

    pub fn layout(&self) -> &FeatureLayout {
        &self.extractor.layout
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub probability: f64,
}

impl Prediction {
    /// Positive when `probability >= 0.5`.
    pub fn from_probability(probability: f64) -> Self {
        Prediction {
            label: Label::from_bool(probability >= 0.5),
            probability,
        }
    }
}

/// Binds a fitted extractor to the embedding table it was fitted with.
pub struct Featurizer<'a> {
    extractor: &'a FeatureExtractor,
    table: &'a EmbeddingTable,
    neighbors: Option<NeighborIndex>,
}

impl<'a> Featurizer<'a> {
    pub fn new(extractor: &'a FeatureExtractor, table: &'a EmbeddingTable) -> Result<Self> {
        if table.dim() != extractor.embedding_dim {
            return Err(Error::VectorDimension {
                expected: extractor.embedding_dim,
                found: table.dim(),
            });
        }
        let neighbors = extractor.ig.as_ref().map(|ig| ig.neighbor_index(table));
        Ok(Featurizer {
            extractor,
            table,
            neighbors,
        })
    }

    pub fn regular_centroid(&self, tokens: &[String]) -> CentroidVector {
        centroid(tokens, self.table)
    }

    /// IG-weighted centroid; words unseen in training borrow the gain of
    /// their nearest training word.
    pub fn distorted_centroid(&self, tokens: &[String]) -> CentroidVector {
        match (&self.extractor.ig, &self.neighbors) {
            (Some(ig), Some(neighbors)) => {
                weighted_centroid(tokens, self.table, |w| ig.lookup(w, neighbors, self.table))
            }
            _ => centroid(tokens, self.table),
        }
    }

    fn context_centroid(&self, text: Option<&str>) -> Option<CentroidVector> {
        let tokens = tokenize(text?);
        Some(if self.extractor.config.context_distorted {
            self.distorted_centroid(&tokens)
        } else {
            self.regular_centroid(&tokens)
        })
    }

    fn flags(
        model: Option<&RegionFlagModel>,
        v: Option<&CentroidVector>,
        width: usize,
    ) -> SparseVector {
        match (model, v) {
            (Some(m), Some(v)) => {
                let slot = m.flag(v).slot(m.k());
                SparseVector::from_entries(width, slot.map(|s| (s, 1.0)))
            }
            _ => SparseVector::new(width),
        }
    }

    /// Values of one group, indexed from zero within the group.
    pub fn group_features(
        &self,
        group: FeatureGroup,
        post: &Post,
        forest: Option<&DependencyForest>,
    ) -> SparseVector {
        let ex = self.extractor;
        let size = ex.layout.span(group).map_or(0, |s| s.size);
        match group {
            FeatureGroup::Lex => SparseVector::from_entries(
                size,
                ex.vocab
                    .features(&post.tokens)
                    .into_iter()
                    .map(|i| (i, 1.0)),
            ),
            FeatureGroup::Syn => SparseVector::from_entries(
                size,
                ex.patterns.features(forest).into_iter().map(|i| (i, 1.0)),
            ),
            FeatureGroup::Centroid => {
                SparseVector::from_dense(&self.regular_centroid(&post.tokens).values)
            }
            FeatureGroup::WePartitioning => {
                let v = self.regular_centroid(&post.tokens);
                Self::flags(ex.regular.as_ref(), Some(&v), size)
            }
            FeatureGroup::WeDistortion => {
                let v = self.distorted_centroid(&post.tokens);
                Self::flags(ex.distorted.as_ref(), Some(&v), size)
            }
            FeatureGroup::ContextPrev => {
                let v = self.context_centroid(post.prev_text.as_deref());
                Self::flags(ex.context_prev.as_ref(), v.as_ref(), size)
            }
            FeatureGroup::ContextNext => {
                let v = self.context_centroid(post.next_text.as_deref());
                Self::flags(ex.context_next.as_ref(), v.as_ref(), size)
            }
        }
    }

    /// The joint feature vector: enabled groups concatenated in layout order.
    pub fn featurize(&self, post: &Post, forest: Option<&DependencyForest>) -> SparseVector {
        let mut out = SparseVector::new(0);
        for span in &self.extractor.layout.spans {
            out.extend_with(&self.group_features(span.group, post, forest));
        }
        out
    }
}

/// Featurizer plus final classifier.
pub struct Predictor<'a> {
    model: &'a WespadModel,
    featurizer: Featurizer<'a>,
}

impl<'a> Predictor<'a> {
    pub fn new(model: &'a WespadModel, table: &'a EmbeddingTable) -> Result<Self> {
        Ok(Predictor {
            model,
            featurizer: Featurizer::new(&model.extractor, table)?,
        })
    }

    pub fn featurizer(&self) -> &Featurizer<'a> {
        &self.featurizer
    }

    pub fn featurize(&self, post: &Post, forest: Option<&DependencyForest>) -> SparseVector {
        self.featurizer.featurize(post, forest)
    }

    pub fn predict(&self, post: &Post, forest: Option<&DependencyForest>) -> Prediction {
        let x = self.featurize(post, forest);
        let p = self
            .model
            .final_classifier
            .predict_proba(&x)
            .expect("feature vector matches the fitted layout");
        Prediction::from_probability(p)
    }

    pub fn predict_corpus(&self, corpus: &Corpus, trees: &Treebank) -> Vec<Prediction> {
        corpus
            .posts()
            .iter()
            .map(|p| self.predict(p, trees.get(&p.id)))
            .collect()
    }
}

pub fn featurize(
    post: &Post,
    model: &WespadModel,
    table: &EmbeddingTable,
    forest: Option<&DependencyForest>,
) -> Result<SparseVector> {
    Ok(Featurizer::new(&model.extractor, table)?.featurize(post, forest))
}

pub fn predict(
    model: &WespadModel,
    post: &Post,
    table: &EmbeddingTable,
    forest: Option<&DependencyForest>,
) -> Result<Prediction> {
    Ok(Predictor::new(model, table)?.predict(post, forest))
}

fn training_digest(train: &Corpus) -> String {
    let mut ids: Vec<&str> = train.posts().iter().map(|p| p.id.as_str()).collect();
    ids.sort_unstable();
    let mut hasher = Sha256::new();
    for id in ids {
        hasher.update(id.as_bytes());
        hasher.update(b"\n");
    }
    hex(&hasher.finalize())
}

/// Everything a fit computes before the region hyperparameters come into
/// play. One preparation serves every grid point of a search.
pub struct PreparedFit<'a> {
    train: &'a Corpus,
    table: &'a EmbeddingTable,
    trees: &'a Treebank,
    config: WespadConfig,
    labels: Vec<bool>,
    vocab: NgramVocab,
    patterns: PatternSet,
    ig: Option<IGWeights>,
    regular: Option<CentroidFit>,
    distorted: Option<CentroidFit>,
    context_prev: Option<CentroidFit>,
    context_next: Option<CentroidFit>,
}

impl<'a> PreparedFit<'a> {
    pub fn new(
        train: &'a Corpus,
        config: &WespadConfig,
        table: &'a EmbeddingTable,
        trees: &'a Treebank,
    ) -> Result<Self> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let labels: Vec<bool> = train
            .posts()
            .iter()
            .map(|p| p.label.is_positive())
            .collect();

        let vocab = if config.lex_feats {
            NgramVocab::build(train.posts().iter().map(|p| p.tokens.as_slice()))
        } else {
            NgramVocab::default()
        };

        let patterns = if config.syn_feats {
            mine_training_patterns(train, trees, config)
        } else {
            PatternSet::default()
        };

        let needs_ig = config.we_distortion
            || (config.context_distorted && (config.context_prev || config.context_next));
        let ig = if needs_ig {
            Some(compute_ig(train)?)
        } else {
            None
        };

        let mut prepared = PreparedFit {
            train,
            table,
            trees,
            config: config.clone(),
            labels,
            vocab,
            patterns,
            ig,
            regular: None,
            distorted: None,
            context_prev: None,
            context_next: None,
        };
        let logreg = config.logreg();
        let scratch = prepared.extractor(FeatureLayout::default());
        let featurizer = Featurizer::new(&scratch, table)?;
        let mut regular = None;
        let mut distorted = None;
        let mut context_prev = None;
        let mut context_next = None;
        if config.we_partitioning {
            let vectors: Vec<CentroidVector> = train
                .posts()
                .iter()
                .map(|p| featurizer.regular_centroid(&p.tokens))
                .collect();
            regular = Some(CentroidFit::fit(&vectors, &prepared.labels, &logreg)?);
        }
        if config.we_distortion {
            let vectors: Vec<CentroidVector> = train
                .posts()
                .iter()
                .map(|p| featurizer.distorted_centroid(&p.tokens))
                .collect();
            distorted = Some(CentroidFit::fit(&vectors, &prepared.labels, &logreg)?);
        }
        if config.context_prev {
            context_prev = fit_context(train, &featurizer, |p| p.prev_text.as_deref(), &logreg)?;
        }
        if config.context_next {
            context_next = fit_context(train, &featurizer, |p| p.next_text.as_deref(), &logreg)?;
        }
        prepared.regular = regular;
        prepared.distorted = distorted;
        prepared.context_prev = context_prev;
        prepared.context_next = context_next;
        Ok(prepared)
    }

    fn extractor(&self, layout: FeatureLayout) -> FeatureExtractor {
        FeatureExtractor {
            config: self.config.clone(),
            embedding_dim: self.table.dim(),
            layout,
            vocab: self.vocab.clone(),
            patterns: self.patterns.clone(),
            ig: self.ig.clone(),
            regular: None,
            distorted: None,
            context_prev: None,
            context_next: None,
        }
    }

    /// Partitions, flags and the final classifier for one setting of the
    /// region hyperparameters.
    pub fn finish(&self, params: RegionParams) -> Result<WespadModel> {
        let config = self.config.with_region_params(params);
        config.validate()?;
        let restarts = config.kmeans_restarts;
        let seed = config.seed;
        let (context_alpha, context_k, context_space) = if config.context_distorted {
            (config.alpha2, config.k2_partitions, Space::Distorted)
        } else {
            (config.alpha, config.k_partitions, Space::Regular)
        };

        let mut layout = FeatureLayout::default();
        for group in FeatureGroup::ALL {
            if !config.enabled(group) {
                continue;
            }
            let size = match group {
                FeatureGroup::Lex => self.vocab.len(),
                FeatureGroup::Syn => self.patterns.len(),
                FeatureGroup::Centroid => self.table.dim(),
                FeatureGroup::WePartitioning => 2 * config.k_partitions,
                FeatureGroup::WeDistortion => 2 * config.k2_partitions,
                FeatureGroup::ContextPrev | FeatureGroup::ContextNext => 2 * context_k,
            };
            layout.push(group, size);
        }

        let mut extractor = self.extractor(layout);
        extractor.config = config.clone();
        if let Some(fit) = &self.regular {
            extractor.regular = Some(fit.with_partitions(
                config.alpha,
                config.k_partitions,
                seed,
                Space::Regular,
                restarts,
            )?);
        }
        if let Some(fit) = &self.distorted {
            extractor.distorted = Some(fit.with_partitions(
                config.alpha2,
                config.k2_partitions,
                seed.wrapping_add(1),
                Space::Distorted,
                restarts,
            )?);
        }
        // Too few context posts to partition: the group stays in the layout
        // but never fires.
        let context = |fit: &Option<CentroidFit>, offset: u64| -> Result<Option<RegionFlagModel>> {
            match fit {
                Some(fit) if fit.points.len() >= context_k => fit
                    .with_partitions(
                        context_alpha,
                        context_k,
                        seed.wrapping_add(offset),
                        context_space,
                        restarts,
                    )
                    .map(Some),
                _ => Ok(None),
            }
        };
        extractor.context_prev = context(&self.context_prev, 2)?;
        extractor.context_next = context(&self.context_next, 3)?;

        let featurizer = Featurizer::new(&extractor, self.table)?;
        let rows: Vec<SparseVector> = self
            .train
            .posts()
            .iter()
            .map(|p| featurizer.featurize(p, self.trees.get(&p.id)))
            .collect();
        let final_classifier = train_logreg(&rows, &self.labels, &config.logreg())?;

        Ok(WespadModel {
            extractor,
            final_classifier,
            training_digest: training_digest(self.train),
        })
    }
}

fn mine_training_patterns(train: &Corpus, trees: &Treebank, config: &WespadConfig) -> PatternSet {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for post in train.posts() {
        if let Some(forest) = trees.get(&post.id) {
            let bucket = if post.label.is_positive() {
                &mut pos
            } else {
                &mut neg
            };
            bucket.extend(forest.sentences.iter());
        }
    }
    let mined = if config.per_class_mining {
        mine_per_class(&pos, &neg, config.mining())
    } else {
        let all: Vec<_> = pos.iter().chain(&neg).copied().collect();
        mine_frequent_subtrees(&all, config.mining())
    };
    PatternSet::new(mined)
}

fn fit_context(
    train: &Corpus,
    featurizer: &Featurizer<'_>,
    text: impl Fn(&Post) -> Option<&str>,
    logreg: &LogRegConfig,
) -> Result<Option<CentroidFit>> {
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for post in train.posts() {
        if let Some(v) = featurizer.context_centroid(text(post)) {
            if !v.is_empty() {
                vectors.push(v);
                labels.push(post.label.is_positive());
            }
        }
    }
    if vectors.is_empty() {
        return Ok(None);
    }
    CentroidFit::fit(&vectors, &labels, logreg).map(Some)
}

/// Fits every enabled component on `train`, then the final classifier on
/// the assembled training vectors.
pub fn fit_wespad(
    train: &Corpus,
    config: &WespadConfig,
    table: &EmbeddingTable,
    trees: &Treebank,
) -> Result<WespadModel> {
    PreparedFit::new(train, config, table, trees)?.finish(config.region_params())
}

pub const BUNDLE_FORMAT: &str = "wespad-model";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: String,
    pub version: u32,
    pub model: WespadModel,
}

impl ModelBundle {
    pub fn new(model: WespadModel) -> Self {
        ModelBundle {
            format: BUNDLE_FORMAT.to_string(),
            version: BUNDLE_VERSION,
            model,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Rejects anything that is not a bundle of the supported version.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_slice(bytes)
            .map_err(|e| Error::Bundle(format!("not a model bundle: {e}")))?;
        if header.format != BUNDLE_FORMAT {
            return Err(Error::Bundle(format!(
                "unexpected bundle format {:?}",
                header.format
            )));
        }
        if header.version != BUNDLE_VERSION {
            return Err(Error::Bundle(format!(
                "bundle version {} is not supported (expected {BUNDLE_VERSION})",
                header.version
            )));
        }
        serde_json::from_slice(bytes).map_err(|e| Error::Bundle(format!("corrupted bundle: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{positive_class_metrics, Fixture, FixtureSpec};

    fn small() -> Fixture {
        Fixture::generate(&FixtureSpec::small(5)).unwrap()
    }

    fn small_config() -> WespadConfig {
        WespadConfig {
            k_partitions: 2,
            k2_partitions: 2,
            min_support: 3,
            ..WespadConfig::default()
        }
    }

    fn training_f1(model: &WespadModel, fx: &Fixture) -> f64 {
        let pred: Vec<Label> = Predictor::new(model, &fx.table)
            .unwrap()
            .predict_corpus(&fx.corpus, &fx.trees)
            .into_iter()
            .map(|p| p.label)
            .collect();
        positive_class_metrics(&pred, &fx.corpus.labels())
            .unwrap()
            .f1
    }

    #[test]
    fn full_model_fits_training_data_at_least_as_well_as_lex() {
        let fx = small();
        let full = fit_wespad(&fx.corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let lex = fit_wespad(&fx.corpus, &WespadConfig::lex_only(), &fx.table, &fx.trees).unwrap();
        assert!(training_f1(&full, &fx) >= training_f1(&lex, &fx));
        assert_eq!(lex.layout().spans.len(), 1);
        assert_eq!(lex.layout().dim, lex.extractor.vocab.len());
    }

    #[test]
    fn layout_offsets() {
        let fx = small();
        let m = fit_wespad(&fx.corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let groups: Vec<FeatureGroup> = m.layout().spans.iter().map(|s| s.group).collect();
        assert_eq!(
            groups,
            vec![
                FeatureGroup::Lex,
                FeatureGroup::Syn,
                FeatureGroup::WePartitioning,
                FeatureGroup::WeDistortion,
                FeatureGroup::ContextPrev,
                FeatureGroup::ContextNext
            ]
        );
        let mut offset = 0;
        for s in &m.layout().spans {
            assert_eq!(s.offset, offset);
            offset += s.size;
        }
        assert_eq!(m.layout().dim, offset);
        assert_eq!(
            m.layout().span(FeatureGroup::WePartitioning).unwrap().size,
            4
        );
    }

    #[test]
    fn missing_trees_and_context_zero_their_groups() {
        let fx = small();
        let m = fit_wespad(&fx.corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let f = Featurizer::new(&m.extractor, &fx.table).unwrap();
        let post = Post::new("x", fx.corpus.posts()[0].text.clone(), Label::Positive);
        for group in [
            FeatureGroup::Syn,
            FeatureGroup::ContextPrev,
            FeatureGroup::ContextNext,
        ] {
            assert_eq!(f.group_features(group, &post, None).nnz(), 0);
        }
        assert!(f.group_features(FeatureGroup::Lex, &post, None).nnz() > 0);
        assert!(
            f.group_features(FeatureGroup::WePartitioning, &post, None)
                .nnz()
                <= 1
        );

        let empty = Post::new("e", "", Label::Negative);
        assert_eq!(f.featurize(&empty, None).nnz(), 0);
    }

    #[test]
    fn token_multisets_share_lex_and_partition_features() {
        let fx = small();
        let m = fit_wespad(&fx.corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let f = Featurizer::new(&m.extractor, &fx.table).unwrap();
        let a = Post::new("a", "w1 s0 w2 s0", Label::Positive);
        let b = Post::new("b", "w1 s0 w2 s0", Label::Negative);
        for group in [
            FeatureGroup::Lex,
            FeatureGroup::WePartitioning,
            FeatureGroup::WeDistortion,
        ] {
            assert_eq!(
                f.group_features(group, &a, None),
                f.group_features(group, &b, None)
            );
        }
    }

    #[test]
    fn removing_a_group_leaves_the_others_unchanged() {
        let fx = small();
        let full = fit_wespad(&fx.corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let ff = Featurizer::new(&full.extractor, &fx.table).unwrap();
        for removed in FeatureGroup::ALL {
            let mut config = small_config();
            config.set_enabled(removed, false);
            let reduced = fit_wespad(&fx.corpus, &config, &fx.table, &fx.trees).unwrap();
            let rf = Featurizer::new(&reduced.extractor, &fx.table).unwrap();
            assert!(reduced.layout().span(removed).is_none());
            for span in &reduced.layout().spans {
                for post in fx.corpus.posts() {
                    let forest = fx.trees.get(&post.id);
                    assert_eq!(
                        ff.group_features(span.group, post, forest),
                        rf.group_features(span.group, post, forest),
                        "{:?} changed after removing {removed:?}",
                        span.group
                    );
                }
            }
        }
    }

    #[test]
    fn duplicated_positive_post_is_predicted_positive() {
        let fx = small();
        let mut posts = fx.corpus.posts().to_vec();
        let text = "w3 t1w2 sx5 s1 w7";
        for i in 0..10 {
            posts.push(Post::new(format!("dup{i}"), text, Label::Positive));
        }
        let corpus = Corpus::new(posts).unwrap();
        let m = fit_wespad(&corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let p = predict(&m, &Post::new("q", text, Label::Negative), &fx.table, None).unwrap();
        assert_eq!(p.label, Label::Positive);
    }

    #[test]
    fn zero_weights_give_one_half_and_positive() {
        let fx = small();
        let mut m =
            fit_wespad(&fx.corpus, &WespadConfig::lex_only(), &fx.table, &fx.trees).unwrap();
        m.final_classifier = LinearModel::zeros(m.layout().dim);
        let p = predict(&m, &fx.corpus.posts()[3], &fx.table, None).unwrap();
        assert_eq!(p.probability, 0.5);
        assert_eq!(p.label, Label::Positive);
    }

    #[test]
    fn table_dimension_checked() {
        let fx = small();
        let m = fit_wespad(&fx.corpus, &WespadConfig::lex_only(), &fx.table, &fx.trees).unwrap();
        let other = EmbeddingTable::from_pairs(3, [("a", vec![1.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(
            Featurizer::new(&m.extractor, &other),
            Err(Error::VectorDimension {
                expected: 50,
                found: 3
            })
        ));
    }

    #[test]
    fn bundle_round_trip() {
        let fx = small();
        let m = fit_wespad(&fx.corpus, &small_config(), &fx.table, &fx.trees).unwrap();
        let bundle = ModelBundle::new(m.clone());
        let bytes = bundle.to_bytes().unwrap();
        let back = ModelBundle::from_bytes(&bytes).unwrap();
        assert_eq!(back.model, m);
        assert_eq!(back.to_bytes().unwrap(), bytes);
        let a = Featurizer::new(&m.extractor, &fx.table).unwrap();
        let b = Featurizer::new(&back.model.extractor, &fx.table).unwrap();
        for post in fx.corpus.posts() {
            let forest = fx.trees.get(&post.id);
            assert_eq!(a.featurize(post, forest), b.featurize(post, forest));
        }
    }

    #[test]
    fn bundle_rejections() {
        let fx = small();
        let m = fit_wespad(&fx.corpus, &WespadConfig::lex_only(), &fx.table, &fx.trees).unwrap();
        let bytes = ModelBundle::new(m).to_bytes().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let newer = text.replacen("\"version\":1", "\"version\":2", 1);
        assert!(
            matches!(ModelBundle::from_bytes(newer.as_bytes()), Err(Error::Bundle(m)) if m.contains("version 2"))
        );
        assert!(matches!(
            ModelBundle::from_bytes(&bytes[..bytes.len() / 2]),
            Err(Error::Bundle(_))
        ));
        let broken = text.replacen("\"final_classifier\"", "\"final_classifer\"", 1);
        assert!(matches!(
            ModelBundle::from_bytes(broken.as_bytes()),
            Err(Error::Bundle(_))
        ));
    }
}
