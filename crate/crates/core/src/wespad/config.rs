use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::LogRegConfig;
use crate::treebank::MiningOptions;

/// The feature groups of the joint vector, in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureGroup {
    #[serde(rename = "lex_feats")]
    Lex,
    #[serde(rename = "syn_feats")]
    Syn,
    /// Raw centroid components, used by the embedding baselines.
    #[serde(rename = "centroid")]
    Centroid,
    #[serde(rename = "we_partitioning")]
    WePartitioning,
    #[serde(rename = "we_distortion")]
    WeDistortion,
    #[serde(rename = "context_prev")]
    ContextPrev,
    #[serde(rename = "context_next")]
    ContextNext,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 7] = [
        FeatureGroup::Lex,
        FeatureGroup::Syn,
        FeatureGroup::Centroid,
        FeatureGroup::WePartitioning,
        FeatureGroup::WeDistortion,
        FeatureGroup::ContextPrev,
        FeatureGroup::ContextNext,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Lex => "lex_feats",
            FeatureGroup::Syn => "syn_feats",
            FeatureGroup::Centroid => "centroid",
            FeatureGroup::WePartitioning => "we_partitioning",
            FeatureGroup::WeDistortion => "we_distortion",
            FeatureGroup::ContextPrev => "context_prev",
            FeatureGroup::ContextNext => "context_next",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature group {s:?}")))
    }
}

/// Hyperparameters and feature toggles. Serialized as flat JSON; missing
/// keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WespadConfig {
    pub alpha: f64,
    pub alpha2: f64,
    pub k_partitions: usize,
    pub k2_partitions: usize,
    pub l2: f64,
    pub lex_feats: bool,
    pub syn_feats: bool,
    pub centroid_feats: bool,
    pub we_partitioning: bool,
    pub we_distortion: bool,
    pub context_prev: bool,
    pub context_next: bool,
    /// Build context flags from IG-weighted centroids (with `alpha2`, `k2`)
    /// instead of plain centroids.
    pub context_distorted: bool,
    pub min_support: usize,
    pub min_size: usize,
    pub max_pattern_size: Option<usize>,
    /// Mine positive and negative trees separately and merge the patterns.
    pub per_class_mining: bool,
    pub kmeans_restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for WespadConfig {
    fn default() -> Self {
        WespadConfig {
            alpha: 0.15,
            alpha2: 0.15,
            k_partitions: 4,
            k2_partitions: 4,
            l2: 1.0,
            lex_feats: true,
            syn_feats: true,
            centroid_feats: false,
            we_partitioning: true,
            we_distortion: true,
            context_prev: true,
            context_next: true,
            context_distorted: false,
            min_support: 10,
            min_size: 2,
            max_pattern_size: None,
            per_class_mining: false,
            kmeans_restarts: 5,
            max_iter: 200,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// The hyperparameters searched by the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub alpha: f64,
    pub alpha2: f64,
    pub k: usize,
    pub k2: usize,
}

impl WespadConfig {
    /// Only the unigram/bigram group enabled.
    pub fn lex_only() -> Self {
        WespadConfig {
            syn_feats: false,
            we_partitioning: false,
            we_distortion: false,
            context_prev: false,
            context_next: false,
            ..WespadConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha", self.alpha), ("alpha2", self.alpha2)] {
            if !(0.0..0.5).contains(&a) {
                return Err(Error::Config(format!(
                    "{name} must lie in [0, 0.5), got {a}"
                )));
            }
        }
        if self.k_partitions == 0 || self.k2_partitions == 0 {
            return Err(Error::Config(
                "partition counts must be at least 1".to_string(),
            ));
        }
        if self.min_support == 0 || self.min_size == 0 {
            return Err(Error::Config(
                "min_support and min_size must be at least 1".to_string(),
            ));
        }
        if self.l2.is_nan() || self.l2 < 0.0 {
            return Err(Error::Config(format!(
                "l2 must be non-negative, got {}",
                self.l2
            )));
        }
        Ok(())
    }

    pub fn enabled(&self, group: FeatureGroup) -> bool {
        match group {
            FeatureGroup::Lex => self.lex_feats,
            FeatureGroup::Syn => self.syn_feats,
            FeatureGroup::Centroid => self.centroid_feats,
            FeatureGroup::WePartitioning => self.we_partitioning,
            FeatureGroup::WeDistortion => self.we_distortion,
            FeatureGroup::ContextPrev => self.context_prev,
            FeatureGroup::ContextNext => self.context_next,
        }
    }

    pub fn set_enabled(&mut self, group: FeatureGroup, on: bool) {
        let slot = match group {
            FeatureGroup::Lex => &mut self.lex_feats,
            FeatureGroup::Syn => &mut self.syn_feats,
            FeatureGroup::Centroid => &mut self.centroid_feats,
            FeatureGroup::WePartitioning => &mut self.we_partitioning,
            FeatureGroup::WeDistortion => &mut self.we_distortion,
            FeatureGroup::ContextPrev => &mut self.context_prev,
            FeatureGroup::ContextNext => &mut self.context_next,
        };
        *slot = on;
    }

    pub fn region_params(&self) -> RegionParams {
        RegionParams {
            alpha: self.alpha,
            alpha2: self.alpha2,
            k: self.k_partitions,
            k2: self.k2_partitions,
        }
    }

    pub fn with_region_params(&self, params: RegionParams) -> Self {
        WespadConfig {
            alpha: params.alpha,
            alpha2: params.alpha2,
            k_partitions: params.k,
            k2_partitions: params.k2,
            ..self.clone()
        }
    }

    /// Whether any enabled group reads the region hyperparameters.
    pub fn uses_regions(&self) -> bool {
        self.we_partitioning || self.we_distortion || self.context_prev || self.context_next
    }

    pub fn logreg(&self) -> LogRegConfig {
        LogRegConfig {
            l2: self.l2,
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }

    pub fn mining(&self) -> MiningOptions {
        MiningOptions {
            min_support: self.min_support,
            min_size: self.min_size,
            max_size: self.max_pattern_size,
        }
    }
}
