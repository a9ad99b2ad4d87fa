use serde::{Deserialize, Serialize};

use crate::embeddings::CentroidVector;
use crate::error::{Error, Result};
use crate::learners::{
    kmeans_fit, train_logreg, LinearModel, LogRegConfig, PartitionModel, SparseVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Regular,
    Distorted,
}

/// The single flag a region model can raise for one post.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionFlag {
    /// Classifier too unsure, or no embedding for the post.
    Off,
    Positive(usize),
    Negative(usize),
}

impl RegionFlag {
    /// `PFlag_j` is slot `j`, `NFlag_j` is slot `k + j`.
    pub fn slot(self, k: usize) -> Option<usize> {
        match self {
            RegionFlag::Off => None,
            RegionFlag::Positive(j) => Some(j),
            RegionFlag::Negative(j) => Some(k + j),
        }
    }
}

/// `PFlag` when `p >= 0.5 + alpha`, `NFlag` when `p <= 0.5 - alpha`, both
/// inclusive. At `alpha = 0` and `p = 0.5` both conditions hold; the
/// positive flag wins, matching the positive-on-tie prediction rule.
pub fn flag_for(p: f64, alpha: f64, partition: usize) -> RegionFlag {
    if p >= 0.5 + alpha {
        RegionFlag::Positive(partition)
    } else if p <= 0.5 - alpha {
        RegionFlag::Negative(partition)
    } else {
        RegionFlag::Off
    }
}

/// A centroid classifier plus a k-way partition of the same space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFlagModel {
    pub classifier: LinearModel,
    pub alpha: f64,
    pub partitioner: PartitionModel,
    pub space: Space,
}

impl RegionFlagModel {
    pub fn k(&self) -> usize {
        self.partitioner.k
    }

    /// Number of flag features, `2k`.
    pub fn width(&self) -> usize {
        2 * self.k()
    }

    pub fn probability(&self, v: &CentroidVector) -> f64 {
        self.classifier
            .predict_proba_dense(&v.values)
            .expect("centroid dimension matches the fitted model")
    }

    pub fn flag(&self, v: &CentroidVector) -> RegionFlag {
        self.flag_at(v, self.alpha)
    }

    pub fn flag_at(&self, v: &CentroidVector, alpha: f64) -> RegionFlag {
        if v.is_empty() {
            return RegionFlag::Off;
        }
        let partition = self
            .partitioner
            .assign(&v.values)
            .expect("centroid dimension matches the fitted model");
        flag_for(self.probability(v), alpha, partition)
    }

    /// The `2k` binary features: `PFlag_0..PFlag_{k-1}, NFlag_0..NFlag_{k-1}`.
    pub fn flags(&self, v: &CentroidVector) -> Vec<u8> {
        let mut out = vec![0; self.width()];
        if let Some(slot) = self.flag(v).slot(self.k()) {
            out[slot] = 1;
        }
        out
    }
}

/// The part of a region model that does not depend on `alpha` or `k`: the
/// non-empty training centroids and the classifier fitted on them.
#[derive(Debug, Clone)]
pub struct CentroidFit {
    pub points: Vec<Vec<f64>>,
    pub classifier: LinearModel,
}

impl CentroidFit {
    pub fn fit(vectors: &[CentroidVector], labels: &[bool], logreg: &LogRegConfig) -> Result<Self> {
        let (points, ys): (Vec<Vec<f64>>, Vec<bool>) = vectors
            .iter()
            .zip(labels)
            .filter(|(v, _)| !v.is_empty())
            .map(|(v, &y)| (v.values.clone(), y))
            .unzip();
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let rows: Vec<SparseVector> = points.iter().map(|p| SparseVector::from_dense(p)).collect();
        let classifier = train_logreg(&rows, &ys, logreg)?;
        Ok(CentroidFit { points, classifier })
    }

    pub fn with_partitions(
        &self,
        alpha: f64,
        k: usize,
        seed: u64,
        space: Space,
        restarts: usize,
    ) -> Result<RegionFlagModel> {
        check_alpha(alpha)?;
        let partitioner = kmeans_fit(&self.points, k, seed, restarts)?;
        Ok(RegionFlagModel {
            classifier: self.classifier.clone(),
            alpha,
            partitioner,
            space,
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::Config(format!(
            "alpha must lie in [0, 0.5), got {alpha}"
        )));
    }
    Ok(())
}

/// Fits the centroid classifier and the partitioner on the non-empty
/// vectors. One global classifier serves all partitions.
#[allow(clippy::too_many_arguments)]
pub fn fit_region_model(
    vectors: &[CentroidVector],
    labels: &[bool],
    alpha: f64,
    k: usize,
    seed: u64,
    space: Space,
    logreg: &LogRegConfig,
    restarts: usize,
) -> Result<RegionFlagModel> {
    check_alpha(alpha)?;
    CentroidFit::fit(vectors, labels, logreg)?.with_partitions(alpha, k, seed, space, restarts)
}
