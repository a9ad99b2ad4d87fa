//! Binary logistic regression and k-means, the two learners everything else
//! is built on.

mod kmeans;
mod logreg;
mod sparse;

pub use kmeans::{kmeans_assign, kmeans_fit, kmeans_fit_traced, KMeansConfig, PartitionModel};
pub use logreg::{
    logistic_objective, predict_proba, sigmoid, train_logreg, LinearModel, LogRegConfig,
};
pub use sparse::SparseVector;
