//! Personal health mention classification with word-embedding region
//! features.
//!
//! A post is represented by its unigrams and bigrams, frequent dependency
//! subtrees, and a handful of binary flags derived from where the post's
//! embedding centroid falls: a centroid classifier marks confident positive
//! or negative regions (suppressing flags where it is unsure), k-means
//! partitions route each flag to a region-specific slot, and the same
//! construction is repeated on information-gain weighted centroids and on
//! the author's previous and next posts. A logistic regression over the
//! concatenated features makes the final call.

pub mod cli;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod learners;
pub mod treebank;
pub mod wespad;

pub use error::{Error, Result};
