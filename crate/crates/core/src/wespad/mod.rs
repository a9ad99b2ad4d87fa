mod config;
mod ig;
mod model;
mod region;

pub use config::{FeatureGroup, RegionParams, WespadConfig};
pub use ig::{binary_entropy, compute_ig, ig_lookup, IGWeights};
pub use model::{
    featurize, fit_wespad, predict, FeatureExtractor, FeatureLayout, Featurizer, GroupSpan,
    ModelBundle, Prediction, Predictor, PreparedFit, WespadModel, BUNDLE_FORMAT, BUNDLE_VERSION,
};
pub use region::{fit_region_model, flag_for, CentroidFit, RegionFlag, RegionFlagModel, Space};
