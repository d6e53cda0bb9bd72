//! Class-weighted logistic regression and feed-forward network classifiers.

mod adam;
mod loss;
mod network;
mod threshold;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use loss::{
    balanced_bce_loss, balanced_bce_term, clamp_prob, AlphaMode, BalancedLossConfig, PROB_EPS,
};
pub use network::{sigmoid, DenseLayer, LayerDocument, Network, NetworkDocument};
pub use threshold::{tune_threshold, TunedThreshold};
pub use train::{
    classify, predict, train, EpochRecord, ModelDocument, ModelKind, SplitView, TrainConfig,
    TrainedModel, FFNN_HIDDEN,
};
