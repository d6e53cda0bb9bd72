use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use super::loss::{balanced_bce_loss, AlphaMode, BalancedLossConfig};
use super::network::{Network, NetworkDocument};
use super::threshold::tune_threshold;
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64};

/// Hidden layer widths of the feed-forward network.
pub const FFNN_HIDDEN: [usize; 3] = [60, 60, 60];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    LogReg,
    Ffnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::LogReg, ModelKind::Ffnn];

    pub fn dims(self, inputs: usize) -> Vec<usize> {
        match self {
            ModelKind::LogReg => vec![inputs, 1],
            ModelKind::Ffnn => {
                let mut d = vec![inputs];
                d.extend(FFNN_HIDDEN);
                d.push(1);
                d
            }
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::LogReg => "logreg",
            ModelKind::Ffnn => "ffnn",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" | "lr" => Ok(ModelKind::LogReg),
            "ffnn" | "nn" => Ok(ModelKind::Ffnn),
            other => Err(Error::Parameter(format!(
                "unknown model {other:?} (expected logreg or ffnn)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub alpha_mode: AlphaMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 256,
            adam: AdamConfig::default(),
            max_epochs: 200,
            patience: 10,
            seed: 0,
            alpha_mode: AlphaMode::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let a = &self.adam;
        if self.batch_size == 0 {
            return Err(Error::Parameter("batch size must be at least 1".into()));
        }
        if self.patience == 0 || self.max_epochs == 0 {
            return Err(Error::Parameter(
                "patience and max epochs must be at least 1".into(),
            ));
        }
        if !(a.learning_rate > 0.0 && a.epsilon > 0.0) {
            return Err(Error::Parameter(
                "learning rate and epsilon must be positive".into(),
            ));
        }
        if !((0.0..1.0).contains(&a.beta1) && (0.0..1.0).contains(&a.beta2)) {
            return Err(Error::Parameter("Adam betas must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean balanced loss over the epoch's mini-batches.
    pub train_loss: f64,
    pub val_loss: f64,
}

/// A fitted classifier with its F1-tuned decision threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub network: Network,
    pub threshold: f64,
    /// Training-set F1 at `threshold`.
    pub train_f1: f64,
    pub alpha: f64,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
    pub config: TrainConfig,
}

/// Borrowed features and labels of one split.
#[derive(Debug, Clone, Copy)]
pub struct SplitView<'a> {
    pub features: ArrayView2<'a, f64>,
    pub labels: &'a [u8],
}

impl<'a> SplitView<'a> {
    pub fn new(features: ArrayView2<'a, f64>, labels: &'a [u8]) -> Result<Self> {
        Error::check_len(features.nrows(), labels.len())?;
        if labels.is_empty() {
            return Err(Error::Precondition("split is empty".into()));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::Parameter("labels must be 0 or 1".into()));
        }
        Ok(Self { features, labels })
    }
}

/// Adam mini-batch training with early stopping on the validation loss.
pub fn train(
    kind: ModelKind,
    train: SplitView<'_>,
    validation: SplitView<'_>,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    Error::check_len(train.features.ncols(), validation.features.ncols())?;
    let alpha = BalancedLossConfig::from_labels(train.labels, config.alpha_mode)?.alpha;
    let dims = kind.dims(train.features.ncols());
    let mut net = match kind {
        ModelKind::LogReg => Network::zeros(&dims)?,
        ModelKind::Ffnn => Network::he_init(&dims, config.seed)?,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_ba7c);
    let mut adam = AdamState::new(net.param_count());
    let mut order: Vec<usize> = (0..train.labels.len()).collect();
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, net.clone(), 0usize);
    let mut stale = 0;

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let x = train.features.select(Axis(0), batch);
            let y: Vec<u8> = batch.iter().map(|&i| train.labels[i]).collect();
            let (loss, grad) = net.loss_and_gradient(x.view(), &y, alpha)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            loss_sum += loss * batch.len() as f64;
            adam.step(net.param_slices_mut(), grad.param_slices(), &config.adam);
        }
        let train_loss = loss_sum / order.len() as f64;
        let val_probs = net.forward(validation.features)?;
        let val_loss = balanced_bce_loss(validation.labels, &val_probs, alpha)?;
        if !val_loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        log::debug!("{kind} epoch {epoch}: train {train_loss:.6} val {val_loss:.6}");
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
        if val_loss < best.0 {
            best = (val_loss, net.clone(), epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    let (_, network, best_epoch) = best;
    let train_probs = network.forward(train.features)?;
    let tuned = tune_threshold(&train_probs, train.labels)?;
    log::info!(
        "{kind}: best epoch {best_epoch} of {}, threshold {:.4}, train F1 {:.4}",
        history.len(),
        tuned.threshold,
        tuned.f1
    );
    Ok(TrainedModel {
        kind,
        network,
        threshold: tuned.threshold,
        train_f1: tuned.f1,
        alpha,
        best_epoch,
        history,
        config: config.clone(),
    })
}

/// Predicted default probabilities for each row.
pub fn predict(model: &TrainedModel, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    model.network.forward(x)
}

/// Classes by the strict rule `p > threshold`.
pub fn classify(probs: &[f64], threshold: f64) -> Vec<u8> {
    probs.iter().map(|&p| u8::from(p > threshold)).collect()
}

impl TrainedModel {
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        predict(self, x)
    }

    pub fn predict_classes(&self, x: ArrayView2<'_, f64>) -> Result<Vec<u8>> {
        Ok(classify(&self.predict(x)?, self.threshold))
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            kind: self.kind,
            network: NetworkDocument::from(&self.network),
            threshold: self.threshold,
            train_f1: self.train_f1,
            alpha: self.alpha,
            best_epoch: self.best_epoch,
            seed: self.config.seed,
            config: self.config.clone(),
        }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_json(path, &self.to_document())
    }

    /// The history is not part of the JSON document; it comes back empty.
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let doc: ModelDocument = io::read_json(path)?;
        Self::try_from(doc)
    }

    pub fn write_history_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = io::csv_writer(path)?;
        w.write_record(["epoch", "train_loss", "val_loss"])?;
        for r in &self.history {
            w.write_record([
                r.epoch.to_string(),
                fmt_f64(r.train_loss),
                fmt_f64(r.val_loss),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// JSON form of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub kind: ModelKind,
    pub network: NetworkDocument,
    pub threshold: f64,
    pub train_f1: f64,
    pub alpha: f64,
    pub best_epoch: usize,
    pub seed: u64,
    pub config: TrainConfig,
}

impl TryFrom<ModelDocument> for TrainedModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        if !(0.0..=1.0).contains(&doc.threshold) {
            return Err(Error::Parameter(format!(
                "threshold {} outside [0, 1]",
                doc.threshold
            )));
        }
        let network = Network::try_from(doc.network)?;
        let expected = doc.kind.dims(network.input_dim());
        if network.dims() != expected {
            return Err(Error::Parameter(format!(
                "{} model has layer dims {:?}, expected {expected:?}",
                doc.kind,
                network.dims()
            )));
        }
        Ok(Self {
            kind: doc.kind,
            network,
            threshold: doc.threshold,
            train_f1: doc.train_f1,
            alpha: doc.alpha,
            best_epoch: doc.best_epoch,
            history: Vec::new(),
            config: doc.config,
        })
    }
}
