//! Architectures, the training loop, and checkpoint persistence.
//!
//! Three variants share one dense topology family:
//!
//! * **Simple AE** — `[input, hidden, latent, hidden, input]`.
//! * **Deep AE** — a ladder that narrows by exactly one unit per layer from
//!   `input` down to `latent` and widens back symmetrically.
//! * **SDAE** — the Deep AE topology trained with the combined
//!   supervised + reconstruction loss (labels required).
//!
//! Training is plain mini-batch SGD with a full per-epoch shuffle from a
//! seeded RNG, so a `(seed, config, data)` triple fully determines the
//! trained network, bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Normalizer, Record};
use crate::error::{Error, Result};
use crate::loss::{combined_loss, loss_gradients, mse, mse_grad, LossConfig, SupervisedLabel};
use crate::nn::{init_network, Activation, DenseLayer, GradientSet, Network};

/// The three supported architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchKind {
    SimpleAe,
    DeepAe,
    Sdae,
}

impl ArchKind {
    /// SDAE trains with the combined loss and requires labels.
    pub fn is_supervised(self) -> bool {
        matches!(self, ArchKind::Sdae)
    }
}

/// Dimensions of one architecture.
///
/// Defaults follow the canonical tabular setup: 13 inputs, a 6-unit hidden
/// layer for the simple variant, and a 2-unit latent space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureSpec {
    pub kind: ArchKind,
    pub input_dim: usize,
    /// Width of the single hidden layer; used by `SimpleAe` only.
    pub hidden_dim: usize,
    pub latent_dim: usize,
}

impl ArchitectureSpec {
    /// The default geometry for `kind`: 13 → (6) → 2.
    pub fn new(kind: ArchKind) -> Self {
        ArchitectureSpec {
            kind,
            input_dim: 13,
            hidden_dim: 6,
            latent_dim: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.latent_dim < 1 {
            return Err(Error::Config("latent_dim must be at least 1".to_string()));
        }
        if self.input_dim <= self.latent_dim {
            return Err(Error::Config(format!(
                "input_dim ({}) must exceed latent_dim ({})",
                self.input_dim, self.latent_dim
            )));
        }
        if self.kind == ArchKind::SimpleAe
            && !(self.latent_dim < self.hidden_dim && self.hidden_dim < self.input_dim)
        {
            return Err(Error::Config(format!(
                "simple autoencoder needs input_dim > hidden_dim > latent_dim, \
                 got {} / {} / {}",
                self.input_dim, self.hidden_dim, self.latent_dim
            )));
        }
        Ok(())
    }

    /// Layer widths, input first.
    ///
    /// `SimpleAe` → `[in, hidden, latent, hidden, in]`; the deep variants
    /// narrow by exactly 1 per layer and mirror back:
    /// `[in, in-1, …, latent, …, in-1, in]`.
    pub fn layer_widths(&self) -> Result<Vec<usize>> {
        self.validate()?;
        Ok(match self.kind {
            ArchKind::SimpleAe => vec![
                self.input_dim,
                self.hidden_dim,
                self.latent_dim,
                self.hidden_dim,
                self.input_dim,
            ],
            ArchKind::DeepAe | ArchKind::Sdae => {
                let mut widths: Vec<usize> = (self.latent_dim..=self.input_dim).rev().collect();
                widths.extend(self.latent_dim + 1..=self.input_dim);
                widths
            }
        })
    }

    /// Index (into the layer list) of the layer that outputs the latent
    /// code: the first layer whose output width is the minimum width.
    pub fn latent_layer_index(&self) -> Result<usize> {
        let widths = self.layer_widths()?;
        let min = *widths.iter().min().expect("widths are non-empty");
        let pos = widths.iter().position(|&w| w == min).expect("min exists");
        Ok(pos - 1)
    }

    /// Per-layer activations: ReLU on hidden layers, Linear at the latent
    /// layer, Sigmoid on the final output layer.
    pub fn activations(&self) -> Result<Vec<Activation>> {
        let widths = self.layer_widths()?;
        let latent = self.latent_layer_index()?;
        let n_layers = widths.len() - 1;
        Ok((0..n_layers)
            .map(|k| {
                if k == latent {
                    Activation::Linear
                } else if k == n_layers - 1 {
                    Activation::Sigmoid
                } else {
                    Activation::ReLU
                }
            })
            .collect())
    }
}

/// Build a freshly initialized network for `spec`, deterministically from
/// `seed`.
pub fn build_model(spec: &ArchitectureSpec, seed: u64) -> Result<Network> {
    let widths = spec.layer_widths()?;
    let activations = spec.activations()?;
    let latent_index = spec.latent_layer_index()?;
    init_network(&widths, &activations, latent_index, seed)
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Seed for the per-epoch shuffle.
    pub seed: u64,
    /// Loss weights and clamp; only the SDAE path reads the weights.
    pub loss: LossConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 1000,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 0,
            loss: LossConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be at least 1".to_string()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch_size must be at least 1".to_string()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        self.loss.validate()
    }
}

/// Per-epoch mean losses from one training run.
///
/// `total` always has one entry per epoch. The component histories are
/// present for supervised runs only; for reconstruction-only runs the total
/// *is* the reconstruction loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LossHistory {
    pub total: Vec<f64>,
    pub supervised: Option<Vec<f64>>,
    pub reconstruction: Option<Vec<f64>>,
}

impl LossHistory {
    pub fn len(&self) -> usize {
        self.total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_empty()
    }

    /// CSV with header `epoch,total,supervised,reconstruction`; epochs are
    /// 1-based. Runs without a supervised component leave that column blank
    /// and repeat the total in the reconstruction column.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epoch,total,supervised,reconstruction\n");
        for (i, &total) in self.total.iter().enumerate() {
            let supervised = self
                .supervised
                .as_ref()
                .map_or(String::new(), |s| s[i].to_string());
            let reconstruction = self
                .reconstruction
                .as_ref()
                .map_or_else(|| total.to_string(), |r| r[i].to_string());
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                total,
                supervised,
                reconstruction
            ));
        }
        out
    }
}

/// Train `net` on `records` with mini-batch SGD.
///
/// Each epoch shuffles the record order with a seeded RNG, walks it in
/// `batch_size` chunks (the final chunk keeps its natural smaller size),
/// applies one SGD step per chunk using the batch-mean gradient, and records
/// the epoch's mean loss. `supervised = true` trains with the combined
/// loss (every record must be labeled and the latent width must be 2);
/// otherwise the loss is plain reconstruction MSE.
///
/// Errors: empty dataset, record/network width mismatch, unlabeled records
/// in supervised mode, and non-finite losses or gradients (reported as
/// divergence naming the 1-based epoch).
pub fn train(
    mut net: Network,
    records: &[Record],
    config: &TrainConfig,
    supervised: bool,
) -> Result<(Network, LossHistory)> {
    config.validate()?;
    if records.is_empty() {
        return Err(Error::Precondition("training dataset is empty".to_string()));
    }
    let input_dim = net.input_dim();
    for r in records {
        if r.features.len() != input_dim {
            return Err(Error::Shape {
                context: "training record width",
                expected: input_dim,
                actual: r.features.len(),
            });
        }
    }
    if supervised {
        if net.latent_dim() != 2 {
            return Err(Error::Config(format!(
                "supervised training needs a 2-wide latent layer, got {}",
                net.latent_dim()
            )));
        }
        if records.iter().any(|r| r.label.is_none()) {
            return Err(Error::Config(
                "supervised training requires every record to be labeled".to_string(),
            ));
        }
    }

    let mut rng = crate::rng::seeded(config.seed);
    let mut order: Vec<usize> = (0..records.len()).collect();
    let zero_latent_grad = vec![0.0; net.latent_dim()];
    let n = records.len() as f64;

    let mut total_hist = Vec::with_capacity(config.epochs);
    let mut sup_hist = if supervised {
        Some(Vec::with_capacity(config.epochs))
    } else {
        None
    };
    let mut rec_hist = if supervised {
        Some(Vec::with_capacity(config.epochs))
    } else {
        None
    };

    for epoch in 1..=config.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);

        let mut total_sum = 0.0;
        let mut sup_sum = 0.0;
        let mut rec_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grads = GradientSet::zeros_like(&net);
            for &i in batch {
                let record = &records[i];
                let pass = net.forward(&record.features)?;
                if supervised {
                    let label =
                        SupervisedLabel::from_anomalous(record.label.expect("checked above"));
                    let losses = combined_loss(
                        pass.latent(),
                        label,
                        &record.features,
                        pass.output(),
                        &config.loss,
                    )?;
                    let lg = loss_gradients(
                        pass.latent(),
                        label,
                        &record.features,
                        pass.output(),
                        &config.loss,
                    )?;
                    grads.accumulate(&net.backward(&pass, &lg.output, &lg.latent)?)?;
                    total_sum += losses.total;
                    sup_sum += losses.supervised;
                    rec_sum += losses.reconstruction;
                } else {
                    let loss = mse(&record.features, pass.output())?;
                    let output_grad = mse_grad(&record.features, pass.output())?;
                    grads.accumulate(&net.backward(&pass, &output_grad, &zero_latent_grad)?)?;
                    total_sum += loss;
                }
            }
            grads.scale(1.0 / batch.len() as f64);
            if !grads.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            net.sgd_step(&grads, config.learning_rate)?;
        }

        let epoch_total = total_sum / n;
        if !epoch_total.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        total_hist.push(epoch_total);
        if let Some(s) = sup_hist.as_mut() {
            s.push(sup_sum / n);
        }
        if let Some(r) = rec_hist.as_mut() {
            r.push(rec_sum / n);
        }
    }

    Ok((
        net,
        LossHistory {
            total: total_hist,
            supervised: sup_hist,
            reconstruction: rec_hist,
        },
    ))
}

/// The latent code for one record.
pub fn encode(net: &Network, record: &Record) -> Result<Vec<f64>> {
    Ok(net.forward(&record.features)?.latent().to_vec())
}

/// The reconstruction of one record.
pub fn reconstruct(net: &Network, record: &Record) -> Result<Vec<f64>> {
    Ok(net.forward(&record.features)?.output().to_vec())
}

/// Format version written by this build.
pub const CHECKPOINT_VERSION: u64 = 1;

/// A self-describing, JSON-serialized snapshot of a trained model.
///
/// Weights serialize as full-precision decimal floats (shortest
/// round-tripping representation), so `load(save(m))` reproduces parameters
/// bit for bit and scores identically to `m` on any input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u64,
    pub spec: ArchitectureSpec,
    pub widths: Vec<usize>,
    pub activations: Vec<Activation>,
    /// Row-major per-layer weight matrices.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub normalization: Normalizer,
    pub seed: u64,
    pub loss_config: LossConfig,
}

impl Checkpoint {
    /// Snapshot a trained network together with its data scaling and
    /// training provenance (seed, loss weights).
    pub fn new(
        spec: &ArchitectureSpec,
        net: &Network,
        normalization: &Normalizer,
        seed: u64,
        loss_config: &LossConfig,
    ) -> Result<Self> {
        let widths = spec.layer_widths()?;
        if widths != net.widths() {
            return Err(Error::Config(format!(
                "network widths {:?} do not match architecture widths {:?}",
                net.widths(),
                widths
            )));
        }
        Ok(Checkpoint {
            version: CHECKPOINT_VERSION,
            spec: *spec,
            widths,
            activations: net.layers().iter().map(|l| l.activation()).collect(),
            weights: net.layers().iter().map(|l| l.weights().to_vec()).collect(),
            biases: net.layers().iter().map(|l| l.biases().to_vec()).collect(),
            normalization: normalization.clone(),
            seed,
            loss_config: *loss_config,
        })
    }

    /// Rebuild the stored network, validating internal consistency.
    pub fn network(&self) -> Result<Network> {
        let malformed = |msg: String| Error::MalformedCheckpoint(msg);
        let spec_widths = self
            .spec
            .layer_widths()
            .map_err(|e| malformed(format!("invalid architecture: {e}")))?;
        if spec_widths != self.widths {
            return Err(malformed(format!(
                "stored widths {:?} do not match architecture widths {:?}",
                self.widths, spec_widths
            )));
        }
        let n_layers = self.widths.len() - 1;
        if self.activations.len() != n_layers
            || self.weights.len() != n_layers
            || self.biases.len() != n_layers
        {
            return Err(malformed(format!(
                "expected {} layers, got {} activations / {} weight blocks / {} bias blocks",
                n_layers,
                self.activations.len(),
                self.weights.len(),
                self.biases.len()
            )));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for k in 0..n_layers {
            let layer = DenseLayer::new(
                self.widths[k],
                self.widths[k + 1],
                self.activations[k],
                self.weights[k].clone(),
                self.biases[k].clone(),
            )
            .map_err(|e| malformed(format!("layer {k}: {e}")))?;
            layers.push(layer);
        }
        let latent_index = self
            .spec
            .latent_layer_index()
            .map_err(|e| malformed(format!("invalid architecture: {e}")))?;
        Network::new(layers, latent_index).map_err(|e| malformed(e.to_string()))
    }

    /// Serialize to pretty JSON and write atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::MalformedCheckpoint(e.to_string()))?;
        json.push('\n');
        crate::fsio::write_atomic(path, &json)
    }

    /// Read and validate a checkpoint file.
    ///
    /// I/O failures, version mismatches, and structural problems are
    /// reported as distinct errors; the version field is checked before the
    /// rest of the document is interpreted.
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::fsio::read_to_string(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::MalformedCheckpoint(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::MalformedCheckpoint("missing version field".to_string()))?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion {
                found: version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let checkpoint: Checkpoint =
            serde_json::from_value(value).map_err(|e| Error::MalformedCheckpoint(e.to_string()))?;
        checkpoint
            .normalization
            .validate()
            .map_err(|e| Error::MalformedCheckpoint(format!("normalization: {e}")))?;
        Ok(checkpoint)
    }
}
