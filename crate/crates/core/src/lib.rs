//! Autoencoder-based anomaly detection for tabular (building-energy style) data.
//!
//! The crate trains three dense autoencoder variants on min-max-normalized
//! feature vectors and flags anomalous records by thresholding the per-record
//! reconstruction error:
//!
//! * **Simple AE** — one hidden layer each side of a 2-wide latent.
//! * **Deep AE** — a ladder that narrows by one unit per layer down to the
//!   latent and mirrors back up.
//! * **Supervised Deep AE (SDAE)** — the deep ladder trained with a combined
//!   loss: reconstruction MSE plus a binary-cross-entropy head on the latent.
//!
//! Everything is deterministic given a seed: initialization, shuffling, and
//! the synthetic data generator all draw from a seeded ChaCha8 stream, so two
//! runs with the same inputs produce bit-identical models and reports.
//!
//! Module map:
//! * [`nn`] — minimal dense network engine (forward, backward, SGD,
//!   finite-difference gradient checking).
//! * [`loss`] — reconstruction MSE, supervised BCE, the combined loss, the
//!   anomaly score, and their analytic gradients.
//! * [`model`] — the three architectures, the training loop, checkpoints.
//! * [`data`] — CSV ingestion (three-way join), normalization, labeled
//!   datasets, and a synthetic generator with planted anomalies.
//! * [`detect`] — two-sided thresholding, confusion metrics, threshold
//!   sweeps, score reports, and histogram export.

pub mod data;
pub mod detect;
pub mod error;
pub mod fsio;
pub mod loss;
pub mod model;
pub mod nn;
pub mod rng;

pub use error::{Error, Result};
