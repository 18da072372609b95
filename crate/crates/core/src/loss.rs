//! Loss functions and the per-record anomaly score.
//!
//! Four quantities drive the whole crate:
//!
//! * [`mse`] — mean squared difference between a record and its
//!   reconstruction; the training loss for the unsupervised autoencoders.
//! * [`bce`] — binary cross-entropy between a 2-tuple class label and the
//!   latent turned into probabilities; the supervised head of the SDAE.
//! * [`combined_loss`] — `w_s·bce + w_ae·mse`, the SDAE training loss.
//! * [`anomaly_score`] — the Euclidean reconstruction error used for
//!   detection. Note it is a *sum* of squares under a square root, not a
//!   mean: `score² = n·mse`.
//!
//! Analytic gradients for the training losses live here too
//! ([`mse_grad`], [`supervised_latent_grad`], [`loss_gradients`]) so the
//! backward pass and its finite-difference checks share one definition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::sigmoid;

/// Weights and numeric guards for the combined SDAE loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    /// Weight of the supervised (BCE) component.
    pub w_s: f64,
    /// Weight of the reconstruction (MSE) component.
    pub w_ae: f64,
    /// Probabilities are clamped into `[clamp_eps, 1 − clamp_eps]` before
    /// the logs in [`bce`], so a saturated sigmoid can never produce an
    /// infinite loss.
    pub clamp_eps: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            w_s: 1.0,
            w_ae: 1.0,
            clamp_eps: 1e-7,
        }
    }
}

impl LossConfig {
    /// Validates `w_s ≥ 0`, `w_ae ≥ 0`, and `0 < clamp_eps < 0.5`.
    pub fn validate(&self) -> Result<()> {
        if !(self.w_s.is_finite() && self.w_s >= 0.0) {
            return Err(Error::Config(format!(
                "supervised weight w_s must be finite and >= 0, got {}",
                self.w_s
            )));
        }
        if !(self.w_ae.is_finite() && self.w_ae >= 0.0) {
            return Err(Error::Config(format!(
                "reconstruction weight w_ae must be finite and >= 0, got {}",
                self.w_ae
            )));
        }
        if !(self.clamp_eps > 0.0 && self.clamp_eps < 0.5) {
            return Err(Error::Config(format!(
                "clamp_eps must lie strictly between 0 and 0.5, got {}",
                self.clamp_eps
            )));
        }
        Ok(())
    }
}

/// Class label for the supervised head, encoded as the target tuple
/// `(1,0)` for anomalous records and `(0,1)` for normal ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupervisedLabel {
    Anomalous,
    Normal,
}

impl SupervisedLabel {
    /// Maps a boolean anomaly flag to its label.
    pub fn from_anomalous(anomalous: bool) -> Self {
        if anomalous {
            SupervisedLabel::Anomalous
        } else {
            SupervisedLabel::Normal
        }
    }

    pub fn is_anomalous(self) -> bool {
        matches!(self, SupervisedLabel::Anomalous)
    }

    /// The two-component target vector: `(1,0)` anomalous, `(0,1)` normal.
    pub fn targets(self) -> [f64; 2] {
        match self {
            SupervisedLabel::Anomalous => [1.0, 0.0],
            SupervisedLabel::Normal => [0.0, 1.0],
        }
    }
}

/// Supervised and reconstruction components of the combined loss, plus
/// their weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedLoss {
    /// `w_s·supervised + w_ae·reconstruction`, exactly.
    pub total: f64,
    /// Unweighted BCE component.
    pub supervised: f64,
    /// Unweighted MSE component.
    pub reconstruction: f64,
}

/// Gradients of a training loss with respect to the two places the network
/// exposes: its final output and its latent output.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradients {
    /// `∂loss/∂x̂`, already scaled by `w_ae` where applicable.
    pub output: Vec<f64>,
    /// `∂loss/∂latent`, already scaled by `w_s`.
    pub latent: Vec<f64>,
}

fn check_same_len(context: &'static str, x: &[f64], x_hat: &[f64]) -> Result<()> {
    if x.len() != x_hat.len() {
        return Err(Error::Shape {
            context,
            expected: x.len(),
            actual: x_hat.len(),
        });
    }
    Ok(())
}

/// Mean squared difference: `(1/n)·Σ_j (x_j − x̂_j)²`.
///
/// # Errors
/// Length mismatch or empty inputs.
pub fn mse(x: &[f64], x_hat: &[f64]) -> Result<f64> {
    check_same_len("mse", x, x_hat)?;
    if x.is_empty() {
        return Err(Error::Precondition("mse of empty vectors".into()));
    }
    let sum: f64 = x
        .iter()
        .zip(x_hat)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok(sum / x.len() as f64)
}

/// Gradient of [`mse`] with respect to `x_hat`: `2(x̂_j − x_j)/n`.
pub fn mse_grad(x: &[f64], x_hat: &[f64]) -> Result<Vec<f64>> {
    check_same_len("mse_grad", x, x_hat)?;
    if x.is_empty() {
        return Err(Error::Precondition("mse_grad of empty vectors".into()));
    }
    let n = x.len() as f64;
    Ok(x.iter()
        .zip(x_hat)
        .map(|(a, b)| 2.0 * (b - a) / n)
        .collect())
}

/// Binary cross-entropy between a label tuple and a 2-vector of
/// probabilities, averaged over the two coordinates.
///
/// Each probability is clamped into `[clamp_eps, 1 − clamp_eps]` first, so
/// the result is always finite; clamping is the error-avoidance mechanism,
/// not an error.
pub fn bce(label: SupervisedLabel, p: [f64; 2], clamp_eps: f64) -> f64 {
    let y = label.targets();
    let mut sum = 0.0;
    for k in 0..2 {
        let pk = p[k].clamp(clamp_eps, 1.0 - clamp_eps);
        sum -= y[k] * pk.ln() + (1.0 - y[k]) * (1.0 - pk).ln();
    }
    sum / 2.0
}

/// Euclidean reconstruction error: `sqrt(Σ_j (x_j − x̂_j)²)`.
///
/// This is the per-record anomaly score. Unlike [`mse`] it is **not**
/// averaged over coordinates, so `anomaly_score(x, x̂)² = n·mse(x, x̂)`.
///
/// # Errors
/// Length mismatch.
pub fn anomaly_score(x: &[f64], x_hat: &[f64]) -> Result<f64> {
    check_same_len("anomaly_score", x, x_hat)?;
    let sum: f64 = x
        .iter()
        .zip(x_hat)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}

fn check_latent_pair(context: &'static str, latent: &[f64]) -> Result<()> {
    if latent.len() != 2 {
        return Err(Error::Shape {
            context,
            expected: 2,
            actual: latent.len(),
        });
    }
    Ok(())
}

/// The combined SDAE loss.
///
/// The latent is mapped to probabilities by a per-coordinate sigmoid, the
/// supervised component is [`bce`] against `label`, the reconstruction
/// component is [`mse`], and the total is exactly
/// `w_s·supervised + w_ae·reconstruction`.
///
/// # Errors
/// Latent not length 2; component loss errors.
pub fn combined_loss(
    latent: &[f64],
    label: SupervisedLabel,
    x: &[f64],
    x_hat: &[f64],
    config: &LossConfig,
) -> Result<CombinedLoss> {
    check_latent_pair("combined_loss latent", latent)?;
    let p = [sigmoid(latent[0]), sigmoid(latent[1])];
    let supervised = bce(label, p, config.clamp_eps);
    let reconstruction = mse(x, x_hat)?;
    Ok(CombinedLoss {
        total: config.w_s * supervised + config.w_ae * reconstruction,
        supervised,
        reconstruction,
    })
}

/// Gradient of the supervised component of [`combined_loss`] with respect
/// to the raw (pre-sigmoid) latent: `w_s·(σ(z_k) − y_k)/2` per coordinate.
///
/// The probability clamp only guards the loss *value*; the gradient uses the
/// plain BCE-through-sigmoid form, which is already bounded.
pub fn supervised_latent_grad(
    latent: &[f64],
    label: SupervisedLabel,
    w_s: f64,
) -> Result<Vec<f64>> {
    check_latent_pair("supervised_latent_grad latent", latent)?;
    let y = label.targets();
    Ok((0..2)
        .map(|k| w_s * (sigmoid(latent[k]) - y[k]) / 2.0)
        .collect())
}

/// Both gradients of [`combined_loss`]: the output-side `w_ae·∂mse/∂x̂` and
/// the latent-side supervised gradient.
pub fn loss_gradients(
    latent: &[f64],
    label: SupervisedLabel,
    x: &[f64],
    x_hat: &[f64],
    config: &LossConfig,
) -> Result<LossGradients> {
    let mut output = mse_grad(x, x_hat)?;
    for g in &mut output {
        *g *= config.w_ae;
    }
    let latent = supervised_latent_grad(latent, label, config.w_s)?;
    Ok(LossGradients { output, latent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn mse_of_identical_vectors_is_zero() {
        assert_eq!(mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn mse_hand_cases() {
        assert_close(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0, 1e-15);
        assert_close(
            mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 5.0]).unwrap(),
            4.0 / 3.0,
            1e-15,
        );
    }

    #[test]
    fn mse_rejects_mismatched_or_empty() {
        assert!(matches!(mse(&[1.0], &[1.0, 2.0]), Err(Error::Shape { .. })));
        assert!(matches!(mse(&[], &[]), Err(Error::Precondition(_))));
    }

    #[test]
    fn bce_perfect_prediction_is_near_zero() {
        let v = bce(SupervisedLabel::Anomalous, [1.0 - 1e-9, 1e-9], 1e-12);
        assert!((0.0..1e-6).contains(&v), "{v}");
    }

    #[test]
    fn bce_uninformative_prediction_is_ln2() {
        let v = bce(SupervisedLabel::Anomalous, [0.5, 0.5], 1e-7);
        assert_close(v, std::f64::consts::LN_2, 1e-12);
    }

    #[test]
    fn bce_worst_case_is_bounded_by_clamp() {
        // Exactly wrong prediction: both coordinates clamp, giving −ln(eps).
        let v = bce(SupervisedLabel::Anomalous, [0.0, 1.0], 1e-7);
        assert_close(v, 16.11809565095832, 1e-9);
    }

    #[test]
    fn anomaly_score_hand_cases() {
        assert_eq!(anomaly_score(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_close(anomaly_score(&[1.0, 2.0], &[1.0, 0.0]).unwrap(), 2.0, 1e-15);
        assert_close(anomaly_score(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0, 1e-15);
        assert!(matches!(
            anomaly_score(&[1.0], &[1.0, 2.0]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn combined_loss_weight_degeneracies() {
        let cfg0 = LossConfig {
            w_s: 0.0,
            w_ae: 1.0,
            ..LossConfig::default()
        };
        let x = [0.2, 0.4, 0.6];
        let x_hat = [0.3, 0.4, 0.6];
        let out = combined_loss(&[0.7, -0.3], SupervisedLabel::Normal, &x, &x_hat, &cfg0).unwrap();
        assert_eq!(out.total, mse(&x, &x_hat).unwrap());

        let cfg1 = LossConfig {
            w_s: 1.0,
            w_ae: 0.0,
            ..LossConfig::default()
        };
        let out =
            combined_loss(&[0.0, 0.0], SupervisedLabel::Anomalous, &x, &x_hat, &cfg1).unwrap();
        assert_close(out.total, std::f64::consts::LN_2, 1e-12);
    }

    #[test]
    fn combined_loss_sums_closed_forms() {
        // sigmoid(0) = 0.5 on both coordinates gives BCE = ln 2; the
        // reconstruction part is 0.25 by construction.
        let cfg = LossConfig::default();
        let x = [0.0, 0.0];
        let x_hat = [0.5, 0.5];
        let out = combined_loss(&[0.0, 0.0], SupervisedLabel::Anomalous, &x, &x_hat, &cfg).unwrap();
        assert_close(out.reconstruction, 0.25, 1e-15);
        assert_close(out.supervised, std::f64::consts::LN_2, 1e-12);
        assert_close(out.total, 0.25 + std::f64::consts::LN_2, 1e-12);
    }

    #[test]
    fn combined_loss_total_is_exactly_the_weighted_sum() {
        let cfg = LossConfig {
            w_s: 0.7,
            w_ae: 2.5,
            clamp_eps: 1e-7,
        };
        let x = [0.1, 0.9, 0.4];
        let x_hat = [0.2, 0.7, 0.45];
        let out = combined_loss(&[1.2, -0.8], SupervisedLabel::Normal, &x, &x_hat, &cfg).unwrap();
        assert_eq!(
            out.total,
            cfg.w_s * out.supervised + cfg.w_ae * out.reconstruction
        );
    }

    #[test]
    fn combined_loss_rejects_wrong_latent_width() {
        let cfg = LossConfig::default();
        let err = combined_loss(&[0.0; 3], SupervisedLabel::Normal, &[0.1], &[0.1], &cfg);
        assert!(matches!(err, Err(Error::Shape { .. })));
    }

    #[test]
    fn mse_grad_hand_cases() {
        assert_eq!(mse_grad(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(mse_grad(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn latent_grad_closed_form() {
        let g = supervised_latent_grad(&[0.0, 0.0], SupervisedLabel::Anomalous, 1.0).unwrap();
        assert_close(g[0], -0.25, 1e-15);
        assert_close(g[1], 0.25, 1e-15);
    }

    #[test]
    fn loss_gradients_apply_the_weights() {
        let cfg = LossConfig {
            w_s: 3.0,
            w_ae: 2.0,
            clamp_eps: 1e-7,
        };
        let g = loss_gradients(
            &[0.0, 0.0],
            SupervisedLabel::Anomalous,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &cfg,
        )
        .unwrap();
        assert_eq!(g.output, vec![2.0, 2.0]);
        assert_close(g.latent[0], -0.75, 1e-15);
        assert_close(g.latent[1], 0.75, 1e-15);
    }

    #[test]
    fn loss_config_validation() {
        assert!(LossConfig::default().validate().is_ok());
        let bad = LossConfig {
            w_s: -1.0,
            ..LossConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = LossConfig {
            clamp_eps: 0.5,
            ..LossConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = LossConfig {
            clamp_eps: 0.0,
            ..LossConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn label_targets() {
        assert_eq!(SupervisedLabel::Anomalous.targets(), [1.0, 0.0]);
        assert_eq!(SupervisedLabel::Normal.targets(), [0.0, 1.0]);
        assert!(SupervisedLabel::from_anomalous(true).is_anomalous());
        assert!(!SupervisedLabel::from_anomalous(false).is_anomalous());
    }
}
