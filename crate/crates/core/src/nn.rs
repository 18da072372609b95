//! Minimal dense feedforward network engine.
//!
//! Keeps exactly what the autoencoders need and nothing more: dense layers
//! over flat row-major weight storage, three activations, a forward pass
//! that caches per-layer outputs, a backward pass that accepts an extra
//! gradient injected at the latent layer (the supervised pathway), plain
//! SGD updates, seeded initialization, and a finite-difference gradient
//! checker.
//!
//! Design notes:
//! * Activation derivatives are computed from the cached *outputs* (ReLU:
//!   `1 if a > 0`; Sigmoid: `a(1−a)`; Linear: `1`), so the cache holds one
//!   vector per layer.
//! * Initialization draws weights uniformly from `±sqrt(6/fan_in)` (the
//!   ReLU-appropriate He bound) with zero biases. A symmetric-fan bound of
//!   `sqrt(6/(fan_in+fan_out))` starves deep ReLU ladders: activation
//!   variance roughly halves per layer, and the 22-layer ladder arrives at
//!   the latent with no usable signal and cannot train at practical rates.
//! * Everything is `f64` and single-threaded; determinism is a contract.

use serde::{Deserialize, Serialize};

use crate::data::Record;
use crate::error::{Error, Result};
use crate::loss::{self, LossConfig};
use crate::rng;
use rand::Rng;

/// The logistic function `1/(1+e^(−v))`.
pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Elementwise activation functions used by the layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    ReLU,
    Sigmoid,
    Linear,
}

impl Activation {
    /// Applies the activation to one pre-activation value.
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::ReLU => v.max(0.0),
            Activation::Sigmoid => sigmoid(v),
            Activation::Linear => v,
        }
    }

    /// Derivative `da/dz` written in terms of the activation output `a`.
    fn grad_from_output(self, a: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }
}

/// Applies `kind` elementwise to a pre-activation vector.
pub fn apply_activation(kind: Activation, pre: &[f64]) -> Vec<f64> {
    pre.iter().map(|&v| kind.apply(v)).collect()
}

/// One dense layer: `activation(W·x + b)` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    /// Row-major `[out_dim × in_dim]`: `weights[o*in_dim + i]` connects
    /// input `i` to output `o`.
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    /// Builds a layer from explicit parameters, validating shapes and that
    /// every value is finite.
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        weights: Vec<f64>,
        biases: Vec<f64>,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::Config(format!(
                "layer dimensions must be >= 1, got {in_dim}x{out_dim}"
            )));
        }
        if weights.len() != in_dim * out_dim {
            return Err(Error::Shape {
                context: "DenseLayer weights",
                expected: in_dim * out_dim,
                actual: weights.len(),
            });
        }
        if biases.len() != out_dim {
            return Err(Error::Shape {
                context: "DenseLayer biases",
                expected: out_dim,
                actual: biases.len(),
            });
        }
        if !weights.iter().chain(&biases).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("DenseLayer parameters"));
        }
        Ok(DenseLayer {
            in_dim,
            out_dim,
            weights,
            biases,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Row-major weight matrix, `out_dim × in_dim`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Computes `activation(W·input + b)`.
    ///
    /// # Errors
    /// Shape error when `input` does not match `in_dim`.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.in_dim {
            return Err(Error::Shape {
                context: "dense_forward input",
                expected: self.in_dim,
                actual: input.len(),
            });
        }
        let mut out = Vec::with_capacity(self.out_dim);
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut z = self.biases[o];
            for (w, x) in row.iter().zip(input) {
                z += w * x;
            }
            out.push(self.activation.apply(z));
        }
        Ok(out)
    }
}

/// Per-layer activation cache produced by [`Network::forward`].
///
/// `activations[0]` is the input; `activations[k+1]` is the output of layer
/// `k`, post-activation. This is exactly what the backward pass needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    activations: Vec<Vec<f64>>,
    latent_index: usize,
}

impl ForwardPass {
    /// The network input this pass was computed from.
    pub fn input(&self) -> &[f64] {
        &self.activations[0]
    }

    /// Output of the latent layer.
    pub fn latent(&self) -> &[f64] {
        &self.activations[self.latent_index + 1]
    }

    /// Output of the final layer.
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("non-empty by construction")
    }

    /// All cached activations, input first.
    pub fn activations(&self) -> &[Vec<f64>] {
        &self.activations
    }
}

/// Per-layer parameter gradients, shape-congruent with a [`Network`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    weight_grads: Vec<Vec<f64>>,
    bias_grads: Vec<Vec<f64>>,
}

impl GradientSet {
    /// An all-zero gradient set shaped like `net`.
    pub fn zeros_like(net: &Network) -> Self {
        GradientSet {
            weight_grads: net
                .layers
                .iter()
                .map(|l| vec![0.0; l.weights.len()])
                .collect(),
            bias_grads: net.layers.iter().map(|l| vec![0.0; l.out_dim]).collect(),
        }
    }

    /// Adds `other` elementwise into `self`.
    ///
    /// # Errors
    /// Shape error when the two sets are not congruent.
    pub fn accumulate(&mut self, other: &GradientSet) -> Result<()> {
        if self.weight_grads.len() != other.weight_grads.len() {
            return Err(Error::Shape {
                context: "GradientSet accumulate layers",
                expected: self.weight_grads.len(),
                actual: other.weight_grads.len(),
            });
        }
        for (mine, theirs) in self
            .weight_grads
            .iter_mut()
            .chain(self.bias_grads.iter_mut())
            .zip(other.weight_grads.iter().chain(other.bias_grads.iter()))
        {
            if mine.len() != theirs.len() {
                return Err(Error::Shape {
                    context: "GradientSet accumulate entries",
                    expected: mine.len(),
                    actual: theirs.len(),
                });
            }
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
        Ok(())
    }

    /// Multiplies every gradient by `factor` (used for batch averaging).
    pub fn scale(&mut self, factor: f64) {
        for v in self
            .weight_grads
            .iter_mut()
            .chain(self.bias_grads.iter_mut())
        {
            for g in v.iter_mut() {
                *g *= factor;
            }
        }
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.weight_grads
            .iter()
            .chain(self.bias_grads.iter())
            .all(|v| v.iter().all(|g| g.is_finite()))
    }

    /// Per-layer row-major weight gradients.
    pub fn weight_grads(&self) -> &[Vec<f64>] {
        &self.weight_grads
    }

    /// Per-layer bias gradients.
    pub fn bias_grads(&self) -> &[Vec<f64>] {
        &self.bias_grads
    }
}

/// A feedforward stack of [`DenseLayer`]s with one layer designated as the
/// latent code.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
    latent_index: usize,
}

impl Network {
    /// Assembles a network, validating layer-to-layer dimension
    /// compatibility and that `latent_index` names a real layer.
    pub fn new(layers: Vec<DenseLayer>, latent_index: usize) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for k in 0..layers.len() - 1 {
            if layers[k].out_dim != layers[k + 1].in_dim {
                return Err(Error::Shape {
                    context: "Network layer chain",
                    expected: layers[k].out_dim,
                    actual: layers[k + 1].in_dim,
                });
            }
        }
        if latent_index >= layers.len() {
            return Err(Error::Config(format!(
                "latent_index {latent_index} out of range for {} layers",
                layers.len()
            )));
        }
        Ok(Network {
            layers,
            latent_index,
        })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    /// Index of the layer whose output is the latent code.
    pub fn latent_index(&self) -> usize {
        self.latent_index
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim
    }

    pub fn latent_dim(&self) -> usize {
        self.layers[self.latent_index].out_dim
    }

    /// Layer widths including the input: `[in, out_0, out_1, …]`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.layers.len() + 1);
        w.push(self.input_dim());
        w.extend(self.layers.iter().map(|l| l.out_dim));
        w
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Runs the full forward pass, caching every layer output.
    ///
    /// # Errors
    /// Shape error when `input` does not match the first layer.
    pub fn forward(&self, input: &[f64]) -> Result<ForwardPass> {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.to_vec());
        for layer in &self.layers {
            let next = layer.forward(activations.last().expect("non-empty"))?;
            activations.push(next);
        }
        Ok(ForwardPass {
            activations,
            latent_index: self.latent_index,
        })
    }

    /// Backpropagates through the cached pass.
    ///
    /// `output_grad` is `∂L/∂output`; `latent_grad` is an extra gradient
    /// injected at the latent layer's output (pass zeros when the loss has
    /// no supervised head). Returns `∂L/∂params`.
    ///
    /// # Errors
    /// Shape errors when either gradient or the cache does not match the
    /// network.
    pub fn backward(
        &self,
        pass: &ForwardPass,
        output_grad: &[f64],
        latent_grad: &[f64],
    ) -> Result<GradientSet> {
        if pass.activations.len() != self.layers.len() + 1 {
            return Err(Error::Shape {
                context: "network_backward cache",
                expected: self.layers.len() + 1,
                actual: pass.activations.len(),
            });
        }
        if output_grad.len() != self.output_dim() {
            return Err(Error::Shape {
                context: "network_backward output_grad",
                expected: self.output_dim(),
                actual: output_grad.len(),
            });
        }
        if latent_grad.len() != self.latent_dim() {
            return Err(Error::Shape {
                context: "network_backward latent_grad",
                expected: self.latent_dim(),
                actual: latent_grad.len(),
            });
        }

        let mut grads = GradientSet::zeros_like(self);
        // delta holds ∂L/∂(output of layer k) entering each iteration.
        let mut delta = output_grad.to_vec();
        for k in (0..self.layers.len()).rev() {
            if k == self.latent_index {
                for (d, g) in delta.iter_mut().zip(latent_grad) {
                    *d += g;
                }
            }
            let layer = &self.layers[k];
            let out_k = &pass.activations[k + 1];
            let in_k = &pass.activations[k];

            // dz = delta ⊙ f'(z), with f' read off the cached outputs.
            let mut dz = delta;
            for (d, a) in dz.iter_mut().zip(out_k) {
                *d *= layer.activation.grad_from_output(*a);
            }

            let wg = &mut grads.weight_grads[k];
            for o in 0..layer.out_dim {
                let row = &mut wg[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (g, x) in row.iter_mut().zip(in_k) {
                    *g = dz[o] * x;
                }
            }
            grads.bias_grads[k].copy_from_slice(&dz);

            if k > 0 {
                let mut prev = vec![0.0; layer.in_dim];
                for (row, &d) in layer.weights.chunks_exact(layer.in_dim).zip(&dz) {
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += w * d;
                    }
                }
                delta = prev;
            } else {
                delta = dz; // unused; keeps the borrow simple
            }
        }
        Ok(grads)
    }

    /// Plain SGD: every parameter `p ← p − learning_rate·g`.
    ///
    /// # Errors
    /// Config error for a negative or non-finite learning rate; shape error
    /// when `grads` is not congruent with the network.
    pub fn sgd_step(&mut self, grads: &GradientSet, learning_rate: f64) -> Result<()> {
        if !(learning_rate.is_finite() && learning_rate >= 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be finite and >= 0, got {learning_rate}"
            )));
        }
        if grads.weight_grads.len() != self.layers.len() {
            return Err(Error::Shape {
                context: "sgd_step layers",
                expected: self.layers.len(),
                actual: grads.weight_grads.len(),
            });
        }
        for (k, layer) in self.layers.iter_mut().enumerate() {
            let wg = &grads.weight_grads[k];
            let bg = &grads.bias_grads[k];
            if wg.len() != layer.weights.len() || bg.len() != layer.biases.len() {
                return Err(Error::Shape {
                    context: "sgd_step gradients",
                    expected: layer.weights.len() + layer.biases.len(),
                    actual: wg.len() + bg.len(),
                });
            }
            for (p, g) in layer.weights.iter_mut().zip(wg) {
                *p -= learning_rate * g;
            }
            for (p, g) in layer.biases.iter_mut().zip(bg) {
                *p -= learning_rate * g;
            }
        }
        Ok(())
    }

    /// Number of scalar parameters in layer `k` (weights then biases, in
    /// the flattened order used by [`Network::param_mut`]).
    pub(crate) fn layer_param_len(&self, k: usize) -> usize {
        self.layers[k].weights.len() + self.layers[k].biases.len()
    }

    /// Mutable access to one scalar parameter, for the gradient checker.
    pub(crate) fn param_mut(&mut self, layer: usize, idx: usize) -> &mut f64 {
        let l = &mut self.layers[layer];
        if idx < l.weights.len() {
            &mut l.weights[idx]
        } else {
            &mut l.biases[idx - l.weights.len()]
        }
    }

    /// The gradient for the parameter addressed like [`Network::param_mut`].
    fn grad_at(grads: &GradientSet, layer: usize, idx: usize) -> f64 {
        let wg = &grads.weight_grads[layer];
        if idx < wg.len() {
            wg[idx]
        } else {
            grads.bias_grads[layer][idx - wg.len()]
        }
    }
}

/// Initializes a network from layer widths and activations.
///
/// Weights are drawn uniformly from `±sqrt(6/fan_in)` per layer (see the
/// module notes for why the bound uses `fan_in` alone); biases start at
/// exactly zero. The draw order is fixed (layers in order, weights
/// row-major), so a seed fully determines the result.
///
/// # Errors
/// Config error for fewer than two widths, a zero width, an activation
/// count that is not `dims.len() − 1`, or an out-of-range `latent_index`.
pub fn init_network(
    dims: &[usize],
    activations: &[Activation],
    latent_index: usize,
    seed: u64,
) -> Result<Network> {
    if dims.len() < 2 {
        return Err(Error::Config(format!(
            "need at least two layer widths, got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::Config("layer widths must be >= 1".into()));
    }
    if activations.len() != dims.len() - 1 {
        return Err(Error::Config(format!(
            "expected {} activations for {} widths, got {}",
            dims.len() - 1,
            dims.len(),
            activations.len()
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut layers = Vec::with_capacity(dims.len() - 1);
    for (k, pair) in dims.windows(2).enumerate() {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let limit = (6.0 / fan_in as f64).sqrt();
        let weights: Vec<f64> = (0..fan_in * fan_out)
            .map(|_| rng.random_range(-limit..limit))
            .collect();
        layers.push(DenseLayer::new(
            fan_in,
            fan_out,
            activations[k],
            weights,
            vec![0.0; fan_out],
        )?);
    }
    Network::new(layers, latent_index)
}

/// Compares analytic gradients against central finite differences of the
/// full training loss at one sample.
///
/// A labeled sample is scored with the combined loss (supervised BCE on the
/// latent plus weighted reconstruction MSE, per `loss_config`); an unlabeled
/// sample with plain reconstruction MSE. Returns the maximum over all
/// parameters of `|analytic − numeric| / max(|analytic|, |numeric|, 1e-12)`.
///
/// # Errors
/// Precondition error for `eps ≤ 0`; numeric error when a perturbed loss is
/// non-finite; shape errors for mismatched sample width (and, for labeled
/// samples, a latent that is not 2-wide).
pub fn gradient_check(
    net: &Network,
    sample: &Record,
    loss_config: &LossConfig,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Precondition(format!(
            "gradient_check eps must be > 0, got {eps}"
        )));
    }
    if sample.features.len() != net.input_dim() {
        return Err(Error::Shape {
            context: "gradient_check sample",
            expected: net.input_dim(),
            actual: sample.features.len(),
        });
    }

    let x = &sample.features;
    let label = sample
        .label
        .map(crate::loss::SupervisedLabel::from_anomalous);

    let sample_loss = |net: &Network| -> Result<f64> {
        let pass = net.forward(x)?;
        let value = match label {
            Some(lab) => {
                loss::combined_loss(pass.latent(), lab, x, pass.output(), loss_config)?.total
            }
            None => loss::mse(x, pass.output())?,
        };
        if !value.is_finite() {
            return Err(Error::NonFinite("gradient_check loss"));
        }
        Ok(value)
    };

    // Analytic gradients through the backward pass.
    let pass = net.forward(x)?;
    let analytic = match label {
        Some(lab) => {
            let g = loss::loss_gradients(pass.latent(), lab, x, pass.output(), loss_config)?;
            net.backward(&pass, &g.output, &g.latent)?
        }
        None => {
            let output_grad = loss::mse_grad(x, pass.output())?;
            let zeros = vec![0.0; net.latent_dim()];
            net.backward(&pass, &output_grad, &zeros)?
        }
    };

    // Numeric gradients by perturbing one parameter at a time.
    let mut probe = net.clone();
    let mut max_rel = 0.0_f64;
    for layer in 0..net.layers().len() {
        for idx in 0..net.layer_param_len(layer) {
            let original = *probe.param_mut(layer, idx);
            *probe.param_mut(layer, idx) = original + eps;
            let hi = sample_loss(&probe)?;
            *probe.param_mut(layer, idx) = original - eps;
            let lo = sample_loss(&probe)?;
            *probe.param_mut(layer, idx) = original;

            let numeric = (hi - lo) / (2.0 * eps);
            let a = Network::grad_at(&analytic, layer, idx);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-12);
            max_rel = max_rel.max(rel);
        }
    }
    Ok(max_rel)
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

    fn linear_layer(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
    ) -> DenseLayer {
        DenseLayer::new(in_dim, out_dim, Activation::Linear, weights, biases).unwrap()
    }

    #[test]
    fn sigmoid_closed_forms() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_close(sigmoid(3.0_f64.ln()), 0.75, 1e-15);
        assert!(sigmoid(30.0) < 1.0 && sigmoid(-30.0) > 0.0);
        // Far in the tails the f64 result saturates but stays in [0, 1].
        assert_eq!(sigmoid(500.0), 1.0);
        assert!(sigmoid(-500.0) >= 0.0);
    }

    #[test]
    fn apply_activation_definitions() {
        assert_eq!(
            apply_activation(Activation::ReLU, &[-1.0, 2.0]),
            vec![0.0, 2.0]
        );
        assert_eq!(apply_activation(Activation::Sigmoid, &[0.0]), vec![0.5]);
        assert_eq!(
            apply_activation(Activation::Linear, &[-3.0, 0.5]),
            vec![-3.0, 0.5]
        );
    }

    #[test]
    fn dense_forward_identity() {
        let layer = linear_layer(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]);
        assert_eq!(layer.forward(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn dense_forward_hand_case() {
        let layer = linear_layer(2, 2, vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 1.0]);
        assert_eq!(layer.forward(&[1.0, 1.0]).unwrap(), vec![4.0, 8.0]);
    }

    #[test]
    fn dense_forward_sigmoid_of_bias() {
        let layer =
            DenseLayer::new(3, 1, Activation::Sigmoid, vec![0.0, 0.0, 0.0], vec![0.5]).unwrap();
        let out = layer.forward(&[9.0, -2.0, 0.3]).unwrap();
        assert_close(out[0], 0.6224593312018546, 1e-12);
    }

    #[test]
    fn dense_forward_rejects_bad_input_len() {
        let layer = linear_layer(2, 1, vec![1.0, 1.0], vec![0.0]);
        assert!(matches!(
            layer.forward(&[1.0, 2.0, 3.0]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn dense_layer_rejects_bad_shapes_and_nonfinite() {
        assert!(DenseLayer::new(2, 1, Activation::Linear, vec![1.0], vec![0.0]).is_err());
        assert!(DenseLayer::new(2, 1, Activation::Linear, vec![1.0, 2.0], vec![]).is_err());
        assert!(matches!(
            DenseLayer::new(1, 1, Activation::Linear, vec![f64::NAN], vec![0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn network_forward_composes_and_exposes_latent() {
        let net = Network::new(
            vec![
                linear_layer(1, 1, vec![2.0], vec![0.0]),
                linear_layer(1, 1, vec![3.0], vec![0.0]),
            ],
            0,
        )
        .unwrap();
        let pass = net.forward(&[1.0]).unwrap();
        assert_eq!(pass.latent(), &[2.0]);
        assert_eq!(pass.output(), &[6.0]);
        assert_eq!(pass.input(), &[1.0]);
    }

    #[test]
    fn network_forward_single_identity_layer() {
        let net = Network::new(
            vec![linear_layer(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0])],
            0,
        )
        .unwrap();
        let pass = net.forward(&[1.0, 2.0]).unwrap();
        assert_eq!(pass.output(), &[1.0, 2.0]);
    }

    #[test]
    fn network_forward_rejects_wrong_input_len() {
        let net = Network::new(vec![linear_layer(2, 1, vec![1.0, 1.0], vec![0.0])], 0).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn network_rejects_incompatible_chain_and_bad_latent_index() {
        let a = linear_layer(2, 3, vec![0.0; 6], vec![0.0; 3]);
        let b = linear_layer(2, 1, vec![0.0; 2], vec![0.0]);
        assert!(matches!(
            Network::new(vec![a.clone(), b], 0),
            Err(Error::Shape { .. })
        ));
        assert!(matches!(Network::new(vec![a], 5), Err(Error::Config(_))));
    }

    #[test]
    fn backward_zero_grads_give_zero_gradient_set() {
        let net = Network::new(
            vec![
                linear_layer(2, 2, vec![0.3, -0.2, 0.1, 0.4], vec![0.1, -0.1]),
                linear_layer(2, 2, vec![0.5, 0.5, -0.5, 0.2], vec![0.0, 0.0]),
            ],
            0,
        )
        .unwrap();
        let pass = net.forward(&[1.0, -1.0]).unwrap();
        let grads = net.backward(&pass, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(grads
            .weight_grads()
            .iter()
            .all(|g| g.iter().all(|&v| v == 0.0)));
        assert!(grads
            .bias_grads()
            .iter()
            .all(|g| g.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn backward_chain_rule_base_case() {
        // y = w·x with x = 2, output_grad = 1 → dL/dw = 2, dL/db = 1.
        let net = Network::new(vec![linear_layer(1, 1, vec![5.0], vec![0.0])], 0).unwrap();
        let pass = net.forward(&[2.0]).unwrap();
        let grads = net.backward(&pass, &[1.0], &[0.0]).unwrap();
        assert_eq!(grads.weight_grads()[0], vec![2.0]);
        assert_eq!(grads.bias_grads()[0], vec![1.0]);
    }

    #[test]
    fn backward_adds_latent_injection_at_the_latent_layer() {
        // Same net; the single layer is also the latent layer, so the two
        // gradients add: delta = 1 + 0.5 → dL/dw = 1.5·x = 3, dL/db = 1.5.
        let net = Network::new(vec![linear_layer(1, 1, vec![5.0], vec![0.0])], 0).unwrap();
        let pass = net.forward(&[2.0]).unwrap();
        let grads = net.backward(&pass, &[1.0], &[0.5]).unwrap();
        assert_eq!(grads.weight_grads()[0], vec![3.0]);
        assert_eq!(grads.bias_grads()[0], vec![1.5]);
    }

    #[test]
    fn backward_matches_finite_differences_on_random_net() {
        // Random 3-4-2 stack; scalar loss L = Σ c_o·out_o so output_grad = c.
        let net = init_network(&[3, 4, 2], &[Activation::ReLU, Activation::Sigmoid], 0, 7).unwrap();
        let x = [0.31, 0.87, 0.44];
        let c = [0.9, -1.3];
        let pass = net.forward(&x).unwrap();
        let grads = net.backward(&pass, &c, &[0.0; 4]).unwrap();

        let loss = |n: &Network| -> f64 {
            let out = n.forward(&x).unwrap();
            out.output().iter().zip(&c).map(|(o, w)| o * w).sum()
        };
        let eps = 1e-5;
        let mut probe = net.clone();
        for layer in 0..net.layers().len() {
            for idx in 0..net.layer_param_len(layer) {
                let orig = *probe.param_mut(layer, idx);
                *probe.param_mut(layer, idx) = orig + eps;
                let hi = loss(&probe);
                *probe.param_mut(layer, idx) = orig - eps;
                let lo = loss(&probe);
                *probe.param_mut(layer, idx) = orig;
                let numeric = (hi - lo) / (2.0 * eps);
                let analytic = Network::grad_at(&grads, layer, idx);
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12);
                assert!(
                    rel < 1e-4,
                    "layer {layer} param {idx}: analytic {analytic}, numeric {numeric}"
                );
            }
        }
    }

    #[test]
    fn backward_rejects_mismatched_grads() {
        let net = Network::new(vec![linear_layer(1, 1, vec![1.0], vec![0.0])], 0).unwrap();
        let pass = net.forward(&[1.0]).unwrap();
        assert!(matches!(
            net.backward(&pass, &[1.0, 2.0], &[0.0]),
            Err(Error::Shape { .. })
        ));
        assert!(matches!(
            net.backward(&pass, &[1.0], &[0.0, 0.0]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn init_network_is_deterministic_and_bounded() {
        let dims = [6, 2];
        let acts = [Activation::Linear];
        let a = init_network(&dims, &acts, 0, 11).unwrap();
        let b = init_network(&dims, &acts, 0, 11).unwrap();
        assert_eq!(a, b);

        let limit = (6.0_f64 / 6.0).sqrt();
        assert!(a.layers()[0].weights().iter().all(|w| w.abs() <= limit));
        assert!(a.layers()[0].biases().iter().all(|&b| b == 0.0));

        let c = init_network(&dims, &acts, 0, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_network_validates_inputs() {
        assert!(matches!(
            init_network(&[3], &[], 0, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            init_network(&[3, 0], &[Activation::ReLU], 0, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            init_network(&[3, 2], &[], 0, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            init_network(&[3, 2], &[Activation::ReLU], 4, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sgd_step_hand_case_and_zero_gradient_fixed_point() {
        let mut net = Network::new(vec![linear_layer(1, 1, vec![1.0], vec![2.0])], 0).unwrap();
        let mut grads = GradientSet::zeros_like(&net);
        grads.weight_grads[0][0] = 0.5;
        net.sgd_step(&grads, 0.1).unwrap();
        assert_eq!(net.layers()[0].weights()[0], 0.95);
        assert_eq!(net.layers()[0].biases()[0], 2.0);

        let before = net.clone();
        let zeros = GradientSet::zeros_like(&net);
        net.sgd_step(&zeros, 0.1).unwrap();
        assert_eq!(net, before);

        net.sgd_step(&grads, 0.0).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn sgd_step_rejects_negative_lr() {
        let mut net = Network::new(vec![linear_layer(1, 1, vec![1.0], vec![0.0])], 0).unwrap();
        let grads = GradientSet::zeros_like(&net);
        assert!(matches!(net.sgd_step(&grads, -0.1), Err(Error::Config(_))));
    }

    #[test]
    fn gradient_set_accumulate_and_scale() {
        let net = Network::new(vec![linear_layer(2, 1, vec![1.0, 1.0], vec![0.0])], 0).unwrap();
        let mut a = GradientSet::zeros_like(&net);
        a.weight_grads[0][0] = 1.0;
        let mut b = GradientSet::zeros_like(&net);
        b.weight_grads[0][0] = 2.0;
        b.bias_grads[0][0] = 4.0;
        a.accumulate(&b).unwrap();
        a.scale(0.5);
        assert_eq!(a.weight_grads[0], vec![1.5, 0.0]);
        assert_eq!(a.bias_grads[0], vec![2.0]);
    }

    #[test]
    fn gradient_check_exact_for_linear_mse() {
        // Quadratic loss in the parameters: central differences are exact
        // up to roundoff.
        let net = Network::new(
            vec![linear_layer(
                2,
                2,
                vec![0.9, 0.1, -0.2, 1.1],
                vec![0.05, -0.03],
            )],
            0,
        )
        .unwrap();
        let sample = Record::unlabeled(vec![0.4, 0.7]);
        let err = gradient_check(&net, &sample, &LossConfig::default(), 1e-5).unwrap();
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn gradient_check_labeled_random_net() {
        // AE-shaped stack with a 2-wide latent so the supervised head applies.
        let net = init_network(
            &[3, 4, 2, 4, 3],
            &[
                Activation::ReLU,
                Activation::Linear,
                Activation::ReLU,
                Activation::Sigmoid,
            ],
            1,
            3,
        )
        .unwrap();
        let sample = Record::labeled(vec![0.2, 0.6, 0.9], true);
        let err = gradient_check(&net, &sample, &LossConfig::default(), 1e-5).unwrap();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn gradient_check_rejects_zero_eps_and_bad_width() {
        let net = Network::new(vec![linear_layer(1, 1, vec![1.0], vec![0.0])], 0).unwrap();
        let sample = Record::unlabeled(vec![0.5]);
        assert!(matches!(
            gradient_check(&net, &sample, &LossConfig::default(), 0.0),
            Err(Error::Precondition(_))
        ));
        let wide = Record::unlabeled(vec![0.5, 0.5]);
        assert!(matches!(
            gradient_check(&net, &wide, &LossConfig::default(), 1e-5),
            Err(Error::Shape { .. })
        ));
    }
}
