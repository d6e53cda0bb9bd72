use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::loss::{balanced_bce_term, PROB_EPS};
use crate::error::{Error, Result};

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Fully connected layer computing `weights * x + bias`; `weights` is
/// `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl DenseLayer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }
}

/// Feed-forward network: ReLU on every hidden layer, a single sigmoid output
/// unit. With no hidden layer it is a logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

impl Network {
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Parameter("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            Error::check_len(pair[0].outputs(), pair[1].inputs())?;
        }
        for layer in &layers {
            Error::check_len(layer.outputs(), layer.bias.len())?;
        }
        let last = layers.last().unwrap();
        Error::check_len(1, last.outputs())?;
        if layers.iter().any(|l| {
            l.weights
                .iter()
                .chain(l.bias.iter())
                .any(|v| !v.is_finite())
        }) {
            return Err(Error::Parameter("network parameters must be finite".into()));
        }
        Ok(Self { layers })
    }

    /// Logistic regression `sigmoid(w . x + b)`.
    pub fn logistic(weights: Vec<f64>, bias: f64) -> Result<Self> {
        let d = weights.len();
        Self::from_layers(vec![DenseLayer {
            weights: Array2::from_shape_vec((1, d), weights).expect("1 x d"),
            bias: Array1::from_elem(1, bias),
        }])
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Parameter("need input and output dimensions".into()));
        }
        Self::from_layers(
            dims.windows(2)
                .map(|w| DenseLayer::zeros(w[0], w[1]))
                .collect(),
        )
    }

    /// He initialization: weights from N(0, 2 / fan_in), zero biases.
    pub fn he_init(dims: &[usize], seed: u64) -> Result<Self> {
        let mut net = Self::zeros(dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut net.layers {
            let std = (2.0 / layer.inputs() as f64).sqrt();
            let normal = Normal::new(0.0, std).map_err(|e| Error::Parameter(e.to_string()))?;
            layer.weights.mapv_inplace(|_| normal.sample(&mut rng));
        }
        Ok(net)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    /// Layer widths from input to output, e.g. `[d, 60, 60, 60, 1]`.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs())
            .chain(self.layers.iter().map(DenseLayer::outputs))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    /// All parameters, layer by layer, weights (row-major) before bias.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        Error::check_len(self.param_count(), flat.len())?;
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            l.weights
                .iter_mut()
                .chain(l.bias.iter_mut())
                .for_each(|v| *v = it.next().unwrap());
        }
        Ok(())
    }

    pub(crate) fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &mut self.layers {
            out.push(l.weights.as_slice_mut().expect("standard layout"));
            out.push(l.bias.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub(crate) fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            out.push(l.weights.as_slice().expect("standard layout"));
            out.push(l.bias.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn forward_row(&self, row: &[f64]) -> Result<f64> {
        Error::check_len(self.input_dim(), row.len())?;
        let mut act = Array1::from(row.to_vec());
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = layer.weights.dot(&act) + &layer.bias;
            if k < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            act = z;
        }
        Ok(sigmoid(act[0]))
    }

    /// Output logits for each row of `x`.
    fn logits(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        let mut act = x.to_owned();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = act.dot(&layer.weights.t()) + &layer.bias;
            if k < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            act = z;
        }
        act.index_axis_move(Axis(1), 0)
    }

    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Error::check_len(self.input_dim(), x.ncols())?;
        if x.nrows() == 0 {
            return Ok(Vec::new());
        }
        Ok(self.logits(x).iter().map(|&z| sigmoid(z)).collect())
    }

    /// Mean balanced cross-entropy over the batch and its exact gradient
    /// with respect to every parameter (same layout as `self`).
    pub fn loss_and_gradient(
        &self,
        x: ArrayView2<'_, f64>,
        labels: &[u8],
        alpha: f64,
    ) -> Result<(f64, Network)> {
        Error::check_len(self.input_dim(), x.ncols())?;
        Error::check_len(x.nrows(), labels.len())?;
        let b = x.nrows();
        if b == 0 {
            return Err(Error::Precondition("empty batch".into()));
        }
        let last = self.layers.len() - 1;

        // activations[k] is the input to layer k
        let mut activations: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_owned());
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = activations[k].dot(&layer.weights.t()) + &layer.bias;
            if k < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            activations.push(z);
        }
        let logits = activations.pop().unwrap();

        let mut loss = 0.0;
        let mut delta = Array2::zeros((b, 1));
        for (i, (&z, &y)) in logits.column(0).iter().zip(labels).enumerate() {
            let p = sigmoid(z);
            loss += balanced_bce_term(y, p, alpha);
            // the clip is flat outside [eps, 1 - eps]
            let d = if !(PROB_EPS..=1.0 - PROB_EPS).contains(&p) {
                0.0
            } else if y == 1 {
                -alpha * (1.0 - p)
            } else {
                (1.0 - alpha) * p
            };
            delta[[i, 0]] = d / b as f64;
        }
        loss /= b as f64;

        let mut grads: Vec<DenseLayer> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let input = &activations[k];
            let gw = delta.t().dot(input);
            let gb = delta.sum_axis(Axis(0));
            if k > 0 {
                let mut back = delta.dot(&self.layers[k].weights);
                // ReLU derivative from the stored post-activation
                Zip::from(&mut back).and(input).for_each(|d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
            grads.push(DenseLayer {
                weights: gw,
                bias: gb,
            });
        }
        grads.reverse();
        Ok((loss, Network { layers: grads }))
    }
}

/// On-disk form of a network: dims plus flattened row-major parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub dims: Vec<usize>,
    pub layers: Vec<LayerDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerDocument {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl From<&Network> for NetworkDocument {
    fn from(net: &Network) -> Self {
        Self {
            dims: net.dims(),
            layers: net
                .layers
                .iter()
                .map(|l| LayerDocument {
                    weights: l.weights.iter().copied().collect(),
                    bias: l.bias.to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<NetworkDocument> for Network {
    type Error = Error;

    fn try_from(doc: NetworkDocument) -> Result<Self> {
        Error::check_len(doc.dims.len().saturating_sub(1), doc.layers.len())?;
        let layers = doc
            .dims
            .windows(2)
            .zip(doc.layers)
            .map(|(w, l)| {
                Error::check_len(w[0] * w[1], l.weights.len())?;
                Ok(DenseLayer {
                    weights: Array2::from_shape_vec((w[1], w[0]), l.weights).expect("checked"),
                    bias: Array1::from(l.bias),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Network::from_layers(layers)
    }
}
