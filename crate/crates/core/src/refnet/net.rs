use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Configuration;
use crate::error::{Error, Result};

/// Default layer widths: 16 inputs, five hidden layers of 64, 10 logits.
pub const DEFAULT_DIMS: [usize; 7] = [16, 64, 64, 64, 64, 64, 10];

/// Affine layer `y = W x + b` with `W` stored `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn new(weight: Array2<f64>, bias: Array1<f64>) -> Result<Self> {
        if weight.nrows() != bias.len() {
            return Err(Error::query(format!(
                "weight has {} rows but bias has {} entries",
                weight.nrows(),
                bias.len()
            )));
        }
        Ok(Dense { weight, bias })
    }

    pub fn in_dim(&self) -> usize {
        self.weight.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.nrows()
    }

    pub fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.weight.dot(&x) + &self.bias
    }
}

/// Dense ReLU network: hidden layers `1..=L` followed by a linear head.
///
/// Layer `0` is the input; layer `l` (for `1 <= l <= L`) is the post-ReLU output of
/// hidden layer `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefNet {
    hidden: Vec<Dense>,
    head: Dense,
    seed: Option<u64>,
}

/// Result of a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub logits: Array1<f64>,
    /// Pre-activations of hidden layers, starting at the first layer evaluated.
    pub pre_activations: Vec<Array1<f64>>,
    /// Post-ReLU outputs, aligned with `pre_activations`.
    pub activations: Vec<Array1<f64>>,
}

impl RefNet {
    pub fn new(hidden: Vec<Dense>, head: Dense) -> Result<Self> {
        let mut prev: Option<usize> = None;
        for (i, layer) in hidden.iter().chain(std::iter::once(&head)).enumerate() {
            if let Some(p) = prev {
                if layer.in_dim() != p {
                    return Err(Error::query(format!(
                        "layer {} expects {} inputs but receives {p}",
                        i + 1,
                        layer.in_dim()
                    )));
                }
            }
            prev = Some(layer.out_dim());
        }
        Ok(RefNet { hidden, head, seed: None })
    }

    /// Seeded network with uniform `[-a, a]` weights, `a = sqrt(6 / (fan_in + fan_out))`,
    /// and biases uniform in `[-bias_scale, bias_scale]`. Values are rounded to `f32`
    /// so the network round-trips through the weight file exactly.
    pub fn seeded(dims: &[usize], seed: u64, bias_scale: f64) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::query(format!("invalid layer dims {dims:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers: Vec<Dense> = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let weight = Array2::from_shape_fn((fan_out, fan_in), |_| round_f32(rng.gen_range(-a..=a)));
                let bias = Array1::from_shape_fn(fan_out, |_| {
                    if bias_scale > 0.0 {
                        round_f32(rng.gen_range(-bias_scale..=bias_scale))
                    } else {
                        0.0
                    }
                });
                Dense { weight, bias }
            })
            .collect();
        let head = layers.pop().expect("at least one layer");
        let mut net = RefNet::new(layers, head)?;
        net.seed = Some(seed);
        Ok(net)
    }

    /// [`DEFAULT_DIMS`] with bias scale 0.1.
    pub fn default_seeded(seed: u64) -> Self {
        RefNet::seeded(&DEFAULT_DIMS, seed, 0.1).expect("default dims are valid")
    }

    pub(crate) fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn hidden(&self) -> &[Dense] {
        &self.hidden
    }

    pub fn head(&self) -> &Dense {
        &self.head
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.hidden.len()
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.first().unwrap_or(&self.head).in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.head.out_dim()
    }

    /// Width of layer `l` (`0` = input).
    pub fn width(&self, l: usize) -> usize {
        if l == 0 {
            self.input_dim()
        } else {
            self.hidden[l - 1].out_dim()
        }
    }

    /// `[input, hidden..., output]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_dim()];
        dims.extend(self.hidden.iter().map(Dense::out_dim));
        dims.push(self.output_dim());
        dims
    }

    pub(crate) fn check_layer(&self, l: usize) -> Result<()> {
        if l > self.depth() {
            return Err(Error::query(format!("layer {l} out of range (depth {})", self.depth())));
        }
        Ok(())
    }

    /// Logits and per-layer activations for an input.
    pub fn forward_record(&self, input: &[f64]) -> Result<Forward> {
        self.forward_from(0, input)
    }

    /// Evaluates layers `l+1..=L` and the head starting from layer-`l` features.
    pub fn forward_from(&self, l: usize, features: &[f64]) -> Result<Forward> {
        self.check_layer(l)?;
        if features.len() != self.width(l) {
            return Err(Error::query(format!(
                "layer {l} has width {} but got {} features",
                self.width(l),
                features.len()
            )));
        }
        let mut x = Array1::from(features.to_vec());
        let mut pre_activations = Vec::with_capacity(self.depth() - l);
        let mut activations = Vec::with_capacity(self.depth() - l);
        for layer in &self.hidden[l..] {
            let z = layer.apply(x.view());
            x = z.mapv(|v| v.max(0.0));
            pre_activations.push(z);
            activations.push(x.clone());
        }
        Ok(Forward {
            logits: self.head.apply(x.view()),
            pre_activations,
            activations,
        })
    }

    pub fn logits(&self, input: &[f64]) -> Result<Array1<f64>> {
        Ok(self.forward_record(input)?.logits)
    }

    /// Activation states of every neuron in layers `l+1..=L`, given layer-`l` features.
    pub fn configuration_above(&self, l: usize, features: &[f64]) -> Result<Configuration> {
        let fwd = self.forward_from(l, features)?;
        Ok(Configuration::from_bits(
            fwd.pre_activations.iter().flat_map(|z| z.iter().map(|&v| v > 0.0)),
        ))
    }

    /// Layer-`l` features of an input (`l = 0` returns the input).
    pub fn features(&self, input: &[f64], l: usize) -> Result<Array1<f64>> {
        self.check_layer(l)?;
        if l == 0 {
            return Ok(Array1::from(input.to_vec()));
        }
        let mut fwd = self.forward_record(input)?;
        Ok(fwd.activations.swap_remove(l - 1))
    }
}

fn round_f32(v: f64) -> f64 {
    v as f32 as f64
}
