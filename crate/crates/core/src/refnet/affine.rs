use ndarray::{Array1, Array2, Axis};

use super::net::RefNet;
use crate::error::Result;

/// Input-conditioned linear map from layer-`l` features to logits: `W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl AffineMap {
    pub fn apply(&self, features: &[f64]) -> Array1<f64> {
        self.weight.dot(&Array1::from(features.to_vec())) + &self.bias
    }
}

/// Affine map at layer `l` for the region containing `input`: each hidden layer above `l`
/// is masked by the input's activation pattern and multiplied through to the head.
pub fn affine_map_at(net: &RefNet, input: &[f64], l: usize) -> Result<AffineMap> {
    net.check_layer(l)?;
    let fwd = net.forward_record(input)?;
    let n = net.width(l);
    let mut weight = Array2::<f64>::eye(n);
    let mut bias = Array1::<f64>::zeros(n);
    for (j, layer) in net.hidden().iter().enumerate().skip(l) {
        let mask = fwd.pre_activations[j].mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
        let column = mask.view().insert_axis(Axis(1));
        weight = layer.weight.dot(&weight) * column;
        bias = (layer.weight.dot(&bias) + &layer.bias) * &mask;
    }
    let head = net.head();
    Ok(AffineMap {
        weight: head.weight.dot(&weight),
        bias: head.weight.dot(&bias) + &head.bias,
    })
}

/// Frobenius norm of `W_a - W_b` for the layer-`l` affine maps of two inputs.
pub fn mapping_difference(net: &RefNet, a: &[f64], b: &[f64], l: usize) -> Result<f64> {
    let wa = affine_map_at(net, a, l)?.weight;
    let wb = affine_map_at(net, b, l)?.weight;
    Ok((wa - wb).iter().map(|v| v * v).sum::<f64>().sqrt())
}
