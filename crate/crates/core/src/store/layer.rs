use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type LayerId = u32;

/// Layout of one layer's activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub enum LayerShape {
    Flat(usize),
    Conv {
        channels: usize,
        height: usize,
        width: usize,
    },
}

impl LayerShape {
    pub fn neurons(&self) -> usize {
        match *self {
            LayerShape::Flat(n) => n,
            LayerShape::Conv {
                channels,
                height,
                width,
            } => channels * height * width,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match *self {
            LayerShape::Flat(n) => vec![n],
            LayerShape::Conv {
                channels,
                height,
                width,
            } => vec![channels, height, width],
        }
    }

    pub fn is_conv(&self) -> bool {
        matches!(self, LayerShape::Conv { .. })
    }

    /// Channel-major flat index of `(c, y, x)`.
    pub fn flatten(&self, channel: usize, y: usize, x: usize) -> Option<usize> {
        match *self {
            LayerShape::Conv {
                channels,
                height,
                width,
            } if channel < channels && y < height && x < width => {
                Some(channel * height * width + y * width + x)
            }
            _ => None,
        }
    }

    /// Inverse of [`LayerShape::flatten`]; `None` for flat layers or out-of-range indices.
    pub fn unflatten(&self, index: usize) -> Option<(usize, usize, usize)> {
        match *self {
            LayerShape::Conv { height, width, .. } if index < self.neurons() => {
                let plane = height * width;
                Some((index / plane, (index % plane) / width, index % width))
            }
            _ => None,
        }
    }
}

impl TryFrom<Vec<usize>> for LayerShape {
    type Error = String;

    fn try_from(dims: Vec<usize>) -> std::result::Result<Self, String> {
        let shape = match dims.as_slice() {
            [n] => LayerShape::Flat(*n),
            [c, h, w] => LayerShape::Conv {
                channels: *c,
                height: *h,
                width: *w,
            },
            other => return Err(format!("shape must have 1 or 3 dims, got {other:?}")),
        };
        if shape.neurons() == 0 {
            return Err(format!("shape {dims:?} has no neurons"));
        }
        Ok(shape)
    }
}

impl From<LayerShape> for Vec<usize> {
    fn from(shape: LayerShape) -> Self {
        shape.dims()
    }
}

impl fmt::Display for LayerShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerShape::Flat(n) => write!(f, "flat[{n}]"),
            LayerShape::Conv {
                channels,
                height,
                width,
            } => write!(f, "conv[{channels},{height},{width}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LayerSpec {
    pub layer_id: LayerId,
    /// Free-form label; also records where the activations were tapped (e.g. pre/post pooling).
    pub name: String,
    pub shape: LayerShape,
}

impl LayerSpec {
    pub fn new(layer_id: LayerId, name: impl Into<String>, shape: LayerShape) -> Self {
        LayerSpec {
            layer_id,
            name: name.into(),
            shape,
        }
    }

    pub fn neurons(&self) -> usize {
        self.shape.neurons()
    }
}

/// Checks the manifest-level invariants: non-empty shapes, strictly increasing ids.
pub(crate) fn validate_manifest(layers: &[LayerSpec]) -> Result<()> {
    for spec in layers {
        if spec.neurons() == 0 {
            return Err(Error::Schema(format!("layer {} has no neurons", spec.layer_id)));
        }
    }
    for pair in layers.windows(2) {
        if pair[1].layer_id <= pair[0].layer_id {
            return Err(Error::Schema(format!(
                "layer ids must be unique and strictly increasing ({} follows {})",
                pair[1].layer_id, pair[0].layer_id
            )));
        }
    }
    Ok(())
}

/// A single neuron addressed by layer and flat (channel-major) index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NeuronRef {
    pub layer: LayerId,
    pub index: usize,
}

impl NeuronRef {
    pub fn new(layer: LayerId, index: usize) -> Self {
        NeuronRef { layer, index }
    }
}

impl fmt::Display for NeuronRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.layer, self.index)
    }
}
