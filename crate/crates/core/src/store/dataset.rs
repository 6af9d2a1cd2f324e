use std::collections::HashSet;

use ndarray::Array2;

use super::layer::{validate_manifest, LayerId, LayerSpec};
use crate::error::{Error, Result};

/// Per-instance metadata. Absent columns disable the analyses that need them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub instance_ids: Vec<String>,
    pub labels: Option<Vec<u32>>,
    pub predictions: Option<Vec<u32>>,
    pub subclass_labels: Option<Vec<u32>>,
}

impl Metadata {
    /// Instance ids `"0"`, `"1"`, ... and no label columns.
    pub fn anonymous(num_instances: usize) -> Self {
        Metadata {
            instance_ids: (0..num_instances).map(|i| i.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn with_labels(mut self, labels: Vec<u32>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn with_predictions(mut self, predictions: Vec<u32>) -> Self {
        self.predictions = Some(predictions);
        self
    }

    pub fn with_subclass_labels(mut self, subclasses: Vec<u32>) -> Self {
        self.subclass_labels = Some(subclasses);
        self
    }

    fn validate(&self, num_instances: usize) -> Result<()> {
        if self.instance_ids.len() != num_instances {
            return Err(Error::Schema(format!(
                "metadata has {} instance ids, expected {num_instances}",
                self.instance_ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(num_instances);
        for id in &self.instance_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Schema(format!("duplicate instance id {id:?}")));
            }
        }
        for (name, column) in [
            ("label", &self.labels),
            ("prediction", &self.predictions),
            ("subclass", &self.subclass_labels),
        ] {
            if let Some(values) = column {
                if values.len() != num_instances {
                    return Err(Error::Schema(format!(
                        "{name} column has {} rows, expected {num_instances}",
                        values.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Validated, immutable activations for a set of instances.
///
/// Row `i` of every layer matrix belongs to instance `i`; conv layers are flattened
/// channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationDataset {
    layers: Vec<LayerSpec>,
    activations: Vec<Array2<f32>>,
    meta: Metadata,
}

impl ActivationDataset {
    pub fn new(layers: Vec<LayerSpec>, activations: Vec<Array2<f32>>, meta: Metadata) -> Result<Self> {
        validate_manifest(&layers)?;
        if layers.len() != activations.len() {
            return Err(Error::Schema(format!(
                "{} layers declared but {} activation matrices supplied",
                layers.len(),
                activations.len()
            )));
        }
        let num_instances = meta.instance_ids.len();
        for (spec, matrix) in layers.iter().zip(&activations) {
            let (rows, cols) = matrix.dim();
            if rows != num_instances || cols != spec.neurons() {
                return Err(Error::Schema(format!(
                    "layer {} declared [{num_instances}, {}] ({}) but has [{rows}, {cols}]",
                    spec.layer_id,
                    spec.neurons(),
                    spec.shape
                )));
            }
        }
        meta.validate(num_instances)?;
        for (spec, matrix) in layers.iter().zip(&activations) {
            for (instance, row) in matrix.outer_iter().enumerate() {
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Data {
                        layer: spec.layer_id,
                        instance,
                    });
                }
            }
        }
        Ok(ActivationDataset {
            layers,
            activations,
            meta,
        })
    }

    pub fn num_instances(&self) -> usize {
        self.meta.instance_ids.len()
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn meta(&self) -> &Metadata {
        &self.meta
    }

    fn position(&self, layer: LayerId) -> Result<usize> {
        self.layers
            .iter()
            .position(|s| s.layer_id == layer)
            .ok_or_else(|| Error::query(format!("unknown layer id {layer}")))
    }

    pub fn layer(&self, layer: LayerId) -> Result<&LayerSpec> {
        Ok(&self.layers[self.position(layer)?])
    }

    pub fn activations(&self, layer: LayerId) -> Result<&Array2<f32>> {
        Ok(&self.activations[self.position(layer)?])
    }

    /// Total neurons over the requested layers.
    pub fn neuron_count(&self, layers: &[LayerId]) -> Result<usize> {
        let mut seen = HashSet::new();
        let mut total = 0;
        for &id in layers {
            let spec = self.layer(id)?;
            if seen.insert(id) {
                total += spec.neurons();
            }
        }
        Ok(total)
    }

    /// Index of the instance with the given id. Falls back to a numeric row index.
    pub fn resolve_instance(&self, id: &str) -> Result<usize> {
        if let Some(i) = self.meta.instance_ids.iter().position(|x| x == id) {
            return Ok(i);
        }
        match id.parse::<usize>() {
            Ok(i) if i < self.num_instances() => Ok(i),
            _ => Err(Error::query(format!("unknown instance {id:?}"))),
        }
    }

    /// Same dataset with every activation multiplied by `factor`.
    pub fn scaled(&self, factor: f32) -> Result<Self> {
        let activations = self.activations.iter().map(|m| m * factor).collect();
        ActivationDataset::new(self.layers.clone(), activations, self.meta.clone())
    }

    /// Serialization used for byte-level equality checks: layer specs, then row-major
    /// little-endian values, then metadata.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.num_instances() as u64).to_le_bytes());
        for (spec, matrix) in self.layers.iter().zip(&self.activations) {
            out.extend_from_slice(&spec.layer_id.to_le_bytes());
            out.extend_from_slice(spec.name.as_bytes());
            out.push(0);
            for d in spec.shape.dims() {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for v in matrix.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        for id in &self.meta.instance_ids {
            out.extend_from_slice(id.as_bytes());
            out.push(0);
        }
        for column in [&self.meta.labels, &self.meta.predictions, &self.meta.subclass_labels] {
            match column {
                Some(values) => {
                    out.push(1);
                    values.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
                }
                None => out.push(0),
            }
        }
        out
    }
}
