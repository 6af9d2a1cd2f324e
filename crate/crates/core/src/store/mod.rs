//! Activation dumps: layer manifests, validated activation matrices and instance metadata.

mod dataset;
mod dump;
mod layer;

pub use dataset::{ActivationDataset, Metadata};
pub use dump::{ingest, layer_file_name, write_dump, Manifest, MANIFEST_FILE, META_FILE};
pub use layer::{LayerId, LayerShape, LayerSpec, NeuronRef};
