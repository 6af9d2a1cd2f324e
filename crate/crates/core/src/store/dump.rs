//! On-disk activation dumps.
//!
//! A dump directory holds `manifest.json`, one `layer_<id>.npy` per declared layer
//! (`<f4`, C order, shape `[num_instances, ...shape]`) and an optional `meta.csv` whose
//! rows follow activation row order.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter};
use std::path::Path;

use ndarray::Array2;
use npyz::WriterBuilder;
use serde::{Deserialize, Serialize};

use super::dataset::{ActivationDataset, Metadata};
use super::layer::{validate_manifest, LayerSpec};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const META_FILE: &str = "meta.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub layers: Vec<LayerSpec>,
    pub num_instances: usize,
}

pub fn layer_file_name(layer_id: u32) -> String {
    format!("layer_{layer_id}.npy")
}

/// Loads and validates a dump directory.
pub fn ingest(dir: impl AsRef<Path>) -> Result<ActivationDataset> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(Error::Ingest(format!("missing {}", manifest_path.display())));
    }
    let text = fs::read_to_string(&manifest_path)
        .map_err(|e| Error::Ingest(format!("{}: {e}", manifest_path.display())))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::Schema(format!("{}: {e}", manifest_path.display())))?;
    validate_manifest(&manifest.layers)?;

    let mut activations = Vec::with_capacity(manifest.layers.len());
    for spec in &manifest.layers {
        let path = dir.join(layer_file_name(spec.layer_id));
        activations.push(read_layer(&path, spec, manifest.num_instances)?);
    }

    let meta_path = dir.join(META_FILE);
    let meta = if meta_path.is_file() {
        read_meta(&meta_path, manifest.num_instances)?
    } else {
        Metadata::anonymous(manifest.num_instances)
    };
    ActivationDataset::new(manifest.layers, activations, meta)
}

fn read_layer(path: &Path, spec: &LayerSpec, num_instances: usize) -> Result<Array2<f32>> {
    let file = File::open(path).map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;
    let schema = |msg: String| Error::Schema(format!("{}: {msg}", path.display()));
    let npy = npyz::NpyFile::new(BufReader::new(file)).map_err(|e| schema(e.to_string()))?;

    let expected_dtype: npyz::TypeStr = "<f4".parse().expect("valid type string");
    if npy.dtype() != npyz::DType::Plain(expected_dtype) {
        return Err(schema(format!("dtype {} is not <f4", npy.dtype().descr())));
    }
    if npy.order() != npyz::Order::C {
        return Err(schema("only C-order arrays are supported".into()));
    }
    let shape: Vec<usize> = npy.shape().iter().map(|&d| d as usize).collect();
    let mut declared = vec![num_instances];
    declared.extend(spec.shape.dims());
    let flat = [num_instances, spec.neurons()];
    if shape != declared && shape != flat {
        return Err(schema(format!(
            "shape {shape:?} does not match declared {declared:?} ({})",
            spec.shape
        )));
    }
    let values = npy.into_vec::<f32>().map_err(|e| schema(e.to_string()))?;
    Array2::from_shape_vec((num_instances, spec.neurons()), values).map_err(|e| schema(e.to_string()))
}

fn read_meta(path: &Path, num_instances: usize) -> Result<Metadata> {
    let schema = |msg: String| Error::Schema(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Ingest(e.to_string()))?;
    let headers = reader.headers().map_err(|e| schema(e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = column("instance_id").ok_or_else(|| schema("missing instance_id column".into()))?;
    let optional = [column("label"), column("prediction"), column("subclass")];

    let mut ids = Vec::with_capacity(num_instances);
    let mut columns: [Vec<u32>; 3] = Default::default();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| schema(e.to_string()))?;
        ids.push(record.get(id_col).unwrap_or_default().trim().to_string());
        for (slot, col) in optional.iter().enumerate() {
            if let Some(col) = col {
                let raw = record.get(*col).unwrap_or_default().trim();
                let value = raw
                    .parse::<u32>()
                    .map_err(|_| schema(format!("row {row}: {:?} is not a class id", raw)))?;
                columns[slot].push(value);
            }
        }
    }
    if ids.len() != num_instances {
        return Err(schema(format!("{} rows, expected {num_instances}", ids.len())));
    }
    let [labels, predictions, subclasses] = columns;
    Ok(Metadata {
        instance_ids: ids,
        labels: optional[0].map(|_| labels),
        predictions: optional[1].map(|_| predictions),
        subclass_labels: optional[2].map(|_| subclasses),
    })
}

/// Writes `dataset` as a dump directory readable by [`ingest`]. Output is byte-deterministic.
pub fn write_dump(dataset: &ActivationDataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;

    let manifest = Manifest {
        layers: dataset.layers().to_vec(),
        num_instances: dataset.num_instances(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;

    for spec in dataset.layers() {
        let matrix = dataset.activations(spec.layer_id)?;
        let mut shape = vec![dataset.num_instances() as u64];
        shape.extend(spec.shape.dims().into_iter().map(|d| d as u64));
        let file = BufWriter::new(File::create(dir.join(layer_file_name(spec.layer_id)))?);
        let mut writer = npyz::WriteOptions::new()
            .default_dtype()
            .shape(&shape)
            .writer(file)
            .begin_nd()?;
        writer.extend(matrix.iter().copied())?;
        writer.finish()?;
    }

    let meta = dataset.meta();
    let columns: Vec<(&str, &Vec<u32>)> = [
        ("label", &meta.labels),
        ("prediction", &meta.predictions),
        ("subclass", &meta.subclass_labels),
    ]
    .into_iter()
    .filter_map(|(name, col)| col.as_ref().map(|c| (name, c)))
    .collect();
    let mut out = csv::Writer::from_path(dir.join(META_FILE)).map_err(csv_io)?;
    let mut header = vec!["instance_id"];
    header.extend(columns.iter().map(|(name, _)| *name));
    out.write_record(&header).map_err(csv_io)?;
    for (i, id) in meta.instance_ids.iter().enumerate() {
        let mut record = vec![id.clone()];
        record.extend(columns.iter().map(|(_, col)| col[i].to_string()));
        out.write_record(&record).map_err(csv_io)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}
