//! Weight file: little-endian u32 header length, a JSON header `{"dims": [...], "seed": ...}`,
//! then for every layer (hidden layers, then the head) the row-major `out x in` weight
//! block followed by the bias block, all as little-endian `f32`.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::net::{Dense, RefNet};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dims: Vec<usize>,
    seed: Option<u64>,
}

pub fn encode_weights(net: &RefNet) -> Result<Vec<u8>> {
    let header = serde_json::to_vec(&Header {
        dims: net.dims(),
        seed: net.seed(),
    })?;
    let mut out = Vec::new();
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    for layer in net.hidden().iter().chain(std::iter::once(net.head())) {
        for v in layer.weight.iter().chain(layer.bias.iter()) {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_weights(bytes: &[u8]) -> Result<RefNet> {
    let bad = |msg: &str| Error::Schema(format!("weight file: {msg}"));
    let header_len = bytes
        .get(..4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
        .ok_or_else(|| bad("truncated header length"))?;
    let header_bytes = bytes.get(4..4 + header_len).ok_or_else(|| bad("truncated header"))?;
    let header: Header = serde_json::from_slice(header_bytes).map_err(|e| bad(&e.to_string()))?;
    if header.dims.len() < 2 || header.dims.contains(&0) {
        return Err(bad("invalid dims"));
    }
    let mut values = bytes[4 + header_len..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64);
    let expected: usize = header.dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
    if (bytes.len() - 4 - header_len) != expected * 4 {
        return Err(bad("payload size does not match dims"));
    }
    let mut layers: Vec<Dense> = header
        .dims
        .windows(2)
        .map(|w| {
            let weight = Array2::from_shape_fn((w[1], w[0]), |_| values.next().unwrap());
            let bias = Array1::from_shape_fn(w[1], |_| values.next().unwrap());
            Dense { weight, bias }
        })
        .collect();
    let head = layers.pop().expect("at least one layer");
    Ok(RefNet::new(layers, head)?.with_seed(header.seed))
}

pub fn save_weights(net: &RefNet, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_weights(net)?)?;
    Ok(())
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<RefNet> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;
    decode_weights(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let net = RefNet::seeded(&[5, 7, 3], 42, 0.1).unwrap();
        let bytes = encode_weights(&net).unwrap();
        let back = decode_weights(&bytes).unwrap();
        assert_eq!(back, net);
        assert_eq!(encode_weights(&back).unwrap(), bytes);
    }

    #[test]
    fn rejects_truncated_payload() {
        let net = RefNet::seeded(&[2, 2], 0, 0.0).unwrap();
        let bytes = encode_weights(&net).unwrap();
        assert!(matches!(decode_weights(&bytes[..bytes.len() - 2]), Err(Error::Schema(_))));
        assert!(decode_weights(&[1, 0]).is_err());
    }
}
