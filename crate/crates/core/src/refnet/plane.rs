//! Internal decision boundaries on a 2-D slice of a layer's feature space.
//!
//! Three anchor feature vectors `f0, f1, f2` span the plane
//! `p(u, v) = f0 + u (f1 - f0) + v (f2 - f0)`, sampled on a regular grid over
//! `[0, 1] x [0, 1]`. For each sampled neuron above the layer, cell edges whose endpoint
//! states differ are cut by linear interpolation of the pre-activation and joined into
//! segments (marching squares).

use std::fmt::Write;

use ndarray::Array1;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::net::RefNet;
use crate::error::{Error, Result};
use crate::store::NeuronRef;

/// A boundary piece in plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneSegment {
    pub neuron: NeuronRef,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

#[derive(Debug, Clone)]
pub struct PlaneSlice {
    pub layer: usize,
    pub anchors: [Array1<f64>; 3],
    pub grid: usize,
    /// Sampled neurons above `layer`, in canonical order. Layer ids are 1-based hidden
    /// layer indices.
    pub neurons: Vec<NeuronRef>,
    pub segments: Vec<PlaneSegment>,
    /// Pre-activation of each sampled neuron at grid vertex `(i, j)`, stored at
    /// `[(j * grid + i) * neurons.len() + n]`.
    values: Vec<f64>,
}

impl PlaneSlice {
    /// Plane coordinates of grid vertex `(i, j)`.
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let step = 1.0 / (self.grid - 1) as f64;
        (i as f64 * step, j as f64 * step)
    }

    /// Feature vector at plane coordinates `(u, v)`.
    pub fn point(&self, u: f64, v: f64) -> Array1<f64> {
        let [f0, f1, f2] = &self.anchors;
        f0 + &((f1 - f0) * u) + &((f2 - f0) * v)
    }

    /// Pre-activation of sampled neuron `n` at grid vertex `(i, j)`.
    pub fn value(&self, i: usize, j: usize, n: usize) -> f64 {
        self.values[(j * self.grid + i) * self.neurons.len() + n]
    }

    /// Segments as CSV with header `neuron_id,x0,y0,x1,y1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("neuron_id,x0,y0,x1,y1\n");
        for s in &self.segments {
            writeln!(out, "{},{},{},{},{}", s.neuron, s.x0, s.y0, s.x1, s.y1).unwrap();
        }
        out
    }
}

/// Plane slice through the layer-`layer` features of three network inputs.
pub fn plane_slice(
    net: &RefNet,
    anchors: [&[f64]; 3],
    layer: usize,
    grid: usize,
    neuron_sample: usize,
    seed: u64,
) -> Result<PlaneSlice> {
    let features = [
        net.features(anchors[0], layer)?,
        net.features(anchors[1], layer)?,
        net.features(anchors[2], layer)?,
    ];
    plane_slice_features(net, features, layer, grid, neuron_sample, seed)
}

/// Plane slice through three feature vectors already at layer `layer`.
pub fn plane_slice_features(
    net: &RefNet,
    anchors: [Array1<f64>; 3],
    layer: usize,
    grid: usize,
    neuron_sample: usize,
    seed: u64,
) -> Result<PlaneSlice> {
    net.check_layer(layer)?;
    if grid < 2 {
        return Err(Error::query(format!("grid resolution must be at least 2, got {grid}")));
    }
    if anchors.iter().any(|a| a.len() != net.width(layer)) {
        return Err(Error::query(format!("anchors must have width {}", net.width(layer))));
    }
    let d1 = &anchors[1] - &anchors[0];
    let d2 = &anchors[2] - &anchors[0];
    let (n1, n2, cross) = (d1.dot(&d1), d2.dot(&d2), d1.dot(&d2));
    if n1 == 0.0 || n2 == 0.0 || n1 * n2 - cross * cross <= 1e-12 * n1 * n2 {
        return Err(Error::degenerate("plane anchors are identical or collinear"));
    }

    let all: Vec<NeuronRef> = (layer + 1..=net.depth())
        .flat_map(|l| (0..net.width(l)).map(move |i| NeuronRef::new(l as u32, i)))
        .collect();
    if all.is_empty() {
        return Err(Error::query(format!("no hidden neurons above layer {layer}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = sample(&mut rng, all.len(), neuron_sample.min(all.len())).into_vec();
    picked.sort_unstable();
    let neurons: Vec<NeuronRef> = picked.iter().map(|&p| all[p]).collect();

    let mut slice = PlaneSlice {
        layer,
        anchors,
        grid,
        neurons,
        segments: Vec::new(),
        values: Vec::new(),
    };
    let vertices: Vec<(usize, usize)> = (0..grid).flat_map(|j| (0..grid).map(move |i| (i, j))).collect();
    let per_vertex: Vec<Vec<f64>> = vertices
        .par_iter()
        .map(|&(i, j)| {
            let (u, v) = slice.coords(i, j);
            let p = slice.point(u, v);
            let fwd = net.forward_from(layer, p.as_slice().expect("contiguous"))?;
            Ok(slice
                .neurons
                .iter()
                .map(|n| fwd.pre_activations[n.layer as usize - layer - 1][n.index])
                .collect())
        })
        .collect::<Result<_>>()?;
    slice.values = per_vertex.into_iter().flatten().collect();
    slice.segments = march(&slice);
    Ok(slice)
}

fn march(slice: &PlaneSlice) -> Vec<PlaneSegment> {
    let g = slice.grid;
    let mut segments = Vec::new();
    for (n, &neuron) in slice.neurons.iter().enumerate() {
        for j in 0..g - 1 {
            for i in 0..g - 1 {
                // corners: bottom-left, bottom-right, top-right, top-left
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let vals = corners.map(|(a, b)| slice.value(a, b, n));
                let on = vals.map(|v| v > 0.0);
                // edges: bottom, right, top, left
                let mut cuts: [Option<(f64, f64)>; 4] = [None; 4];
                for e in 0..4 {
                    let (a, b) = (e, (e + 1) % 4);
                    if on[a] != on[b] {
                        let t = vals[a] / (vals[a] - vals[b]);
                        let (xa, ya) = slice.coords(corners[a].0, corners[a].1);
                        let (xb, yb) = slice.coords(corners[b].0, corners[b].1);
                        cuts[e] = Some((xa + t * (xb - xa), ya + t * (yb - ya)));
                    }
                }
                let present: Vec<usize> = (0..4).filter(|&e| cuts[e].is_some()).collect();
                let pairs: Vec<(usize, usize)> = match present.len() {
                    2 => vec![(present[0], present[1])],
                    4 => {
                        let center_on = vals.iter().sum::<f64>() / 4.0 > 0.0;
                        if center_on == on[0] {
                            // bottom-left/top-right joined; cut off the other two corners
                            vec![(0, 1), (2, 3)]
                        } else {
                            vec![(3, 0), (1, 2)]
                        }
                    }
                    _ => vec![],
                };
                for (a, b) in pairs {
                    let (x0, y0) = cuts[a].unwrap();
                    let (x1, y1) = cuts[b].unwrap();
                    segments.push(PlaneSegment { neuron, x0, y0, x1, y1 });
                }
            }
        }
    }
    segments
}
