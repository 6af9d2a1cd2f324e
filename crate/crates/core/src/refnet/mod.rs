//! Reference piecewise-linear network used to check geometric properties of
//! configurations end to end.

mod affine;
mod export;
mod net;
mod plane;
mod weights;

pub use affine::{affine_map_at, mapping_difference, AffineMap};
pub use export::{
    activation_dataset, batch_logits, export_activations, sample_inputs, teacher_labels, WEIGHTS_FILE,
};
pub use net::{Dense, Forward, RefNet, DEFAULT_DIMS};
pub use plane::{plane_slice, plane_slice_features, PlaneSegment, PlaneSlice};
pub use weights::{decode_weights, encode_weights, load_weights, save_weights};
