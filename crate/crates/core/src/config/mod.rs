//! Binarized activation configurations, configuration distance and exact neighbor search.

mod bits;
mod cache;
mod knn;
mod neuron_set;
mod store;

pub use bits::{hamming_words, Configuration};
pub use cache::{binarize_cached, read_cache, write_cache};
pub use knn::{config_distances, config_knn, distance_histogram, feature_knn, knn, Metric, Neighbor};
pub use neuron_set::NeuronSet;
pub use store::{binarize, ConfigurationStore};
