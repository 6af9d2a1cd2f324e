pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod refnet;
pub mod region;
pub mod store;
pub mod synth;

pub use error::{Error, Result};
