//! Core library: dense matrix math, FFT, variational mode decomposition,
//! a BiLSTM + multi-head-attention binary classifier with hand-derived
//! backpropagation, particle swarm hyperparameter search, and the tabular
//! preprocessing / cross-validation / metrics pipeline that ties them together.

pub mod error;
pub mod math;
pub mod model;
pub mod pipeline;
pub mod pso;
pub mod tune;
pub mod util;
pub mod vmd;

pub use error::{Error, Result};
