//! Restores a missing drift-chamber segment in a six-super-layer track candidate.
//!
//! A track candidate is summarized by six mean wire positions, one per
//! super-layer. When one segment is missing its slot is set to `0.0`, and a
//! 6-12-6-12-6 denoising autoencoder reconstructs the full vector; the
//! reconstructed value at the missing slot is the inferred segment position.
//!
//! Modules, bottom-up:
//!
//! - [`nn`]: dense sigmoid networks, backpropagation, finite-difference checks,
//!   momentum SGD.
//! - [`trackgen`]: synthetic quadratic trajectories and the track CSV format.
//! - [`dataset`]: random-index and all-indices corruption, normalization, splits.
//! - [`train`]: the online training loop and the text model format.
//! - [`eval`]: residuals at the missing slot, summary statistics, histograms.
//! - [`cli`]: the `gen`, `train`, `eval` and `infer` commands.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod cli;
pub mod dataset;
mod error;
pub mod eval;
pub mod io;
pub mod model;
pub mod nn;
pub mod train;
pub mod trackgen;

pub use dataset::{corrupt_expand, corrupt_random, split, CorruptedPair, NormSpec, Scheme};
pub use error::{Error, Result};
pub use eval::{evaluate, infer_missing, summarize, EvalMode, EvalReport, Residual};
pub use model::{load_model, save_model};
pub use nn::{init_network, Activation, DenseLayer, DenseNetwork, GradientSet, CANONICAL_DIMS};
pub use train::{train, TrainConfig, TrainReport};
pub use trackgen::{gen_dataset, gen_track, mean_wire, GenConfig, SegmentHits, TrackSample};
