//! Corpus generation, file formats and baselines for the earcon toolkit.
//!
//! This crate wraps the pure kernels in [`earcon_core`] with everything that
//! touches the filesystem: WAV encoding, the metadata CSV, the corpus
//! manifest, baseline reports and the spectrogram figure. The `earcon`
//! binary exposes them as subcommands.

pub mod baselines;
pub mod commands;
pub mod corpus;
mod error;
pub mod figure;
pub mod manifest;
pub mod metadata;
pub mod wav;

pub use error::{ClipFailure, Error, Result};

/// Semantic version written into every metadata row and the manifest.
pub const DATASET_VERSION: &str = "1.0.0";
