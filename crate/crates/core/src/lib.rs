//! Synthesis and analysis kernels for a small, fully parametric earcon corpus.
//!
//! Everything in this crate is a pure function of its inputs and only needs
//! `alloc`: oscillators, amplitude modulation, ADSR envelopes, Schroeder
//! reverberation, level normalization, STFT / log-mel / spectral statistics,
//! YIN pitch estimation, the parameter grid with its deterministic sampler and
//! split hash, and the logistic-regression baseline.
//!
//! Transcendental functions come from [`libm`], so rendered buffers are
//! bit-identical across platforms. File formats, corpus orchestration and the
//! command line live in the `earcon` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod baseline;
pub mod effects;
mod error;
pub mod fft;
pub mod grid;
pub mod pcm;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};

/// Sample rate of every corpus clip.
pub const SAMPLE_RATE: u32 = 48_000;

/// PCM bit depth of every corpus clip.
pub const BIT_DEPTH: u16 = 16;
