//! Spectral analysis shared by the metadata features and the baselines.

mod features;
mod mel;
mod stft;
mod yin;

use alloc::vec::Vec;

pub use features::{spectral_stats, zero_crossing_rate, SpectralStats};
pub use mel::{hz_to_mel, log_mel, mel_filterbank, mel_to_hz, MelConfig, LOG_EPSILON};
pub use stft::{hann_window, stft_magnitude, StftConfig, Window};
pub use yin::{median, yin_f0, yin_f0_with, PitchEstimate, YinConfig};

/// Row-major time × frequency matrix (one row per frame).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub n_frames: usize,
    pub n_bins: usize,
    pub data: Vec<f64>,
}

impl Spectrogram {
    pub fn zeros(n_frames: usize, n_bins: usize) -> Self {
        Self { n_frames, n_bins, data: alloc::vec![0.0; n_frames * n_bins] }
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.data[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn get(&self, t: usize, bin: usize) -> f64 {
        self.data[t * self.n_bins + bin]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_bins.max(1))
    }
}
