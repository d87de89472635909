use alloc::vec::Vec;
use core::f64::consts::PI;

use super::Spectrogram;
use crate::fft::{Complex, Fft};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Periodic Hann, `0.5 − 0.5·cos(2πn/N)`.
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftConfig {
    pub window_size: usize,
    pub hop: usize,
    pub window: Window,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { window_size: 1024, hop: 256, window: Window::Hann }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.window_size.is_power_of_two() || self.window_size < 2 {
            return Err(Error::InvalidConfig("STFT window size must be a power of two"));
        }
        if self.hop == 0 || self.hop > self.window_size {
            return Err(Error::InvalidConfig("STFT hop must be in 1..=window_size"));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    pub fn n_frames(&self, len: usize) -> usize {
        if len < self.window_size {
            0
        } else {
            1 + (len - self.window_size) / self.hop
        }
    }

    pub fn window_coefficients(&self) -> Vec<f64> {
        match self.window {
            Window::Hann => hann_window(self.window_size),
        }
    }
}

pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * libm::cos(2.0 * PI * i as f64 / n as f64))
        .collect()
}

/// Windowed one-sided spectra mapped through `f`, one row per frame.
pub(crate) fn stft_map(
    buffer: &[f64],
    cfg: &StftConfig,
    f: impl Fn(Complex) -> f64,
) -> Result<Spectrogram> {
    cfg.validate()?;
    if buffer.len() < cfg.window_size {
        return Err(Error::BufferTooShort { needed: cfg.window_size, got: buffer.len() });
    }
    let fft = Fft::new(cfg.window_size);
    let window = cfg.window_coefficients();
    let n_frames = cfg.n_frames(buffer.len());
    let mut spec = Spectrogram::zeros(n_frames, cfg.n_bins());
    let mut scratch = alloc::vec![Complex::ZERO; cfg.window_size];
    for t in 0..n_frames {
        let start = t * cfg.hop;
        let frame = &buffer[start..start + cfg.window_size];
        for ((c, &x), &w) in scratch.iter_mut().zip(frame).zip(&window) {
            *c = Complex::new(x * w, 0.0);
        }
        fft.forward(&mut scratch);
        for (out, &c) in spec.frame_mut(t).iter_mut().zip(&scratch) {
            *out = f(c);
        }
    }
    Ok(spec)
}

/// Hann-windowed magnitude spectra, bins `0..=window/2`.
pub fn stft_magnitude(buffer: &[f64], cfg: &StftConfig) -> Result<Spectrogram> {
    stft_map(buffer, cfg, Complex::norm)
}
