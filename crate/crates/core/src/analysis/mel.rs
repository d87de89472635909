use alloc::vec::Vec;

use super::stft::{stft_map, StftConfig};
use super::Spectrogram;
use crate::fft::Complex;
use crate::{Error, Result};

/// Floor added before the logarithm.
pub const LOG_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelConfig {
    pub n_mels: usize,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub stft: StftConfig,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self { n_mels: 64, f_min_hz: 0.0, f_max_hz: 16_000.0, stft: StftConfig::default() }
    }
}

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * libm::log10(1.0 + hz / 700.0)
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (libm::pow(10.0, mel / 2595.0) - 1.0)
}

/// Triangular filters with unit peak, `n_mels` rows over the one-sided FFT
/// bins. Edges are equally spaced on the mel scale between `f_min` and `f_max`.
pub fn mel_filterbank(cfg: &MelConfig, sample_rate: u32) -> Result<Vec<Vec<f64>>> {
    cfg.stft.validate()?;
    let nyquist = sample_rate as f64 / 2.0;
    if cfg.n_mels == 0 || !(cfg.f_min_hz >= 0.0 && cfg.f_min_hz < cfg.f_max_hz && cfg.f_max_hz <= nyquist)
    {
        return Err(Error::InvalidConfig("mel range must satisfy 0 <= f_min < f_max <= Nyquist"));
    }
    let mel_lo = hz_to_mel(cfg.f_min_hz);
    let mel_hi = hz_to_mel(cfg.f_max_hz);
    let edges: Vec<f64> = (0..cfg.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (cfg.n_mels + 1) as f64))
        .collect();
    let n_bins = cfg.stft.n_bins();
    let bin_hz = sample_rate as f64 / cfg.stft.window_size as f64;
    let bank = (0..cfg.n_mels)
        .map(|m| {
            let (lo, center, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    if f <= lo || f >= hi {
                        0.0
                    } else if f <= center {
                        (f - lo) / (center - lo)
                    } else {
                        (hi - f) / (hi - center)
                    }
                })
                .collect()
        })
        .collect();
    Ok(bank)
}

/// Natural-log mel energies: `ln(filterbank · |X|² + ε)`, frames × n_mels.
pub fn log_mel(buffer: &[f64], cfg: &MelConfig, sample_rate: u32) -> Result<Spectrogram> {
    let bank = mel_filterbank(cfg, sample_rate)?;
    let power = stft_map(buffer, &cfg.stft, Complex::norm_sqr)?;
    let mut out = Spectrogram::zeros(power.n_frames, cfg.n_mels);
    for t in 0..power.n_frames {
        let frame = power.frame(t);
        for (m, filter) in bank.iter().enumerate() {
            let energy: f64 = filter.iter().zip(frame).map(|(w, p)| w * p).sum();
            out.frame_mut(t)[m] = libm::log(energy + LOG_EPSILON);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sine(f: f64, amp: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| amp * (2.0 * PI * f * k as f64 / 48000.0).sin()).collect()
    }

    fn mean_argmax(s: &Spectrogram) -> usize {
        let mut mean = std::vec![0.0; s.n_bins];
        for f in s.frames() {
            for (m, v) in mean.iter_mut().zip(f) {
                *m += v;
            }
        }
        (0..mean.len()).max_by(|&a, &b| mean[a].total_cmp(&mean[b])).unwrap()
    }

    #[test]
    fn htk_mel_scale() {
        assert!((hz_to_mel(1000.0) - 1000.0).abs() < 0.05);
        for hz in [0.0, 80.0, 440.0, 16_000.0] {
            assert!((mel_to_hz(hz_to_mel(hz)) - hz).abs() < 1e-9);
        }
    }

    #[test]
    fn filterbank_shape() {
        let bank = mel_filterbank(&MelConfig::default(), 48_000).unwrap();
        assert_eq!(bank.len(), 64);
        for filter in &bank {
            assert_eq!(filter.len(), 513);
            let peak = filter.iter().cloned().fold(0.0, f64::max);
            assert!(peak > 0.0 && peak <= 1.0);
        }
        let bad = MelConfig { f_max_hz: 30_000.0, ..MelConfig::default() };
        assert!(mel_filterbank(&bad, 48_000).is_err());
    }

    #[test]
    fn silence_sits_at_log_epsilon() {
        let s = log_mel(&[0.0; 4800], &MelConfig::default(), 48_000).unwrap();
        assert_eq!((s.n_frames, s.n_bins), (15, 64));
        assert!(s.data.iter().all(|&v| (v - LOG_EPSILON.ln()).abs() < 1e-12));
    }

    #[test]
    fn argmax_band_rises_with_frequency() {
        let cfg = MelConfig::default();
        let low = mean_argmax(&log_mel(&sine(350.0, 0.5, 24_000), &cfg, 48_000).unwrap());
        let high = mean_argmax(&log_mel(&sine(1000.0, 0.5, 24_000), &cfg, 48_000).unwrap());
        assert!(high > low, "{low} {high}");
    }

    #[test]
    fn doubling_amplitude_adds_ln4() {
        let cfg = MelConfig::default();
        let a = log_mel(&sine(750.0, 0.25, 9600), &cfg, 48_000).unwrap();
        let b = log_mel(&sine(750.0, 0.5, 9600), &cfg, 48_000).unwrap();
        let mut checked = 0;
        for (x, y) in a.data.iter().zip(&b.data) {
            if *x > -5.0 {
                assert!((y - x - 4f64.ln()).abs() < 1e-6);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
