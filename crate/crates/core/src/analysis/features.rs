use super::stft::{stft_magnitude, StftConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralStats {
    pub centroid_hz: f64,
    /// Magnitude-weighted standard deviation about the centroid.
    pub bandwidth_hz: f64,
    pub zcr: f64,
}

/// Adjacent sign changes per sample interval; zero counts as positive.
pub fn zero_crossing_rate(buffer: &[f64]) -> f64 {
    if buffer.len() < 2 {
        return 0.0;
    }
    let changes = buffer
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    changes as f64 / (buffer.len() - 1) as f64
}

/// Centroid and bandwidth of the time-averaged magnitude spectrum, plus ZCR.
pub fn spectral_stats(buffer: &[f64], cfg: &StftConfig, sample_rate: u32) -> Result<SpectralStats> {
    let spec = stft_magnitude(buffer, cfg)?;
    let mut mean = alloc::vec![0.0; spec.n_bins];
    for frame in spec.frames() {
        for (m, &v) in mean.iter_mut().zip(frame) {
            *m += v;
        }
    }
    let total: f64 = mean.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::SilentBuffer);
    }
    let bin_hz = sample_rate as f64 / cfg.window_size as f64;
    let centroid = mean
        .iter()
        .enumerate()
        .map(|(k, m)| k as f64 * bin_hz * m)
        .sum::<f64>()
        / total;
    let variance = mean
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let d = k as f64 * bin_hz - centroid;
            d * d * m
        })
        .sum::<f64>()
        / total;
    Ok(SpectralStats {
        centroid_hz: centroid,
        bandwidth_hz: libm::sqrt(variance),
        zcr: zero_crossing_rate(buffer),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sine(f: f64, n: usize) -> std::vec::Vec<f64> {
        (0..n).map(|k| (2.0 * PI * f * k as f64 / 48000.0).sin()).collect()
    }

    #[test]
    fn pure_tone_centroid_and_bandwidth() {
        let s = spectral_stats(&sine(1000.0, 48_000), &StftConfig::default(), 48_000).unwrap();
        assert!((s.centroid_hz - 1000.0).abs() / 1000.0 < 0.02, "{}", s.centroid_hz);
        assert!(s.bandwidth_hz < 200.0, "{}", s.bandwidth_hz);
    }

    #[test]
    fn zcr_of_sine() {
        let z = zero_crossing_rate(&sine(500.0, 48_000));
        assert!((z - 0.02083).abs() / 0.02083 < 0.02, "{z}");
        assert_eq!(zero_crossing_rate(&[1.0]), 0.0);
        assert_eq!(zero_crossing_rate(&[1.0, -1.0, 1.0]), 1.0);
    }

    #[test]
    fn higher_partials_raise_centroid() {
        let cfg = StftConfig::default();
        let lo = spectral_stats(&sine(500.0, 24_000), &cfg, 48_000).unwrap();
        let mix: std::vec::Vec<f64> = sine(500.0, 24_000)
            .iter()
            .zip(sine(4000.0, 24_000))
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let hi = spectral_stats(&mix, &cfg, 48_000).unwrap();
        assert!(hi.centroid_hz > lo.centroid_hz);
        assert!(hi.bandwidth_hz > lo.bandwidth_hz);
    }

    #[test]
    fn silence_is_an_error() {
        let r = spectral_stats(&[0.0; 4800], &StftConfig::default(), 48_000);
        assert_eq!(r, Err(Error::SilentBuffer));
    }
}
