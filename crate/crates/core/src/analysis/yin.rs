//! YIN fundamental-frequency estimation with median pooling over frames.
//!
//! Each frame of `frame_size` samples is split into an integration window of
//! `frame_size / 2` and the lag range. Per frame: squared-difference
//! function, cumulative-mean normalization, the first dip below `threshold`
//! followed down to its local minimum, then parabolic refinement of the lag
//! on the raw difference function. Frames with no dip are unvoiced.

use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YinConfig {
    pub frame_size: usize,
    pub hop: usize,
    pub threshold: f64,
    pub search_lo_hz: f64,
    pub search_hi_hz: f64,
}

impl Default for YinConfig {
    fn default() -> Self {
        Self {
            frame_size: 2048,
            hop: 256,
            threshold: 0.10,
            search_lo_hz: 80.0,
            search_hi_hz: 1600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchEstimate {
    /// Median of the voiced frames; `None` if no frame was voiced.
    pub f0_hz: Option<f64>,
    pub frame_values: Vec<Option<f64>>,
}

impl PitchEstimate {
    pub fn voiced_frames(&self) -> usize {
        self.frame_values.iter().filter(|v| v.is_some()).count()
    }
}

/// Median of a non-empty slice; mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

/// YIN with the default frame, hop and threshold over a custom search band.
pub fn yin_f0(
    buffer: &[f64],
    search_lo_hz: f64,
    search_hi_hz: f64,
    sample_rate: u32,
) -> Result<PitchEstimate> {
    let cfg = YinConfig { search_lo_hz, search_hi_hz, ..YinConfig::default() };
    yin_f0_with(buffer, &cfg, sample_rate)
}

pub fn yin_f0_with(buffer: &[f64], cfg: &YinConfig, sample_rate: u32) -> Result<PitchEstimate> {
    let sr = sample_rate as f64;
    if !(cfg.search_lo_hz > 0.0 && cfg.search_lo_hz < cfg.search_hi_hz && cfg.search_hi_hz < sr / 2.0)
    {
        return Err(Error::InvalidConfig("YIN band must satisfy 0 < lo < hi < Nyquist"));
    }
    if cfg.frame_size < 4 || cfg.hop == 0 || !(cfg.threshold > 0.0) {
        return Err(Error::InvalidConfig("YIN frame, hop and threshold must be positive"));
    }
    let window = cfg.frame_size / 2;
    let tau_max = (libm::ceil(sr / cfg.search_lo_hz) as usize).min(window);
    let tau_min = (libm::floor(sr / cfg.search_hi_hz) as usize).max(2);
    if tau_min + 2 > tau_max {
        return Err(Error::InvalidConfig("YIN band too narrow for the frame size"));
    }

    let mut frame_values = Vec::new();
    if buffer.len() >= cfg.frame_size {
        let n_frames = 1 + (buffer.len() - cfg.frame_size) / cfg.hop;
        let mut diff = alloc::vec![0.0; tau_max + 1];
        let mut cmndf = alloc::vec![1.0; tau_max + 1];
        for t in 0..n_frames {
            let frame = &buffer[t * cfg.hop..t * cfg.hop + cfg.frame_size];
            difference(frame, window, &mut diff);
            normalize(&diff, &mut cmndf);
            let est = pick_lag(&cmndf, &diff, tau_min, tau_max, cfg.threshold)
                .map(|lag| sr / lag)
                .filter(|f| *f >= cfg.search_lo_hz && *f <= cfg.search_hi_hz);
            frame_values.push(est);
        }
    }
    let voiced: Vec<f64> = frame_values.iter().flatten().copied().collect();
    Ok(PitchEstimate { f0_hz: median(&voiced), frame_values })
}

/// `d(τ) = Σ_{j<W} (x[j] − x[j+τ])²` for `τ = 0..=τ_max`.
fn difference(frame: &[f64], window: usize, diff: &mut [f64]) {
    diff[0] = 0.0;
    let head = &frame[..window];
    for (tau, d) in diff.iter_mut().enumerate().skip(1) {
        let shifted = &frame[tau..tau + window];
        *d = head
            .iter()
            .zip(shifted)
            .map(|(a, b)| {
                let e = a - b;
                e * e
            })
            .sum();
    }
}

/// Cumulative mean normalized difference; 1 wherever the running mean is zero.
fn normalize(diff: &[f64], cmndf: &mut [f64]) {
    cmndf[0] = 1.0;
    let mut running = 0.0;
    for tau in 1..diff.len() {
        running += diff[tau];
        cmndf[tau] = if running > 0.0 { diff[tau] * tau as f64 / running } else { 1.0 };
    }
}

fn pick_lag(cmndf: &[f64], diff: &[f64], tau_min: usize, tau_max: usize, threshold: f64) -> Option<f64> {
    let mut tau = (tau_min..tau_max).find(|&t| cmndf[t] < threshold)?;
    while tau + 1 < tau_max && cmndf[tau + 1] < cmndf[tau] {
        tau += 1;
    }
    let (a, b, c) = (diff[tau - 1], diff[tau], diff[tau + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    Some(tau as f64 + shift.clamp(-1.0, 1.0))
}
