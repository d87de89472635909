//! Post-synthesis chain: Schroeder reverb, RMS normalization with a peak cap,
//! and level metering.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Nominal RMS level of every corpus clip.
pub const TARGET_RMS_DBFS: f64 = -20.0;
/// Hard ceiling on sample peak.
pub const PEAK_CAP_DBFS: f64 = -1.0;

pub const COMB_DELAYS_MS: [f64; 4] = [29.7, 37.1, 41.1, 43.7];
pub const ALLPASS_DELAYS_MS: [f64; 2] = [5.0, 1.7];
pub const ALLPASS_GAIN: f64 = 0.7;
pub const WET_MIX: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReverbKind {
    Dry,
    RirSmall,
    RirMedium,
}

impl ReverbKind {
    pub const ALL: [ReverbKind; 3] = [ReverbKind::Dry, ReverbKind::RirSmall, ReverbKind::RirMedium];

    pub fn name(self) -> &'static str {
        match self {
            ReverbKind::Dry => "dry",
            ReverbKind::RirSmall => "rir_small",
            ReverbKind::RirMedium => "rir_medium",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Design reverberation time; zero for dry.
    pub fn target_rt60_s(self) -> f64 {
        match self {
            ReverbKind::Dry => 0.0,
            ReverbKind::RirSmall => 0.3,
            ReverbKind::RirMedium => 0.6,
        }
    }

    pub fn config(self) -> Option<ReverbConfig> {
        match self {
            ReverbKind::Dry => None,
            _ => Some(ReverbConfig::for_rt60(self.target_rt60_s())),
        }
    }
}

/// Four parallel feedback combs into two series all-passes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReverbConfig {
    pub comb_delays_ms: [f64; 4],
    pub comb_gains: [f64; 4],
    pub allpass_delays_ms: [f64; 2],
    pub allpass_gain: f64,
    pub wet_mix: f64,
}

/// Feedback gain that makes a comb of `delay_ms` decay 60 dB in `rt60_s`.
pub fn comb_gain(delay_ms: f64, rt60_s: f64) -> f64 {
    libm::pow(10.0, -3.0 * (delay_ms / 1000.0) / rt60_s)
}

impl ReverbConfig {
    pub fn for_rt60(rt60_s: f64) -> Self {
        Self {
            comb_delays_ms: COMB_DELAYS_MS,
            comb_gains: COMB_DELAYS_MS.map(|d| comb_gain(d, rt60_s)),
            allpass_delays_ms: ALLPASS_DELAYS_MS,
            allpass_gain: ALLPASS_GAIN,
            wet_mix: WET_MIX,
        }
    }
}

fn delay_samples(ms: f64, sample_rate: u32) -> usize {
    (libm::round(ms * sample_rate as f64 / 1000.0) as usize).max(1)
}

/// `y[n] = x[n] + g·y[n−D]`
fn feedback_comb(input: &[f64], delay: usize, gain: f64, out: &mut [f64]) {
    let mut line = alloc::vec![0.0; delay];
    let mut pos = 0;
    for (x, acc) in input.iter().zip(out.iter_mut()) {
        let y = x + gain * line[pos];
        line[pos] = y;
        pos = (pos + 1) % delay;
        *acc += y;
    }
}

/// `y[n] = −g·x[n] + x[n−D] + g·y[n−D]`
fn allpass(signal: &mut [f64], delay: usize, gain: f64) {
    let mut x_line = alloc::vec![0.0; delay];
    let mut y_line = alloc::vec![0.0; delay];
    let mut pos = 0;
    for s in signal.iter_mut() {
        let x = *s;
        let y = -gain * x + x_line[pos] + gain * y_line[pos];
        x_line[pos] = x;
        y_line[pos] = y;
        pos = (pos + 1) % delay;
        *s = y;
    }
}

/// Runs the reverb over `buffer`, truncating the tail to the input length.
pub fn apply_reverb_with(buffer: &[f64], cfg: &ReverbConfig, sample_rate: u32) -> Vec<f64> {
    let mut wet = alloc::vec![0.0; buffer.len()];
    for (&ms, &g) in cfg.comb_delays_ms.iter().zip(&cfg.comb_gains) {
        feedback_comb(buffer, delay_samples(ms, sample_rate), g, &mut wet);
    }
    for &ms in &cfg.allpass_delays_ms {
        allpass(&mut wet, delay_samples(ms, sample_rate), cfg.allpass_gain);
    }
    buffer
        .iter()
        .zip(wet)
        .map(|(&dry, w)| cfg.wet_mix * w + (1.0 - cfg.wet_mix) * dry)
        .collect()
}

pub fn apply_reverb(buffer: &[f64], kind: ReverbKind, sample_rate: u32) -> Vec<f64> {
    match kind.config() {
        None => buffer.to_vec(),
        Some(cfg) => apply_reverb_with(buffer, &cfg, sample_rate),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelReport {
    pub peak_dbfs: f64,
    pub rms_dbfs: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 20.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    20.0 * libm::log10(x)
}

fn peak_and_rms(buffer: &[f64]) -> (f64, f64) {
    let peak = buffer.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mean_sq = buffer.iter().map(|x| x * x).sum::<f64>() / buffer.len() as f64;
    (peak, libm::sqrt(mean_sq))
}

/// Peak and RMS in dBFS. A silent buffer reports −∞ for both.
pub fn measure_levels(buffer: &[f64]) -> Result<LevelReport> {
    if buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let (peak, rms) = peak_and_rms(buffer);
    Ok(LevelReport {
        peak_dbfs: linear_to_db(peak),
        rms_dbfs: linear_to_db(rms),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub samples: Vec<f64>,
    pub levels: LevelReport,
    /// The peak cap, not the RMS target, set the final gain.
    pub capped: bool,
}

/// Scales to `target_dbfs` RMS; if that would push the peak past
/// `peak_cap_dbfs`, scales so the peak sits exactly on the cap instead.
pub fn normalize_rms(buffer: &[f64], target_dbfs: f64, peak_cap_dbfs: f64) -> Result<Normalized> {
    if buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let (peak, rms) = peak_and_rms(buffer);
    if rms == 0.0 || !rms.is_finite() {
        return Err(Error::SilentBuffer);
    }
    let cap = db_to_linear(peak_cap_dbfs);
    let mut gain = db_to_linear(target_dbfs) / rms;
    let capped = peak * gain > cap;
    if capped {
        gain = cap / peak;
    }
    let samples: Vec<f64> = buffer.iter().map(|x| x * gain).collect();
    let levels = measure_levels(&samples)?;
    Ok(Normalized { samples, levels, capped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    const SR: u32 = 48_000;

    fn impulse(n: usize) -> Vec<f64> {
        let mut x = std::vec![0.0; n];
        x[0] = 1.0;
        x
    }

    /// RT60 from the Schroeder energy-decay curve: straight-line fit between
    /// -5 and -35 dB, extrapolated to -60 dB.
    fn schroeder_rt60(ir: &[f64], sr: f64) -> f64 {
        let mut edc: Vec<f64> = ir.iter().rev().scan(0.0, |acc, x| {
            *acc += x * x;
            Some(*acc)
        }).collect();
        edc.reverse();
        let total = edc[0];
        let db: Vec<f64> = edc.iter().map(|e| 10.0 * (e / total).log10()).collect();
        let pts: Vec<(f64, f64)> = db
            .iter()
            .enumerate()
            .filter(|(_, d)| **d <= -5.0 && **d >= -35.0)
            .map(|(k, d)| (k as f64 / sr, *d))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        -60.0 / (sxy / sxx)
    }

    #[test]
    fn comb_gain_matches_decay_formula() {
        assert!((comb_gain(29.7, 0.3) - 0.5047).abs() < 1e-4);
        for rt in [0.3, 0.6] {
            let cfg = ReverbConfig::for_rt60(rt);
            assert!(cfg.comb_gains.iter().all(|g| *g > 0.0 && *g < 1.0));
        }
    }

    #[test]
    fn room_impulse_responses_hit_target_rt60() {
        for kind in [ReverbKind::RirSmall, ReverbKind::RirMedium] {
            let ir = apply_reverb(&impulse(3 * SR as usize), kind, SR);
            let rt = schroeder_rt60(&ir, SR as f64);
            let target = kind.target_rt60_s();
            assert!((rt - target).abs() / target < 0.3, "{kind:?}: {rt}");
        }
    }

    #[test]
    fn tail_energy_decays_after_direct_sound() {
        let ir = apply_reverb(&impulse(SR as usize), ReverbKind::RirMedium, SR);
        // 50 ms windows, starting once every comb has fed back at least once.
        let start = (0.05 * SR as f64) as usize;
        let energies: Vec<f64> = ir[start..]
            .chunks(2400)
            .map(|w| w.iter().map(|x| x * x).sum())
            .collect();
        assert!(energies.windows(2).all(|w| w[1] < w[0]), "{energies:?}");
    }

    #[test]
    fn dry_is_identity_and_length_is_preserved() {
        let x: Vec<f64> = (0..4800).map(|k| (k as f64 * 0.1).sin()).collect();
        assert_eq!(apply_reverb(&x, ReverbKind::Dry, SR), x);
        for kind in [ReverbKind::RirSmall, ReverbKind::RirMedium] {
            assert_eq!(apply_reverb(&x, kind, SR).len(), x.len());
        }
        assert!(apply_reverb(&[], ReverbKind::RirSmall, SR).is_empty());
    }

    #[test]
    fn reverb_is_linear() {
        let a: Vec<f64> = (0..6000).map(|k| (k as f64 * 0.013).sin()).collect();
        let b: Vec<f64> = (0..6000).map(|k| ((k * 7 % 13) as f64 - 6.0) / 6.0).collect();
        let mixed: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
        let ra = apply_reverb(&a, ReverbKind::RirMedium, SR);
        let rb = apply_reverb(&b, ReverbKind::RirMedium, SR);
        let rm = apply_reverb(&mixed, ReverbKind::RirMedium, SR);
        for k in 0..6000 {
            assert!((rm[k] - (2.0 * ra[k] - 0.5 * rb[k])).abs() < 1e-9);
        }
    }

    #[test]
    fn level_examples() {
        let l = measure_levels(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!(l.peak_dbfs.abs() < 1e-12 && l.rms_dbfs.abs() < 1e-12);
        let half = measure_levels(&[0.5; 10]).unwrap();
        assert!((half.peak_dbfs + 6.0206).abs() < 1e-4);
        let silent = measure_levels(&[0.0; 10]).unwrap();
        assert_eq!(silent.peak_dbfs, f64::NEG_INFINITY);
        assert_eq!(measure_levels(&[]), Err(Error::EmptyBuffer));
    }

    #[test]
    fn normalizes_sine_to_target() {
        let x: Vec<f64> = (0..48_000)
            .map(|k| 0.05 * (2.0 * core::f64::consts::PI * 1000.0 * k as f64 / 48000.0).sin())
            .collect();
        let n = normalize_rms(&x, TARGET_RMS_DBFS, PEAK_CAP_DBFS).unwrap();
        assert!(!n.capped);
        assert!((n.levels.rms_dbfs + 20.0).abs() < 1e-9);
        let rms = (n.samples.iter().map(|v| v * v).sum::<f64>() / 48000.0).sqrt();
        assert!((rms - 0.1).abs() < 1e-9);
    }

    #[test]
    fn peak_cap_takes_precedence() {
        // Crest factor 12: RMS target would put the peak at 1.2.
        let mut x = std::vec![0.0; 144];
        x[0] = 1.0;
        let n = normalize_rms(&x, TARGET_RMS_DBFS, PEAK_CAP_DBFS).unwrap();
        assert!(n.capped);
        assert!((n.samples[0] - 0.891_250_9).abs() < 1e-6);
        assert!((n.levels.peak_dbfs + 1.0).abs() < 1e-9);
        assert!(n.levels.rms_dbfs < -20.0);
    }

    #[test]
    fn normalize_is_idempotent() {
        let x: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.05).sin() * 0.3).collect();
        let once = normalize_rms(&x, -20.0, -1.0).unwrap();
        let twice = normalize_rms(&once.samples, -20.0, -1.0).unwrap();
        for (a, b) in once.samples.iter().zip(&twice.samples) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_silence() {
        assert_eq!(normalize_rms(&[0.0; 10], -20.0, -1.0), Err(Error::SilentBuffer));
        assert_eq!(normalize_rms(&[], -20.0, -1.0), Err(Error::EmptyBuffer));
    }
}
