//! Dry tone generation: oscillator → chord → amplitude modulation → ADSR.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::effects::ReverbKind;
use crate::{Error, Result};

/// Phase-modulation index shared by both FM families.
pub const FM_INDEX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WaveformFamily {
    Sine,
    Square,
    Triangle,
    /// Carrier at f0, modulator at 2·f0.
    Fm2to1,
    /// Carrier at 2·f0, modulator at 3·f0; the partials are harmonics of f0.
    Fm3to2,
}

impl WaveformFamily {
    pub const ALL: [WaveformFamily; 5] = [
        WaveformFamily::Sine,
        WaveformFamily::Square,
        WaveformFamily::Triangle,
        WaveformFamily::Fm2to1,
        WaveformFamily::Fm3to2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaveformFamily::Sine => "sine",
            WaveformFamily::Square => "square",
            WaveformFamily::Triangle => "triangle",
            WaveformFamily::Fm2to1 => "fm_2to1",
            WaveformFamily::Fm3to2 => "fm_3to2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.name() == name)
    }

    /// Position in [`WaveformFamily::ALL`]; used as the class label.
    pub fn class_index(self) -> usize {
        self as usize
    }

    /// Modulator-to-carrier frequency ratio for the FM families.
    pub fn fm_ratio(self) -> Option<f64> {
        self.fm_harmonics().map(|(c, m)| m / c)
    }

    /// Carrier and modulator frequencies as multiples of f0. Both are
    /// integers, so the FM spectrum is harmonic with fundamental f0.
    pub fn fm_harmonics(self) -> Option<(f64, f64)> {
        match self {
            WaveformFamily::Fm2to1 => Some((1.0, 2.0)),
            WaveformFamily::Fm3to2 => Some((2.0, 3.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnvelopeKind {
    AdsrFast,
    AdsrMed,
    Percussive,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 3] =
        [EnvelopeKind::AdsrFast, EnvelopeKind::AdsrMed, EnvelopeKind::Percussive];

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::AdsrFast => "adsr_fast",
            EnvelopeKind::AdsrMed => "adsr_med",
            EnvelopeKind::Percussive => "percussive",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn preset(self) -> EnvelopePreset {
        match self {
            EnvelopeKind::AdsrFast => EnvelopePreset {
                kind: self,
                attack_ms: 5,
                decay_ms: Some(20),
                sustain_level: 0.7,
                release_ms: 30,
            },
            EnvelopeKind::AdsrMed => EnvelopePreset {
                kind: self,
                attack_ms: 20,
                decay_ms: Some(30),
                sustain_level: 0.8,
                release_ms: 40,
            },
            EnvelopeKind::Percussive => EnvelopePreset {
                kind: self,
                attack_ms: 2,
                decay_ms: None,
                sustain_level: 0.0,
                release_ms: 0,
            },
        }
    }
}

/// Linear ADSR timing. `decay_ms = None` means the decay runs to the end of
/// the clip (the release is folded into it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePreset {
    pub kind: EnvelopeKind,
    pub attack_ms: u32,
    pub decay_ms: Option<u32>,
    pub sustain_level: f64,
    pub release_ms: u32,
}

/// Sinusoidal amplitude modulation. `depth` is the fraction by which the gain
/// dips below 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmSetting {
    pub rate_hz: f64,
    pub depth: f64,
}

impl AmSetting {
    pub const OFF: AmSetting = AmSetting { rate_hz: 0.0, depth: 0.0 };

    pub fn new(rate_hz: f64, depth: f64) -> Self {
        Self { rate_hz, depth }
    }

    pub fn is_off(&self) -> bool {
        self.depth == 0.0
    }

    /// Exactly one of "rate zero" and "depth zero" makes the setting sound
    /// like AM-off under a different label.
    pub fn is_canonical(&self) -> bool {
        (self.rate_hz == 0.0) == (self.depth == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChordType {
    Single,
    Major,
    Minor,
}

impl ChordType {
    pub const ALL: [ChordType; 3] = [ChordType::Single, ChordType::Major, ChordType::Minor];

    pub fn name(self) -> &'static str {
        match self {
            ChordType::Single => "single",
            ChordType::Major => "major",
            ChordType::Minor => "minor",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Just-intonation frequency ratios relative to the root.
    pub fn ratios(self) -> &'static [f64] {
        match self {
            ChordType::Single => &[1.0],
            ChordType::Major => &[1.0, 5.0 / 4.0, 3.0 / 2.0],
            ChordType::Minor => &[1.0, 6.0 / 5.0, 3.0 / 2.0],
        }
    }
}

/// One point of the parameter grid plus its position in the corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipSpec {
    pub waveform: WaveformFamily,
    pub f0_hz: u32,
    pub duration_ms: u32,
    pub envelope: EnvelopeKind,
    pub am: AmSetting,
    pub chord: ChordType,
    pub reverb: ReverbKind,
    pub seed: u64,
    pub index: usize,
}

/// Number of samples covering `ms` milliseconds, rounded to nearest.
pub fn ms_to_samples(ms: u32, sample_rate: u32) -> usize {
    ((ms as u64 * sample_rate as u64 + 500) / 1000) as usize
}

/// Cycles elapsed at sample `k`, reduced to `[0, 1)` before scaling by 2π so
/// the argument to `sin` stays small.
#[inline]
fn cycle_phase(freq: f64, k: usize, sample_rate: f64) -> f64 {
    let cycles = freq * k as f64 / sample_rate;
    cycles - libm::floor(cycles)
}

fn check_frequency(f_hz: f64, sample_rate: u32) -> Result<()> {
    let nyquist = sample_rate as f64 / 2.0;
    if !(f_hz.is_finite() && f_hz > 0.0 && f_hz < nyquist) {
        return Err(Error::InvalidFrequency { hz: f_hz, nyquist });
    }
    Ok(())
}

fn add_partial(out: &mut [f64], freq: f64, amplitude: f64, sample_rate: f64) {
    for (k, y) in out.iter_mut().enumerate() {
        *y += amplitude * libm::sin(2.0 * PI * cycle_phase(freq, k, sample_rate));
    }
}

/// Renders `n_samples` of one oscillator starting at phase zero.
///
/// Square and triangle are truncated odd-harmonic Fourier series, keeping
/// every partial strictly below Nyquist. The square has unit fundamental
/// (1/n weights, peak ≈ 0.93 after Gibbs overshoot); the triangle uses the
/// 8/π² · (−1)^m / n² series with unit peak.
pub fn render_oscillator(
    family: WaveformFamily,
    f_hz: f64,
    n_samples: usize,
    sample_rate: u32,
) -> Result<Vec<f64>> {
    check_frequency(f_hz, sample_rate)?;
    if n_samples == 0 {
        return Err(Error::EmptyBuffer);
    }
    let sr = sample_rate as f64;
    let nyquist = sr / 2.0;
    let mut out = alloc::vec![0.0; n_samples];
    match family {
        WaveformFamily::Sine => add_partial(&mut out, f_hz, 1.0, sr),
        WaveformFamily::Square => {
            let mut n = 1u32;
            while f_hz * (n as f64) < nyquist {
                add_partial(&mut out, f_hz * n as f64, 1.0 / n as f64, sr);
                n += 2;
            }
        }
        WaveformFamily::Triangle => {
            let scale = 8.0 / (PI * PI);
            let mut n = 1u32;
            while f_hz * (n as f64) < nyquist {
                let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let nf = n as f64;
                add_partial(&mut out, f_hz * nf, sign * scale / (nf * nf), sr);
                n += 2;
            }
        }
        WaveformFamily::Fm2to1 | WaveformFamily::Fm3to2 => {
            let (c_mult, m_mult) = family.fm_harmonics().unwrap_or((1.0, 1.0));
            for (k, y) in out.iter_mut().enumerate() {
                let carrier = 2.0 * PI * cycle_phase(c_mult * f_hz, k, sr);
                let modulator = 2.0 * PI * cycle_phase(m_mult * f_hz, k, sr);
                *y = libm::sin(carrier + FM_INDEX * libm::sin(modulator));
            }
        }
    }
    Ok(out)
}

/// Root tone, or the equal-amplitude triad scaled by 1/3.
pub fn build_chord(
    family: WaveformFamily,
    root_hz: f64,
    chord: ChordType,
    n_samples: usize,
    sample_rate: u32,
) -> Result<Vec<f64>> {
    let ratios = chord.ratios();
    if ratios.len() == 1 {
        return render_oscillator(family, root_hz, n_samples, sample_rate);
    }
    for &r in ratios {
        check_frequency(root_hz * r, sample_rate)?;
    }
    let mut sum = alloc::vec![0.0; n_samples];
    for &r in ratios {
        let voice = render_oscillator(family, root_hz * r, n_samples, sample_rate)?;
        for (s, v) in sum.iter_mut().zip(voice) {
            *s += v;
        }
    }
    let scale = ratios.len() as f64;
    sum.iter_mut().for_each(|s| *s /= scale);
    Ok(sum)
}

/// Gain curve of the modulator at sample `k`:
/// `1 − depth + depth · ½ · (1 − cos(2π·rate·k/sr))`.
pub fn am_gain(am: &AmSetting, k: usize, sample_rate: u32) -> f64 {
    let phase = 2.0 * PI * cycle_phase(am.rate_hz, k, sample_rate as f64);
    1.0 - am.depth + am.depth * 0.5 * (1.0 - libm::cos(phase))
}

pub fn apply_am(buffer: &[f64], am: &AmSetting, sample_rate: u32) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&am.depth) || !(am.rate_hz >= 0.0) {
        return Err(Error::InvalidConfig("AM depth must be in [0, 1] and rate >= 0"));
    }
    if am.depth == 0.0 {
        return Ok(buffer.to_vec());
    }
    Ok(buffer
        .iter()
        .enumerate()
        .map(|(k, &x)| x * am_gain(am, k, sample_rate))
        .collect())
}

/// Piecewise-linear ADSR gain for a clip of `n` samples.
///
/// Gain is 0 at sample 0, exactly 1 at the attack length, reaches the sustain
/// level after the decay and falls to 0 at sample `n − 1`.
pub fn envelope_gain(preset: &EnvelopePreset, n: usize, sample_rate: u32) -> Result<Vec<f64>> {
    let attack = ms_to_samples(preset.attack_ms, sample_rate);
    let release = ms_to_samples(preset.release_ms, sample_rate);
    let last = n.checked_sub(1).ok_or(Error::EmptyBuffer)?;
    let decay = match preset.decay_ms {
        Some(ms) => ms_to_samples(ms, sample_rate),
        None => last.saturating_sub(attack + release),
    };
    let needed = attack + decay + release + 1;
    if n < needed || attack == 0 {
        return Err(Error::BufferTooShort { needed, got: n });
    }
    let sustain = preset.sustain_level;
    let release_start = last - release;
    let gain = (0..n)
        .map(|k| {
            if k <= attack {
                k as f64 / attack as f64
            } else if k <= attack + decay {
                let t = (k - attack) as f64 / decay as f64;
                1.0 + (sustain - 1.0) * t
            } else if k < release_start {
                sustain
            } else if release == 0 {
                0.0
            } else {
                let t = (k - release_start) as f64 / release as f64;
                sustain * (1.0 - t)
            }
        })
        .collect();
    Ok(gain)
}

pub fn apply_envelope(
    buffer: &[f64],
    preset: &EnvelopePreset,
    sample_rate: u32,
) -> Result<Vec<f64>> {
    let gain = envelope_gain(preset, buffer.len(), sample_rate)?;
    Ok(buffer.iter().zip(gain).map(|(x, g)| x * g).collect())
}

/// The dry chain for one clip: chord, then AM, then envelope.
pub fn render_dry_clip(spec: &ClipSpec, sample_rate: u32) -> Result<Vec<f64>> {
    let n = ms_to_samples(spec.duration_ms, sample_rate);
    let tone = build_chord(spec.waveform, spec.f0_hz as f64, spec.chord, n, sample_rate)?;
    let modulated = apply_am(&tone, &spec.am, sample_rate)?;
    apply_envelope(&modulated, &spec.envelope.preset(), sample_rate)
}
