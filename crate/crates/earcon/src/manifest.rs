//! `manifest.json`: everything needed to regenerate a corpus byte for byte.

use std::fs;
use std::path::Path;

use earcon_core::analysis::{MelConfig, StftConfig, YinConfig, LOG_EPSILON};
use earcon_core::baseline::TrainConfig;
use earcon_core::effects::{self, ReverbKind};
use earcon_core::grid::GridDefinition;
use earcon_core::synth::{ChordType, EnvelopeKind, WaveformFamily, FM_INDEX};
use earcon_core::{BIT_DEPTH, SAMPLE_RATE};
use serde::{Deserialize, Serialize};

use crate::error::io_err;
use crate::{Error, Result, DATASET_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub version: String,
    pub seed: u64,
    pub target_n: usize,
    pub sample_rate: u32,
    pub bit_depth: u16,
    pub grid: GridEcho,
    pub constants: Constants,
    pub clip_count: usize,
    pub split_counts: SplitCounts,
    pub capped_clips: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmEcho {
    pub rate_hz: f64,
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEcho {
    pub waveforms: Vec<String>,
    pub f0_hz: Vec<u32>,
    pub durations_ms: Vec<u32>,
    pub envelopes: Vec<String>,
    pub am_rates_hz: Vec<f64>,
    pub am_depths: Vec<f64>,
    pub am_settings: Vec<AmEcho>,
    pub chords: Vec<String>,
    pub reverbs: Vec<String>,
    pub raw_size: usize,
    pub canonical_size: usize,
}

impl GridEcho {
    pub fn from_grid(grid: &GridDefinition) -> Self {
        Self {
            waveforms: grid.waveforms.iter().map(|w| w.name().into()).collect(),
            f0_hz: grid.f0_hz.clone(),
            durations_ms: grid.durations_ms.clone(),
            envelopes: grid.envelopes.iter().map(|e| e.name().into()).collect(),
            am_rates_hz: grid.am_rates_hz.clone(),
            am_depths: grid.am_depths.clone(),
            am_settings: grid
                .am_settings()
                .iter()
                .map(|a| AmEcho { rate_hz: a.rate_hz, depth: a.depth })
                .collect(),
            chords: grid.chords.iter().map(|c| c.name().into()).collect(),
            reverbs: grid.reverbs.iter().map(|r| r.name().into()).collect(),
            raw_size: grid.raw_size(),
            canonical_size: grid.size(),
        }
    }

    pub fn to_grid(&self) -> Result<GridDefinition> {
        fn names<T>(items: &[String], f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
            items
                .iter()
                .map(|s| f(s).ok_or_else(|| Error::ManifestMismatch(format!("unknown grid value {s:?}"))))
                .collect()
        }
        Ok(GridDefinition {
            waveforms: names(&self.waveforms, WaveformFamily::from_name)?,
            f0_hz: self.f0_hz.clone(),
            durations_ms: self.durations_ms.clone(),
            envelopes: names(&self.envelopes, EnvelopeKind::from_name)?,
            am_rates_hz: self.am_rates_hz.clone(),
            am_depths: self.am_depths.clone(),
            chords: names(&self.chords, ChordType::from_name)?,
            reverbs: names(&self.reverbs, ReverbKind::from_name)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeEcho {
    pub name: String,
    pub attack_ms: u32,
    /// `null` means the decay runs to the end of the clip.
    pub decay_ms: Option<u32>,
    pub sustain_level: f64,
    pub release_ms: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomEcho {
    pub name: String,
    pub rt60_s: f64,
    pub comb_gains: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverbEcho {
    pub comb_delays_ms: Vec<f64>,
    pub allpass_delays_ms: Vec<f64>,
    pub allpass_gain: f64,
    pub wet_mix: f64,
    pub rooms: Vec<RoomEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub fm_index: f64,
    /// Carrier and modulator as multiples of f0.
    pub fm_harmonics: Vec<(String, (f64, f64))>,
    pub chord_ratios: Vec<(String, Vec<f64>)>,
    pub envelopes: Vec<EnvelopeEcho>,
    pub am_gain: String,
    pub reverb: ReverbEcho,
    pub chain_order: String,
    pub target_rms_dbfs: f64,
    pub peak_cap_dbfs: f64,
    pub quantizer: String,
    pub stft_window: usize,
    pub stft_hop: usize,
    pub stft_taper: String,
    pub n_mels: usize,
    pub mel_f_min_hz: f64,
    pub mel_f_max_hz: f64,
    pub log_epsilon: f64,
    pub yin_frame: usize,
    pub yin_hop: usize,
    pub yin_threshold: f64,
    pub yin_band_hz: (f64, f64),
    pub classifier_learning_rate: f64,
    pub classifier_iterations: usize,
    pub classifier_l2: f64,
    pub shuffle_prng: String,
    pub split_rule: String,
}

impl Constants {
    /// The values compiled into this build.
    pub fn current() -> Self {
        let stft = StftConfig::default();
        let mel = MelConfig::default();
        let yin = YinConfig::default();
        let train = TrainConfig::default();
        Self {
            fm_index: FM_INDEX,
            fm_harmonics: WaveformFamily::ALL
                .iter()
                .filter_map(|w| w.fm_harmonics().map(|h| (w.name().to_string(), h)))
                .collect(),
            chord_ratios: ChordType::ALL
                .iter()
                .map(|c| (c.name().to_string(), c.ratios().to_vec()))
                .collect(),
            envelopes: EnvelopeKind::ALL
                .iter()
                .map(|k| {
                    let p = k.preset();
                    EnvelopeEcho {
                        name: k.name().into(),
                        attack_ms: p.attack_ms,
                        decay_ms: p.decay_ms,
                        sustain_level: p.sustain_level,
                        release_ms: p.release_ms,
                    }
                })
                .collect(),
            am_gain: "1 - depth + depth * 0.5 * (1 - cos(2*pi*rate*k/sr))".into(),
            reverb: ReverbEcho {
                comb_delays_ms: effects::COMB_DELAYS_MS.to_vec(),
                allpass_delays_ms: effects::ALLPASS_DELAYS_MS.to_vec(),
                allpass_gain: effects::ALLPASS_GAIN,
                wet_mix: effects::WET_MIX,
                rooms: ReverbKind::ALL
                    .iter()
                    .filter_map(|k| {
                        k.config().map(|c| RoomEcho {
                            name: k.name().into(),
                            rt60_s: k.target_rt60_s(),
                            comb_gains: c.comb_gains.to_vec(),
                        })
                    })
                    .collect(),
            },
            chain_order: "chord > am > envelope > reverb (truncated) > rms normalize with peak cap > pcm16".into(),
            target_rms_dbfs: effects::TARGET_RMS_DBFS,
            peak_cap_dbfs: effects::PEAK_CAP_DBFS,
            quantizer: "round half away from zero of x * 32767".into(),
            stft_window: stft.window_size,
            stft_hop: stft.hop,
            stft_taper: "periodic hann".into(),
            n_mels: mel.n_mels,
            mel_f_min_hz: mel.f_min_hz,
            mel_f_max_hz: mel.f_max_hz,
            log_epsilon: LOG_EPSILON,
            yin_frame: yin.frame_size,
            yin_hop: yin.hop,
            yin_threshold: yin.threshold,
            yin_band_hz: (yin.search_lo_hz, yin.search_hi_hz),
            classifier_learning_rate: train.learning_rate,
            classifier_iterations: train.iterations,
            classifier_l2: train.l2,
            shuffle_prng: "fisher-yates (high to low) over xoshiro256** seeded by splitmix64".into(),
            split_rule: "fnv1a64(filename) % 100: <80 train, <90 val, else test".into(),
        }
    }
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        text.push('\n');
        fs::write(path, text).map_err(io_err(path))
    }

    /// Rejects manifests written with different constants or format.
    pub fn check_compatible(&self) -> Result<()> {
        if self.version != DATASET_VERSION {
            return Err(Error::ManifestMismatch(format!(
                "version {} (this build writes {DATASET_VERSION})",
                self.version
            )));
        }
        if self.sample_rate != SAMPLE_RATE || self.bit_depth != BIT_DEPTH {
            return Err(Error::ManifestMismatch("sample format differs".into()));
        }
        if self.constants != Constants::current() {
            return Err(Error::ManifestMismatch("synthesis/analysis constants differ".into()));
        }
        Ok(())
    }
}
