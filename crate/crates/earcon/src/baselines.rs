//! Waveform-family classification and f0 regression over a corpus on disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use earcon_core::analysis::{log_mel, yin_f0_with, MelConfig, YinConfig};
use earcon_core::baseline::{
    classification_metrics, f0_metrics, train_classifier, ClassificationMetrics, ClassifierModel,
    F0Metrics, PooledMelFeature, TrainConfig,
};
use earcon_core::effects::ReverbKind;
use earcon_core::grid::Split;
use earcon_core::synth::{ChordType, WaveformFamily};
use earcon_core::SAMPLE_RATE;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::io_err;
use crate::metadata::MetadataRow;
use crate::wav::read_wav;
use crate::{ClipFailure, Error, Result};

/// Loads one clip as floats, checking the format matches the metadata.
pub fn load_clip(audio_dir: &Path, row: &MetadataRow) -> Result<Vec<f64>> {
    let path = audio_dir.join(&row.file);
    let wav = read_wav(&path)?;
    if wav.channels != 1 || wav.sample_rate != row.sr_hz {
        return Err(Error::Wav {
            path,
            message: format!(
                "expected mono {} Hz, found {} channel(s) at {} Hz",
                row.sr_hz, wav.channels, wav.sample_rate
            ),
        });
    }
    Ok(wav.to_f64())
}

fn check_audio_dir(audio_dir: &Path) -> Result<()> {
    let meta = fs::metadata(audio_dir).map_err(io_err(audio_dir))?;
    if !meta.is_dir() {
        return Err(Error::Invalid(format!("{} is not a directory", audio_dir.display())));
    }
    Ok(())
}

/// Runs `f` on every row in parallel, keeping row order and collecting every
/// failure with its file name.
fn per_clip<T: Send>(
    rows: &[MetadataRow],
    f: impl Fn(&MetadataRow) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let results: Vec<_> = rows
        .par_iter()
        .map(|row| f(row).map_err(|e| ClipFailure { file: row.file.clone(), message: e.to_string() }))
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(e) => failures.push(e),
        }
    }
    if failures.is_empty() { Ok(out) } else { Err(Error::Clips(failures)) }
}

pub fn clip_feature(samples: &[f64], cfg: &MelConfig) -> earcon_core::Result<PooledMelFeature> {
    Ok(PooledMelFeature::from_log_mel(&log_mel(samples, cfg, SAMPLE_RATE)?))
}

pub fn extract_features(
    audio_dir: &Path,
    rows: &[MetadataRow],
    cfg: &MelConfig,
) -> Result<Vec<PooledMelFeature>> {
    check_audio_dir(audio_dir)?;
    per_clip(rows, |row| Ok(clip_feature(&load_clip(audio_dir, row)?, cfg)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitMetrics {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Rows are true classes, columns predictions, both in `classes` order.
    pub confusion: Vec<Vec<usize>>,
}

impl From<ClassificationMetrics> for SplitMetrics {
    fn from(m: ClassificationMetrics) -> Self {
        Self { n: m.n, correct: m.correct, accuracy: m.accuracy, confusion: m.confusion }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierConfigEcho {
    pub n_mels: usize,
    pub window: usize,
    pub hop: usize,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub pooling: String,
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassPrediction {
    pub file: String,
    pub split: String,
    pub truth: String,
    pub predicted: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub task: String,
    pub classes: Vec<String>,
    pub config: ClassifierConfigEcho,
    pub train: SplitMetrics,
    pub val: Option<SplitMetrics>,
    pub test: SplitMetrics,
    pub initial_train_loss: f64,
    pub final_train_loss: f64,
    pub predictions: Vec<ClassPrediction>,
}

/// The trained model together with its report.
pub struct ClassificationRun {
    pub model: ClassifierModel,
    pub report: ClassificationReport,
}

fn split_metrics(
    model: &ClassifierModel,
    features: &[Vec<f64>],
    labels: &[usize],
    rows: &[MetadataRow],
    split: Split,
) -> earcon_core::Result<ClassificationMetrics> {
    let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].split == split).collect();
    let truth: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    let pred: Vec<usize> = idx.iter().map(|&i| model.predict(&features[i])).collect();
    classification_metrics(&truth, &pred, WaveformFamily::ALL.len())
}

/// Extract → train on the train split → evaluate on train/val/test.
pub fn run_classification(
    audio_dir: &Path,
    rows: &[MetadataRow],
    mel: &MelConfig,
    train_cfg: &TrainConfig,
) -> Result<ClassificationRun> {
    let pooled = extract_features(audio_dir, rows, mel)?;
    let features: Vec<Vec<f64>> = pooled.iter().map(PooledMelFeature::to_vector).collect();
    let labels: Vec<usize> = rows.iter().map(|r| r.waveform.class_index()).collect();

    let (train_x, train_y): (Vec<Vec<f64>>, Vec<usize>) = rows
        .iter()
        .zip(features.iter().zip(&labels))
        .filter(|(r, _)| r.split == Split::Train)
        .map(|(_, (x, y))| (x.clone(), *y))
        .unzip();
    let model = train_classifier(&train_x, &train_y, WaveformFamily::ALL.len(), train_cfg)?;

    let train = split_metrics(&model, &features, &labels, rows, Split::Train)?;
    let val = match split_metrics(&model, &features, &labels, rows, Split::Val) {
        Ok(m) => Some(m.into()),
        Err(earcon_core::Error::EmptySplit) => None,
        Err(e) => return Err(e.into()),
    };
    let test = split_metrics(&model, &features, &labels, rows, Split::Test)?;

    let predictions = rows
        .iter()
        .zip(&features)
        .map(|(row, x)| ClassPrediction {
            file: row.file.clone(),
            split: row.split.name().into(),
            truth: row.waveform.name().into(),
            predicted: WaveformFamily::ALL[model.predict(x)].name().into(),
        })
        .collect();
    let report = ClassificationReport {
        task: "waveform_classification".into(),
        classes: WaveformFamily::ALL.iter().map(|w| w.name().into()).collect(),
        config: ClassifierConfigEcho {
            n_mels: mel.n_mels,
            window: mel.stft.window_size,
            hop: mel.stft.hop,
            f_min_hz: mel.f_min_hz,
            f_max_hz: mel.f_max_hz,
            pooling: "per-band mean and variance over frames".into(),
            learning_rate: train_cfg.learning_rate,
            iterations: train_cfg.iterations,
            l2: train_cfg.l2,
        },
        train: train.into(),
        val,
        test: test.into(),
        initial_train_loss: model.loss_history.first().copied().unwrap_or(f64::NAN),
        final_train_loss: model.loss_history.last().copied().unwrap_or(f64::NAN),
        predictions,
    };
    Ok(ClassificationRun { model, report })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F0Summary {
    pub n: usize,
    pub n_voiced: usize,
    pub n_unvoiced: usize,
    pub mae_hz: Option<f64>,
    pub medae_hz: Option<f64>,
    pub semitone_rate: f64,
}

impl From<F0Metrics> for F0Summary {
    fn from(m: F0Metrics) -> Self {
        Self {
            n: m.n,
            n_voiced: m.n_voiced,
            n_unvoiced: m.n_unvoiced,
            mae_hz: m.mae_hz,
            medae_hz: m.medae_hz,
            semitone_rate: m.semitone_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F0Prediction {
    pub file: String,
    pub waveform: String,
    pub f0_hz: u32,
    pub estimate_hz: Option<f64>,
    pub abs_error_hz: Option<f64>,
    pub voiced_frames: usize,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YinConfigEcho {
    pub frame: usize,
    pub hop: usize,
    pub threshold: f64,
    pub search_lo_hz: f64,
    pub search_hi_hz: f64,
    pub aggregation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F0Report {
    pub task: String,
    pub config: YinConfigEcho,
    /// Every single-tone clip.
    pub all_single_tones: F0Summary,
    /// Dry, AM-off sine tones.
    pub clean_sines: Option<F0Summary>,
    pub by_waveform: BTreeMap<String, F0Summary>,
    pub predictions: Vec<F0Prediction>,
}

/// YIN over every single-tone clip, scored against the nominal f0.
pub fn run_f0(audio_dir: &Path, rows: &[MetadataRow], yin: &YinConfig) -> Result<F0Report> {
    let singles: Vec<MetadataRow> =
        rows.iter().filter(|r| r.chord == ChordType::Single).cloned().collect();
    if singles.is_empty() {
        return Err(earcon_core::Error::NoSingleTones.into());
    }
    check_audio_dir(audio_dir)?;
    let estimates = per_clip(&singles, |row| {
        Ok(yin_f0_with(&load_clip(audio_dir, row)?, yin, SAMPLE_RATE)?)
    })?;

    let summarize = |keep: &dyn Fn(&MetadataRow) -> bool| -> Result<Option<F0Summary>> {
        let pairs: Vec<(f64, Option<f64>)> = singles
            .iter()
            .zip(&estimates)
            .filter(|(r, _)| keep(r))
            .map(|(r, e)| (r.f0_hz as f64, e.f0_hz))
            .collect();
        if pairs.is_empty() {
            return Ok(None);
        }
        Ok(Some(f0_metrics(&pairs, 1.0)?.into()))
    };

    let all_single_tones = summarize(&|_| true)?.ok_or(earcon_core::Error::NoSingleTones)?;
    let clean_sines = summarize(&|r| {
        r.waveform == WaveformFamily::Sine && r.reverb == ReverbKind::Dry && r.am_depth == 0.0
    })?;
    let mut by_waveform = BTreeMap::new();
    for w in WaveformFamily::ALL {
        if let Some(s) = summarize(&|r| r.waveform == w)? {
            by_waveform.insert(w.name().to_string(), s);
        }
    }
    let predictions = singles
        .iter()
        .zip(&estimates)
        .map(|(r, e)| F0Prediction {
            file: r.file.clone(),
            waveform: r.waveform.name().into(),
            f0_hz: r.f0_hz,
            estimate_hz: e.f0_hz,
            abs_error_hz: e.f0_hz.map(|f| (f - r.f0_hz as f64).abs()),
            voiced_frames: e.voiced_frames(),
            frames: e.frame_values.len(),
        })
        .collect();
    Ok(F0Report {
        task: "f0_regression".into(),
        config: YinConfigEcho {
            frame: yin.frame_size,
            hop: yin.hop,
            threshold: yin.threshold,
            search_lo_hz: yin.search_lo_hz,
            search_hi_hz: yin.search_hi_hz,
            aggregation: "median over voiced frames".into(),
        },
        all_single_tones,
        clean_sines,
        by_waveform,
        predictions,
    })
}

pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}
