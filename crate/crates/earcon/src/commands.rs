//! Subcommand bodies, kept out of `main` so tests can drive them directly.

use std::path::{Path, PathBuf};

use earcon_core::analysis::{MelConfig, YinConfig};
use earcon_core::baseline::TrainConfig;

use crate::baselines::{run_classification, run_f0, write_report, ClassificationReport, F0Report};
use crate::corpus::{build_corpus, default_manifest_path, BuildOptions};
use crate::figure::{render_spectrogram_figure, FigureSummary};
use crate::manifest::CorpusManifest;
use crate::metadata::{read_metadata, MetadataRow};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 13;
pub const DEFAULT_TARGET_N: usize = 400;

#[derive(Debug, Clone)]
pub struct GenerateConfig {
    pub out_dir: PathBuf,
    pub meta_path: PathBuf,
    pub manifest_path: Option<PathBuf>,
    pub seed: u64,
    pub target_n: usize,
    pub force: bool,
    /// Take seed, size and grid from an existing manifest instead.
    pub from_manifest: Option<PathBuf>,
}

pub fn generate(cfg: &GenerateConfig) -> Result<CorpusManifest> {
    let mut opts = BuildOptions::new(&cfg.out_dir, &cfg.meta_path, cfg.seed, cfg.target_n);
    opts.force = cfg.force;
    opts.manifest_path = cfg
        .manifest_path
        .clone()
        .unwrap_or_else(|| default_manifest_path(&cfg.meta_path));
    if let Some(path) = &cfg.from_manifest {
        let source = CorpusManifest::load(path)?;
        source.check_compatible()?;
        opts.seed = source.seed;
        opts.target_n = source.target_n;
        opts.grid = source.grid.to_grid()?;
    }
    build_corpus(&opts)
}

fn load_rows(audio_dir: &Path, meta_path: &Path) -> Result<Vec<MetadataRow>> {
    if !audio_dir.is_dir() {
        return Err(Error::Invalid(format!("audio directory {} does not exist", audio_dir.display())));
    }
    let rows = read_metadata(meta_path)?;
    if rows.is_empty() {
        return Err(Error::Invalid(format!("{} has no clips", meta_path.display())));
    }
    Ok(rows)
}

pub fn classify_waveform(audio_dir: &Path, meta_path: &Path, report_path: &Path) -> Result<ClassificationReport> {
    let rows = load_rows(audio_dir, meta_path)?;
    let run = run_classification(audio_dir, &rows, &MelConfig::default(), &TrainConfig::default())?;
    write_report(report_path, &run.report)?;
    Ok(run.report)
}

pub fn f0_regression(audio_dir: &Path, meta_path: &Path, report_path: &Path) -> Result<F0Report> {
    let rows = load_rows(audio_dir, meta_path)?;
    let report = run_f0(audio_dir, &rows, &YinConfig::default())?;
    write_report(report_path, &report)?;
    Ok(report)
}

pub fn spectrogram_figure(audio_dir: &Path, meta_path: &Path, out_path: &Path) -> Result<FigureSummary> {
    let rows = load_rows(audio_dir, meta_path)?;
    render_spectrogram_figure(audio_dir, &rows, out_path, &MelConfig::default())
}
