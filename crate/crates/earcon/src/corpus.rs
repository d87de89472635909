//! Renders the sampled grid through the full chain and writes the corpus.

use std::fs;
use std::path::{Path, PathBuf};

use earcon_core::analysis::{spectral_stats, StftConfig};
use earcon_core::effects::{
    apply_reverb, measure_levels, normalize_rms, LevelReport, PEAK_CAP_DBFS, TARGET_RMS_DBFS,
};
use earcon_core::grid::{assign_split, clip_filename, enumerate_grid, sample_corpus, GridDefinition, Split};
use earcon_core::pcm::{dequantize_i16, quantize_i16};
use earcon_core::synth::{render_dry_clip, ChordType, ClipSpec};
use earcon_core::{BIT_DEPTH, SAMPLE_RATE};
use rayon::prelude::*;

use crate::error::io_err;
use crate::manifest::{Constants, CorpusManifest, GridEcho, SplitCounts};
use crate::metadata::{write_metadata, MetadataRow};
use crate::wav::write_wav_pcm;
use crate::{ClipFailure, Error, Result, DATASET_VERSION};

const LICENSE_NOTICE: &str = "\
# Licenses

Generated audio: CC0-1.0 (public domain dedication).
Generator code: MIT.
No third-party assets are included.
";

/// One clip after the whole chain, as stored on disk.
#[derive(Debug, Clone)]
pub struct RenderedClip {
    pub spec: ClipSpec,
    pub filename: String,
    pub split: Split,
    pub pcm: Vec<i16>,
    /// Measured on the quantized samples.
    pub levels: LevelReport,
    pub capped: bool,
}

/// chord → AM → envelope → reverb → normalize → 16-bit quantize.
pub fn render_clip(spec: &ClipSpec) -> earcon_core::Result<RenderedClip> {
    let dry = render_dry_clip(spec, SAMPLE_RATE)?;
    let wet = apply_reverb(&dry, spec.reverb, SAMPLE_RATE);
    let normalized = normalize_rms(&wet, TARGET_RMS_DBFS, PEAK_CAP_DBFS)?;
    let pcm = quantize_i16(&normalized.samples)?;
    let levels = measure_levels(&dequantize_i16(&pcm))?;
    let filename = clip_filename(spec);
    Ok(RenderedClip {
        spec: *spec,
        split: assign_split(&filename),
        filename,
        pcm,
        levels,
        capped: normalized.capped,
    })
}

pub fn metadata_row(clip: &RenderedClip) -> earcon_core::Result<MetadataRow> {
    let stats = spectral_stats(&dequantize_i16(&clip.pcm), &StftConfig::default(), SAMPLE_RATE)?;
    let spec = &clip.spec;
    let preset = spec.envelope.preset();
    Ok(MetadataRow {
        file: clip.filename.clone(),
        split: clip.split,
        sr_hz: SAMPLE_RATE,
        bit_depth: BIT_DEPTH,
        duration_ms: spec.duration_ms,
        peak_dbfs: clip.levels.peak_dbfs,
        rms_dbfs: clip.levels.rms_dbfs,
        lufs: None,
        waveform: spec.waveform,
        f0_hz: spec.f0_hz,
        chord: spec.chord,
        am_rate_hz: spec.am.rate_hz,
        am_depth: spec.am.depth,
        envelope: spec.envelope,
        reverb: spec.reverb,
        spec_centroid_hz: stats.centroid_hz,
        bandwidth_hz: stats.bandwidth_hz,
        zcr: stats.zcr,
        inharmonicity_proxy: u8::from(spec.chord != ChordType::Single),
        roughness_proxy: spec.am.depth,
        attack_ms: preset.attack_ms,
        release_ms: preset.release_ms,
        seed: spec.seed,
        version: DATASET_VERSION.to_string(),
    })
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub grid: GridDefinition,
    pub target_n: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub meta_path: PathBuf,
    pub manifest_path: PathBuf,
    pub force: bool,
}

impl BuildOptions {
    /// Manifest defaults to `manifest.json` next to the metadata file.
    pub fn new(out_dir: impl Into<PathBuf>, meta_path: impl Into<PathBuf>, seed: u64, target_n: usize) -> Self {
        let meta_path = meta_path.into();
        let manifest_path = default_manifest_path(&meta_path);
        Self {
            grid: GridDefinition::default(),
            target_n,
            seed,
            out_dir: out_dir.into(),
            meta_path,
            manifest_path,
            force: false,
        }
    }
}

pub fn default_manifest_path(meta_path: &Path) -> PathBuf {
    meta_path.parent().unwrap_or(Path::new(".")).join("manifest.json")
}

/// Specs selected for a corpus, without rendering anything.
pub fn select_specs(grid: &GridDefinition, target_n: usize, seed: u64) -> Result<Vec<ClipSpec>> {
    let superset = enumerate_grid(grid)?;
    Ok(sample_corpus(&superset, target_n, seed)?)
}

fn is_nonempty_dir(path: &Path) -> Result<bool> {
    match fs::read_dir(path) {
        Ok(mut it) => Ok(it.next().is_some()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
        Err(e) => Err(Error::Io { path: path.to_path_buf(), source: e }),
    }
}

fn prepare_outputs(opts: &BuildOptions) -> Result<()> {
    if !opts.force {
        if is_nonempty_dir(&opts.out_dir)? {
            return Err(Error::OutputExists(opts.out_dir.clone()));
        }
        for p in [&opts.meta_path, &opts.manifest_path] {
            if p.exists() {
                return Err(Error::OutputExists(p.clone()));
            }
        }
    }
    fs::create_dir_all(&opts.out_dir).map_err(io_err(&opts.out_dir))?;
    if opts.force {
        // Drop clips from an earlier run so the tree matches the new metadata.
        for entry in fs::read_dir(&opts.out_dir).map_err(io_err(&opts.out_dir))? {
            let path = entry.map_err(io_err(&opts.out_dir))?.path();
            let stale = path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("clip_") && n.ends_with(".wav"));
            if stale {
                fs::remove_file(&path).map_err(io_err(&path))?;
            }
        }
    }
    for p in [&opts.meta_path, &opts.manifest_path] {
        if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
    }
    Ok(())
}

/// Renders, writes WAVs, metadata, license notice and manifest.
///
/// Validation (grid, target size, output locations) happens before any file
/// is written. Clip rendering runs in parallel; rows are written in index
/// order.
pub fn build_corpus(opts: &BuildOptions) -> Result<CorpusManifest> {
    let specs = select_specs(&opts.grid, opts.target_n, opts.seed)?;
    prepare_outputs(opts)?;

    let results: Vec<std::result::Result<(MetadataRow, bool), ClipFailure>> = specs
        .par_iter()
        .map(|spec| {
            let fail = |message: String| ClipFailure { file: clip_filename(spec), message };
            let clip = render_clip(spec).map_err(|e| fail(e.to_string()))?;
            let row = metadata_row(&clip).map_err(|e| fail(e.to_string()))?;
            write_wav_pcm(&opts.out_dir.join(&clip.filename), &clip.pcm, SAMPLE_RATE)
                .map_err(|e| fail(e.to_string()))?;
            Ok((row, clip.capped))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    let mut capped_clips = 0;
    for r in results {
        match r {
            Ok((row, capped)) => {
                capped_clips += usize::from(capped);
                rows.push(row);
            }
            Err(f) => failures.push(f),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Clips(failures));
    }

    write_metadata(&opts.meta_path, &rows)?;
    if let Some(dir) = opts.meta_path.parent() {
        let notice = dir.join("LICENSES.md");
        fs::write(&notice, LICENSE_NOTICE).map_err(io_err(&notice))?;
    }

    let mut split_counts = SplitCounts::default();
    for row in &rows {
        match row.split {
            Split::Train => split_counts.train += 1,
            Split::Val => split_counts.val += 1,
            Split::Test => split_counts.test += 1,
        }
    }
    let manifest = CorpusManifest {
        version: DATASET_VERSION.to_string(),
        seed: opts.seed,
        target_n: opts.target_n,
        sample_rate: SAMPLE_RATE,
        bit_depth: BIT_DEPTH,
        grid: GridEcho::from_grid(&opts.grid),
        constants: Constants::current(),
        clip_count: rows.len(),
        split_counts,
        capped_clips,
    };
    manifest.save(&opts.manifest_path)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendered_clip_meets_level_contract() {
        let specs = select_specs(&GridDefinition::default(), 20, 13).unwrap();
        for spec in &specs {
            let clip = render_clip(spec).unwrap();
            assert_eq!(clip.pcm.len(), spec.duration_ms as usize * 48);
            assert!(clip.levels.peak_dbfs <= -0.99);
            if !clip.capped {
                assert!((clip.levels.rms_dbfs + 20.0).abs() < 0.01);
            }
            assert_eq!(clip.split, assign_split(&clip.filename));
        }
    }

    #[test]
    fn metadata_row_echoes_the_spec() {
        let spec = select_specs(&GridDefinition::default(), 1, 13).unwrap()[0];
        let row = metadata_row(&render_clip(&spec).unwrap()).unwrap();
        assert_eq!(row.spec(spec.index), spec);
        assert_eq!(row.roughness_proxy, spec.am.depth);
        assert_eq!(row.inharmonicity_proxy, u8::from(spec.chord != ChordType::Single));
        assert_eq!(row.lufs, None);
        assert_eq!(row.version, DATASET_VERSION);
    }

    #[test]
    fn build_refuses_populated_output() {
        let dir = tempfile::TempDir::new().unwrap();
        let out = dir.path().join("audio");
        fs::create_dir(&out).unwrap();
        fs::write(out.join("keep.txt"), "x").unwrap();
        let opts = BuildOptions::new(&out, dir.path().join("meta/metadata.csv"), 1, 3);
        assert!(matches!(build_corpus(&opts), Err(Error::OutputExists(_))));
    }
}
