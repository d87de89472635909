use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use earcon::commands::{self, GenerateConfig, DEFAULT_SEED, DEFAULT_TARGET_N};

#[derive(Parser)]
#[command(name = "earcon", version, about = "Parametric earcon corpus generator and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the corpus: WAVs, metadata.csv and manifest.json.
    Generate {
        #[arg(long = "outdir", default_value = "audio")]
        out_dir: PathBuf,
        #[arg(long, default_value = "metadata/metadata.csv")]
        meta: PathBuf,
        /// Defaults to manifest.json beside the metadata file.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long = "target_n", alias = "target-n", default_value_t = DEFAULT_TARGET_N)]
        target_n: usize,
        /// Regenerate from an existing manifest (overrides --seed/--target_n).
        #[arg(long = "from-manifest")]
        from_manifest: Option<PathBuf>,
        /// Overwrite an existing corpus.
        #[arg(long)]
        force: bool,
    },
    /// Pooled log-mel + logistic regression waveform-family baseline.
    ClassifyWaveform {
        #[arg(long = "audio_dir", alias = "audio-dir", default_value = "audio")]
        audio_dir: PathBuf,
        #[arg(long, default_value = "metadata/metadata.csv")]
        meta: PathBuf,
        #[arg(long, default_value = "reports/classify_waveform.json")]
        report: PathBuf,
    },
    /// YIN f0 baseline over single-tone clips.
    F0Regression {
        #[arg(long = "audio_dir", alias = "audio-dir", default_value = "audio")]
        audio_dir: PathBuf,
        #[arg(long, default_value = "metadata/metadata.csv")]
        meta: PathBuf,
        #[arg(long, default_value = "reports/f0_regression.json")]
        report: PathBuf,
    },
    /// Log-mel spectrogram grid (waveform family × AM setting) as PNG.
    SpectrogramFigure {
        #[arg(long = "audio_dir", alias = "audio-dir", default_value = "audio")]
        audio_dir: PathBuf,
        #[arg(long, default_value = "metadata/metadata.csv")]
        meta: PathBuf,
        #[arg(long, default_value = "figures/spectrograms.png")]
        out: PathBuf,
    },
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { out_dir, meta, manifest, seed, target_n, from_manifest, force } => {
            let cfg = GenerateConfig {
                out_dir,
                meta_path: meta,
                manifest_path: manifest,
                seed,
                target_n,
                force,
                from_manifest,
            };
            let m = commands::generate(&cfg)?;
            println!("clips: {}", m.clip_count);
            println!(
                "splits: train {} / val {} / test {}",
                m.split_counts.train, m.split_counts.val, m.split_counts.test
            );
            println!("peak-capped clips: {}", m.capped_clips);
        }
        Command::ClassifyWaveform { audio_dir, meta, report } => {
            let r = commands::classify_waveform(&audio_dir, &meta, &report)?;
            if let Some(val) = &r.val {
                println!("val accuracy: {:.3} ({}/{})", val.accuracy, val.correct, val.n);
            }
            println!("test accuracy: {:.3} ({}/{})", r.test.accuracy, r.test.correct, r.test.n);
            println!("report: {}", report.display());
        }
        Command::F0Regression { audio_dir, meta, report } => {
            let r = commands::f0_regression(&audio_dir, &meta, &report)?;
            let s = &r.all_single_tones;
            println!("subset: all single tones");
            println!("n: {} (unvoiced: {})", s.n, s.n_unvoiced);
            println!("MAE (Hz): {}", fmt_opt(s.mae_hz));
            println!("MedAE (Hz): {}", fmt_opt(s.medae_hz));
            println!("within 1 semitone: {:.1}%", 100.0 * s.semitone_rate);
            println!("report: {}", report.display());
        }
        Command::SpectrogramFigure { audio_dir, meta, out } => {
            let f = commands::spectrogram_figure(&audio_dir, &meta, &out)?;
            println!("figure: {} ({}x{}, {} tiles)", out.display(), f.width, f.height, f.cells.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
