//! Grid of log-mel spectrograms: one row per waveform family, one column per
//! AM setting.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use earcon_core::analysis::{log_mel, MelConfig, Spectrogram};
use earcon_core::effects::ReverbKind;
use earcon_core::grid::GridDefinition;
use earcon_core::synth::{AmSetting, ChordType, WaveformFamily};
use earcon_core::SAMPLE_RATE;

use crate::baselines::load_clip;
use crate::error::io_err;
use crate::metadata::MetadataRow;
use crate::{Error, Result};

pub const TILE_WIDTH: usize = 128;
pub const TILE_HEIGHT: usize = 128;
pub const GAP: usize = 4;
const BACKGROUND: [u8; 3] = [24, 24, 24];
/// Dynamic range shown per tile, in natural-log power units (60 dB).
const RANGE_LN: f64 = 6.0 * std::f64::consts::LN_10;

/// Viridis sampled at nine evenly spaced points.
const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

/// Maps `t ∈ [0, 1]` onto the baked palette with linear interpolation.
pub fn colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (t.floor() as usize).min(VIRIDIS.len() - 2);
    let frac = t - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    std::array::from_fn(|c| (a[c] as f64 + (b[c] as f64 - a[c] as f64) * frac).round() as u8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSummary {
    pub width: usize,
    pub height: usize,
    /// Files used, row-major (family × AM setting).
    pub cells: Vec<String>,
}

fn am_label(am: &AmSetting) -> String {
    format!("am{}-{:.1}", am.rate_hz, am.depth)
}

/// Picks the representative clip for each cell: the first row (in metadata
/// order) with matching family and AM, preferring single dry tones.
pub fn select_cells(rows: &[MetadataRow]) -> Result<Vec<Vec<&MetadataRow>>> {
    let ams = GridDefinition::default().am_settings();
    let mut missing = Vec::new();
    let mut grid = Vec::new();
    for w in WaveformFamily::ALL {
        let mut line = Vec::new();
        for am in &ams {
            let matching: Vec<&MetadataRow> =
                rows.iter().filter(|r| r.waveform == w && r.am() == *am).collect();
            let pick = matching
                .iter()
                .find(|r| r.chord == ChordType::Single && r.reverb == ReverbKind::Dry)
                .or_else(|| matching.iter().find(|r| r.chord == ChordType::Single))
                .or_else(|| matching.first());
            match pick {
                Some(r) => line.push(*r),
                None => missing.push(format!("{} {}", w.name(), am_label(am))),
            }
        }
        grid.push(line);
    }
    if !missing.is_empty() {
        return Err(Error::MissingCombinations(missing));
    }
    Ok(grid)
}

fn paint_tile(img: &mut [u8], stride: usize, x0: usize, y0: usize, mel: &Spectrogram) {
    let max = mel.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = max - RANGE_LN;
    let frames = mel.n_frames.max(1);
    for py in 0..TILE_HEIGHT {
        // Low mel bands at the bottom.
        let band = (TILE_HEIGHT - 1 - py) * mel.n_bins / TILE_HEIGHT;
        for px in 0..TILE_WIDTH {
            let frame = px * frames / TILE_WIDTH;
            let v = if mel.n_frames == 0 { lo } else { mel.get(frame, band) };
            let rgb = colormap((v - lo) / RANGE_LN);
            let at = ((y0 + py) * stride + x0 + px) * 3;
            img[at..at + 3].copy_from_slice(&rgb);
        }
    }
}

/// Renders the figure to an 8-bit RGB PNG.
pub fn render_spectrogram_figure(
    audio_dir: &Path,
    rows: &[MetadataRow],
    out_path: &Path,
    mel_cfg: &MelConfig,
) -> Result<FigureSummary> {
    let cells = select_cells(rows)?;
    let n_rows = cells.len();
    let n_cols = cells.first().map_or(0, Vec::len);
    let width = GAP + n_cols * (TILE_WIDTH + GAP);
    let height = GAP + n_rows * (TILE_HEIGHT + GAP);
    let mut img: Vec<u8> = BACKGROUND.iter().copied().cycle().take(width * height * 3).collect();
    let mut used = Vec::new();
    for (r, line) in cells.iter().enumerate() {
        for (c, row) in line.iter().enumerate() {
            let samples = load_clip(audio_dir, row)?;
            let mel = log_mel(&samples, mel_cfg, SAMPLE_RATE)?;
            paint_tile(&mut img, width, GAP + c * (TILE_WIDTH + GAP), GAP + r * (TILE_HEIGHT + GAP), &mel);
            used.push(row.file.clone());
        }
    }

    if let Some(parent) = out_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let png_err = |e: png::EncodingError| Error::Png { path: out_path.to_path_buf(), message: e.to_string() };
    let file = File::create(out_path).map_err(io_err(out_path))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(png_err)?;
    writer.write_image_data(&img).map_err(png_err)?;
    writer.finish().map_err(png_err)?;
    Ok(FigureSummary { width, height, cells: used })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), VIRIDIS[0]);
        assert_eq!(colormap(1.0), VIRIDIS[8]);
        assert_eq!(colormap(-3.0), VIRIDIS[0]);
        assert_eq!(colormap(0.5), VIRIDIS[4]);
    }
}
