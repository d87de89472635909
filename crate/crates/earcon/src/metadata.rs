//! The per-clip metadata table (`metadata.csv`).

use std::fs::File;
use std::path::Path;

use earcon_core::effects::ReverbKind;
use earcon_core::grid::Split;
use earcon_core::synth::{AmSetting, ChordType, ClipSpec, EnvelopeKind, WaveformFamily};

use crate::error::io_err;
use crate::{Error, Result};

/// Header row, in order.
pub const METADATA_COLUMNS: [&str; 24] = [
    "file",
    "split",
    "sr_hz",
    "bit_depth",
    "duration_ms",
    "peak_dbfs",
    "rms_dbfs",
    "lufs",
    "waveform",
    "f0_hz",
    "chord",
    "am_rate_hz",
    "am_depth",
    "envelope",
    "reverb",
    "spec_centroid_hz",
    "bandwidth_hz",
    "zcr",
    "inharmonicity_proxy",
    "roughness_proxy",
    "attack_ms",
    "release_ms",
    "seed",
    "version",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MetadataRow {
    pub file: String,
    pub split: Split,
    pub sr_hz: u32,
    pub bit_depth: u16,
    pub duration_ms: u32,
    pub peak_dbfs: f64,
    pub rms_dbfs: f64,
    /// Loudness is not computed; always written empty.
    pub lufs: Option<f64>,
    pub waveform: WaveformFamily,
    pub f0_hz: u32,
    pub chord: ChordType,
    pub am_rate_hz: f64,
    pub am_depth: f64,
    pub envelope: EnvelopeKind,
    pub reverb: ReverbKind,
    pub spec_centroid_hz: f64,
    pub bandwidth_hz: f64,
    pub zcr: f64,
    pub inharmonicity_proxy: u8,
    pub roughness_proxy: f64,
    pub attack_ms: u32,
    pub release_ms: u32,
    pub seed: u64,
    pub version: String,
}

impl MetadataRow {
    pub fn am(&self) -> AmSetting {
        AmSetting::new(self.am_rate_hz, self.am_depth)
    }

    /// Factor values as a spec; `index` comes from the row position.
    pub fn spec(&self, index: usize) -> ClipSpec {
        ClipSpec {
            waveform: self.waveform,
            f0_hz: self.f0_hz,
            duration_ms: self.duration_ms,
            envelope: self.envelope,
            am: self.am(),
            chord: self.chord,
            reverb: self.reverb,
            seed: self.seed,
            index,
        }
    }

    fn to_record(&self) -> [String; 24] {
        [
            self.file.clone(),
            self.split.name().to_string(),
            self.sr_hz.to_string(),
            self.bit_depth.to_string(),
            self.duration_ms.to_string(),
            format_float(self.peak_dbfs),
            format_float(self.rms_dbfs),
            self.lufs.map(format_float).unwrap_or_default(),
            self.waveform.name().to_string(),
            self.f0_hz.to_string(),
            self.chord.name().to_string(),
            format_float(self.am_rate_hz),
            format_float(self.am_depth),
            self.envelope.name().to_string(),
            self.reverb.name().to_string(),
            format_float(self.spec_centroid_hz),
            format_float(self.bandwidth_hz),
            format_float(self.zcr),
            self.inharmonicity_proxy.to_string(),
            format_float(self.roughness_proxy),
            self.attack_ms.to_string(),
            self.release_ms.to_string(),
            self.seed.to_string(),
            self.version.clone(),
        ]
    }

    fn from_record(rec: &csv::StringRecord) -> std::result::Result<Self, String> {
        fn num<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> std::result::Result<T, String> {
            let s = &rec[i];
            s.parse().map_err(|_| format!("column {}: cannot parse {s:?}", METADATA_COLUMNS[i]))
        }
        fn name<T>(rec: &csv::StringRecord, i: usize, f: impl Fn(&str) -> Option<T>) -> std::result::Result<T, String> {
            f(&rec[i]).ok_or_else(|| format!("column {}: unknown value {:?}", METADATA_COLUMNS[i], &rec[i]))
        }
        if rec.len() != METADATA_COLUMNS.len() {
            return Err(format!("expected {} fields, found {}", METADATA_COLUMNS.len(), rec.len()));
        }
        Ok(Self {
            file: rec[0].to_string(),
            split: name(rec, 1, Split::from_name)?,
            sr_hz: num(rec, 2)?,
            bit_depth: num(rec, 3)?,
            duration_ms: num(rec, 4)?,
            peak_dbfs: num(rec, 5)?,
            rms_dbfs: num(rec, 6)?,
            lufs: if rec[7].is_empty() { None } else { Some(num(rec, 7)?) },
            waveform: name(rec, 8, WaveformFamily::from_name)?,
            f0_hz: num(rec, 9)?,
            chord: name(rec, 10, ChordType::from_name)?,
            am_rate_hz: num(rec, 11)?,
            am_depth: num(rec, 12)?,
            envelope: name(rec, 13, EnvelopeKind::from_name)?,
            reverb: name(rec, 14, ReverbKind::from_name)?,
            spec_centroid_hz: num(rec, 15)?,
            bandwidth_hz: num(rec, 16)?,
            zcr: num(rec, 17)?,
            inharmonicity_proxy: num(rec, 18)?,
            roughness_proxy: num(rec, 19)?,
            attack_ms: num(rec, 20)?,
            release_ms: num(rec, 21)?,
            seed: num(rec, 22)?,
            version: rec[23].to_string(),
        })
    }
}

/// Fixed notation with six significant digits (`-20.0000`, `0.0208333`).
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let x = if x == 0.0 { 0.0 } else { x };
    if x == 0.0 {
        return "0.00000".to_string();
    }
    // Exponent after rounding to six significant digits.
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_metadata(path: &Path, rows: &[MetadataRow]) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    w.write_record(METADATA_COLUMNS).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.to_record()).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Compares a header against [`METADATA_COLUMNS`].
pub fn check_header(header: &[&str]) -> Result<()> {
    if header == METADATA_COLUMNS {
        return Ok(());
    }
    let missing = METADATA_COLUMNS
        .iter()
        .filter(|c| !header.contains(c))
        .map(|c| c.to_string())
        .collect();
    let unexpected = header
        .iter()
        .filter(|c| !METADATA_COLUMNS.contains(c))
        .map(|c| c.to_string())
        .collect();
    Err(Error::Schema { missing, unexpected, misordered: true })
}

pub fn read_metadata(path: &Path) -> Result<Vec<MetadataRow>> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    check_header(&header.iter().collect::<Vec<_>>()).map_err(|e| match e {
        Error::Schema { missing, unexpected, .. } => {
            let misordered = missing.is_empty() && unexpected.is_empty();
            Error::Schema { missing, unexpected, misordered }
        }
        other => other,
    })?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = MetadataRow::from_record(&rec)
            .map_err(|message| Error::MetadataRow { path: path.to_path_buf(), line, message })?;
        rows.push(row);
    }
    Ok(rows)
}
