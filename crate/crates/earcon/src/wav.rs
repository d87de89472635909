//! Mono 16-bit PCM RIFF/WAVE with the canonical 44-byte header.

use std::fs;
use std::path::Path;

use earcon_core::pcm::{dequantize_i16, quantize_i16};

use crate::error::io_err;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WavData {
    pub sample_rate: u32,
    pub channels: u16,
    pub bits_per_sample: u16,
    pub samples: Vec<i16>,
}

impl WavData {
    pub fn to_f64(&self) -> Vec<f64> {
        dequantize_i16(&self.samples)
    }
}

pub fn encode_wav(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let data_len = (samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn write_wav_pcm(path: &Path, samples: &[i16], sample_rate: u32) -> Result<()> {
    fs::write(path, encode_wav(samples, sample_rate)).map_err(io_err(path))
}

/// Quantizes `buffer` (which must lie in [−1, 1]) and writes it.
pub fn write_wav(path: &Path, buffer: &[f64], sample_rate: u32) -> Result<()> {
    let pcm = quantize_i16(buffer)?;
    write_wav_pcm(path, &pcm, sample_rate)
}

fn u16_at(b: &[u8], i: usize) -> u16 {
    u16::from_le_bytes([b[i], b[i + 1]])
}

fn u32_at(b: &[u8], i: usize) -> u32 {
    u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]])
}

/// Parses 16-bit PCM; unknown chunks are skipped.
pub fn decode_wav(bytes: &[u8]) -> std::result::Result<WavData, String> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err("not a RIFF/WAVE file".into());
    }
    let mut pos = 12;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        let end = body.checked_add(len).filter(|&e| e <= bytes.len());
        let Some(end) = end else {
            return Err(format!("chunk {:?} overruns the file", String::from_utf8_lossy(id)));
        };
        match id {
            b"fmt " if len >= 16 => {
                format = Some((
                    u16_at(bytes, body),
                    u16_at(bytes, body + 2),
                    u32_at(bytes, body + 4),
                    u16_at(bytes, body + 14),
                ));
            }
            b"data" => {
                let (tag, channels, sample_rate, bits) =
                    format.ok_or("data chunk before fmt chunk")?;
                if tag != 1 || bits != 16 {
                    return Err(format!("unsupported encoding (format {tag}, {bits} bits)"));
                }
                let samples = bytes[body..end]
                    .chunks_exact(2)
                    .map(|c| i16::from_le_bytes([c[0], c[1]]))
                    .collect();
                return Ok(WavData { sample_rate, channels, bits_per_sample: bits, samples });
            }
            _ => {}
        }
        pos = end + (len & 1);
    }
    Err("no data chunk".into())
}

pub fn read_wav(path: &Path) -> Result<WavData> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_wav(&bytes).map_err(|message| Error::Wav { path: path.to_path_buf(), message })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let bytes = encode_wav(&[0i16; 12000], 48_000);
        assert_eq!(bytes.len(), 44 + 24000);
        assert_eq!(&bytes[0..4], b"RIFF");
        assert_eq!(u32_at(&bytes, 4), 36 + 24000);
        assert_eq!(u16_at(&bytes, 20), 1);
        assert_eq!(u16_at(&bytes, 22), 1);
        assert_eq!(u32_at(&bytes, 24), 48_000);
        assert_eq!(u32_at(&bytes, 28), 96_000);
        assert_eq!(u16_at(&bytes, 32), 2);
        assert_eq!(u16_at(&bytes, 34), 16);
        assert_eq!(u32_at(&bytes, 40), 24000);
    }

    #[test]
    fn extreme_samples_quantize_symmetrically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        write_wav(&path, &[1.0, -1.0, 0.0, 0.5], 48_000).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.samples, vec![32767, -32767, 0, 16384]);
    }

    #[test]
    fn out_of_range_sample_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_wav(&dir.path().join("x.wav"), &[1.0001], 48_000).is_err());
    }

    #[test]
    fn skips_unknown_chunks() {
        let mut bytes = encode_wav(&[5, -5], 48_000);
        let mut list = b"LIST".to_vec();
        list.extend_from_slice(&3u32.to_le_bytes());
        list.extend_from_slice(b"abc\0");
        bytes.splice(36..36, list);
        let wav = decode_wav(&bytes).unwrap();
        assert_eq!(wav.samples, vec![5, -5]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode_wav(b"not a wav").is_err());
    }
}
