//! 16-bit PCM quantization shared by the WAV writer and level metering.

use alloc::vec::Vec;

use crate::{Error, Result};

pub const I16_SCALE: f64 = 32767.0;

/// Round-half-away-from-zero of `x · 32767`. Rejects samples outside [−1, 1].
pub fn quantize_i16(samples: &[f64]) -> Result<Vec<i16>> {
    samples
        .iter()
        .map(|&x| {
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::InvalidConfig("sample outside [-1, 1]"));
            }
            Ok(libm::round(x * I16_SCALE) as i16)
        })
        .collect()
}

pub fn dequantize_i16(samples: &[i16]) -> Vec<f64> {
    samples.iter().map(|&s| s as f64 / I16_SCALE).collect()
}
