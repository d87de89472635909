use std::f64::consts::PI;

use earcon_core::analysis::{yin_f0, zero_crossing_rate};
use earcon_core::grid::{enumerate_grid, GridDefinition};
use earcon_core::synth::{render_dry_clip, render_oscillator, ChordType, WaveformFamily};
use earcon_core::effects::ReverbKind;

const SR: u32 = 48_000;

fn dft_amplitude(x: &[f64], freq: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (k, v) in x.iter().enumerate() {
        let a = 2.0 * PI * freq * k as f64 / SR as f64;
        re += v * a.cos();
        im -= v * a.sin();
    }
    2.0 * (re * re + im * im).sqrt() / x.len() as f64
}

#[test]
fn yin_tracks_every_dry_single_tone() {
    let grid = GridDefinition::default();
    let tones: Vec<_> = enumerate_grid(&grid)
        .unwrap()
        .into_iter()
        .filter(|s| s.chord == ChordType::Single && s.reverb == ReverbKind::Dry && s.am.is_off())
        .collect();
    assert_eq!(tones.len(), 180);
    for spec in tones {
        let x = render_dry_clip(&spec, SR).unwrap();
        let f0 = yin_f0(&x, 80.0, 1600.0, SR).unwrap().f0_hz;
        let err = (f0.expect("voiced") - spec.f0_hz as f64).abs();
        assert!(err < 0.5, "{spec:?}: {err}");
    }
}

#[test]
fn square_and_triangle_do_not_alias() {
    let nyquist = SR as f64 / 2.0;
    for family in [WaveformFamily::Square, WaveformFamily::Triangle] {
        for &f0 in &GridDefinition::default().f0_hz {
            let f0 = f0 as f64;
            let x = render_oscillator(family, f0, SR as usize, SR).unwrap();
            let fundamental = dft_amplitude(&x, f0);
            // Where a naive waveform's partials above Nyquist would fold back.
            let mut n = 1;
            while (n as f64) * f0 < 3.0 * nyquist {
                let partial = n as f64 * f0;
                if partial > nyquist {
                    let folded = (partial - SR as f64 * (partial / SR as f64).round()).abs();
                    if folded > 0.0 && (folded / f0).fract() != 0.0 {
                        let rel_db = 20.0 * (dft_amplitude(&x, folded) / fundamental).log10();
                        assert!(rel_db < -60.0, "{family:?} {f0} Hz: {folded} Hz at {rel_db} dB");
                    }
                }
                n += 2;
            }
            // Any fold-back landing on a harmonic would distort its amplitude.
            for n in (3..24).step_by(2).filter(|n| (*n as f64) * f0 < nyquist) {
                let expected = match family {
                    WaveformFamily::Square => 1.0 / n as f64,
                    _ => 8.0 / (PI * PI * (n * n) as f64),
                };
                let got = dft_amplitude(&x, n as f64 * f0);
                assert!((got - expected).abs() / expected < 0.01, "{family:?} {f0} #{n}");
            }
        }
    }
}

#[test]
fn sine_zero_crossing_rate_matches_frequency() {
    for &f0 in &GridDefinition::default().f0_hz {
        let x = render_oscillator(WaveformFamily::Sine, f0 as f64, SR as usize, SR).unwrap();
        let expected = 2.0 * f0 as f64 / SR as f64;
        let z = zero_crossing_rate(&x);
        assert!((z - expected).abs() / expected < 0.02, "{f0}: {z}");
    }
}
