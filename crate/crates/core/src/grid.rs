//! Parameter grid, deterministic corpus sampling, clip naming and splits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::effects::ReverbKind;
use crate::rng::{shuffle, Xoshiro256StarStar};
use crate::synth::{AmSetting, ChordType, ClipSpec, EnvelopeKind, WaveformFamily};
use crate::{Error, Result};

/// Factor value lists, in the order they vary during enumeration (last
/// factor fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridDefinition {
    pub waveforms: Vec<WaveformFamily>,
    pub f0_hz: Vec<u32>,
    pub durations_ms: Vec<u32>,
    pub envelopes: Vec<EnvelopeKind>,
    pub am_rates_hz: Vec<f64>,
    pub am_depths: Vec<f64>,
    pub chords: Vec<ChordType>,
    pub reverbs: Vec<ReverbKind>,
}

impl Default for GridDefinition {
    fn default() -> Self {
        Self {
            waveforms: WaveformFamily::ALL.to_vec(),
            f0_hz: alloc::vec![350, 500, 750, 1000],
            durations_ms: alloc::vec![100, 250, 500],
            envelopes: EnvelopeKind::ALL.to_vec(),
            am_rates_hz: alloc::vec![0.0, 8.0, 30.0],
            am_depths: alloc::vec![0.0, 0.3, 0.5],
            chords: ChordType::ALL.to_vec(),
            reverbs: ReverbKind::ALL.to_vec(),
        }
    }
}

impl GridDefinition {
    /// Rate × depth pairs with "rate is zero" agreeing with "depth is zero".
    pub fn am_settings(&self) -> Vec<AmSetting> {
        let mut out = Vec::new();
        for &rate in &self.am_rates_hz {
            for &depth in &self.am_depths {
                let am = AmSetting::new(rate, depth);
                if am.is_canonical() {
                    out.push(am);
                }
            }
        }
        out
    }

    /// Size of the plain Cartesian product, before AM canonicalization.
    pub fn raw_size(&self) -> usize {
        self.waveforms.len()
            * self.f0_hz.len()
            * self.durations_ms.len()
            * self.envelopes.len()
            * self.am_rates_hz.len()
            * self.am_depths.len()
            * self.chords.len()
            * self.reverbs.len()
    }

    pub fn size(&self) -> usize {
        self.raw_size() / (self.am_rates_hz.len() * self.am_depths.len()).max(1)
            * self.am_settings().len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.raw_size() == 0 || self.am_settings().is_empty() {
            return Err(Error::InvalidConfig("every grid factor needs at least one value"));
        }
        if self.f0_hz.contains(&0) || self.durations_ms.contains(&0) {
            return Err(Error::InvalidConfig("f0 and duration must be positive"));
        }
        if self.am_depths.iter().any(|d| !(0.0..=1.0).contains(d))
            || self.am_rates_hz.iter().any(|r| !(*r >= 0.0))
        {
            return Err(Error::InvalidConfig("AM depth must be in [0, 1] and rate >= 0"));
        }
        Ok(())
    }
}

/// The canonical superset in lexicographic factor order. `index` is the
/// position in the superset and `seed` is zero until sampling.
pub fn enumerate_grid(grid: &GridDefinition) -> Result<Vec<ClipSpec>> {
    grid.validate()?;
    let ams = grid.am_settings();
    let mut out = Vec::with_capacity(grid.size());
    for &waveform in &grid.waveforms {
        for &f0_hz in &grid.f0_hz {
            for &duration_ms in &grid.durations_ms {
                for &envelope in &grid.envelopes {
                    for &am in &ams {
                        for &chord in &grid.chords {
                            for &reverb in &grid.reverbs {
                                out.push(ClipSpec {
                                    waveform,
                                    f0_hz,
                                    duration_ms,
                                    envelope,
                                    am,
                                    chord,
                                    reverb,
                                    seed: 0,
                                    index: out.len(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Shuffles a copy of `superset` with xoshiro256** seeded from `seed`, keeps
/// the first `target_n` and renumbers them `0..target_n`.
pub fn sample_corpus(superset: &[ClipSpec], target_n: usize, seed: u64) -> Result<Vec<ClipSpec>> {
    if target_n > superset.len() {
        return Err(Error::TargetTooLarge { requested: target_n, available: superset.len() });
    }
    let mut pool = superset.to_vec();
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    shuffle(&mut pool, &mut rng);
    pool.truncate(target_n);
    for (i, spec) in pool.iter_mut().enumerate() {
        spec.index = i;
        spec.seed = seed;
    }
    Ok(pool)
}

pub fn clip_filename(spec: &ClipSpec) -> String {
    format!(
        "clip_{:04}_{}_{}hz_{}ms_{}_am{}-{:.1}_{}_{}.wav",
        spec.index,
        spec.waveform.name(),
        spec.f0_hz,
        spec.duration_ms,
        spec.envelope.name(),
        spec.am.rate_hz,
        spec.am.depth,
        spec.chord.name(),
        spec.reverb.name(),
    )
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn literal(&mut self, lit: &str) -> Option<()> {
        self.rest = self.rest.strip_prefix(lit)?;
        Some(())
    }

    fn number_until(&mut self, stop: char) -> Option<&'a str> {
        let end = self.rest.find(stop)?;
        let (num, rest) = self.rest.split_at(end);
        self.rest = &rest[stop.len_utf8()..];
        Some(num)
    }

    fn name_of<T: Copy>(&mut self, options: &[T], name: impl Fn(T) -> &'static str) -> Option<T> {
        let found = options.iter().copied().find(|&o| self.rest.starts_with(name(o)))?;
        self.rest = &self.rest[name(found).len()..];
        Some(found)
    }
}

/// Inverse of [`clip_filename`]; the returned spec has `seed = 0`.
pub fn parse_clip_filename(name: &str) -> Result<ClipSpec> {
    parse_inner(name).ok_or_else(|| Error::InvalidFilename(String::from(name)))
}

fn parse_inner(name: &str) -> Option<ClipSpec> {
    let mut c = Cursor { rest: name.strip_suffix(".wav")? };
    c.literal("clip_")?;
    let index = c.number_until('_')?.parse().ok()?;
    let waveform = c.name_of(&WaveformFamily::ALL, WaveformFamily::name)?;
    c.literal("_")?;
    let f0_hz = c.number_until('h')?.parse().ok()?;
    c.literal("z_")?;
    let duration_ms = c.number_until('m')?.parse().ok()?;
    c.literal("s_")?;
    let envelope = c.name_of(&EnvelopeKind::ALL, EnvelopeKind::name)?;
    c.literal("_am")?;
    let rate_hz: f64 = c.number_until('-')?.parse().ok()?;
    let depth: f64 = c.number_until('_')?.parse().ok()?;
    let chord = c.name_of(&ChordType::ALL, ChordType::name)?;
    c.literal("_")?;
    let reverb = c.name_of(&ReverbKind::ALL, ReverbKind::name)?;
    if !c.rest.is_empty() {
        return None;
    }
    Some(ClipSpec {
        waveform,
        f0_hz,
        duration_ms,
        envelope,
        am: AmSetting::new(rate_hz, depth),
        chord,
        reverb,
        seed: 0,
        index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Bucket `fnv1a64(name) mod 100`: below 80 train, below 90 val, else test.
pub fn assign_split(filename: &str) -> Split {
    match fnv1a64(filename.as_bytes()) % 100 {
        0..=79 => Split::Train,
        80..=89 => Split::Val,
        _ => Split::Test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn superset() -> Vec<ClipSpec> {
        enumerate_grid(&GridDefinition::default()).unwrap()
    }

    #[test]
    fn grid_sizes() {
        let g = GridDefinition::default();
        assert_eq!(g.raw_size(), 14_580);
        assert_eq!(g.size(), 8_100);
        assert_eq!(g.am_settings().len(), 5);
        assert_eq!(superset().len(), 8_100);
    }

    #[test]
    fn enumeration_order() {
        let all = superset();
        let first = &all[0];
        assert_eq!(first.waveform, WaveformFamily::Sine);
        assert_eq!((first.f0_hz, first.duration_ms), (350, 100));
        assert_eq!(first.envelope, EnvelopeKind::AdsrFast);
        assert!(first.am.is_off());
        assert_eq!((first.chord, first.reverb), (ChordType::Single, ReverbKind::Dry));
        // Reverb varies fastest.
        assert_eq!(all[1].reverb, ReverbKind::RirSmall);
        assert_eq!(all[3].chord, ChordType::Major);
        assert!(all.iter().enumerate().all(|(i, s)| s.index == i));
        let names: BTreeSet<String> = all.iter().map(clip_filename).collect();
        assert_eq!(names.len(), all.len());
    }

    #[test]
    fn sampling_is_deterministic_and_distinct() {
        let all = superset();
        let a = sample_corpus(&all, 400, 13).unwrap();
        assert_eq!(a, sample_corpus(&all, 400, 13).unwrap());
        assert_ne!(a, sample_corpus(&all, 400, 14).unwrap());
        let names: BTreeSet<String> = a.iter().map(clip_filename).collect();
        assert_eq!(names.len(), 400);
        assert!(a.iter().enumerate().all(|(i, s)| s.index == i && s.seed == 13));
    }

    #[test]
    fn sampling_the_whole_grid_is_a_permutation() {
        let all = superset();
        let full = sample_corpus(&all, all.len(), 1).unwrap();
        let key = |s: &ClipSpec| {
            let mut s = *s;
            s.index = 0;
            s.seed = 0;
            clip_filename(&s)
        };
        let a: BTreeSet<String> = all.iter().map(key).collect();
        let b: BTreeSet<String> = full.iter().map(key).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_target_is_rejected() {
        let r = sample_corpus(&superset(), 9_000, 13);
        assert_eq!(r, Err(Error::TargetTooLarge { requested: 9_000, available: 8_100 }));
    }

    #[test]
    fn filename_example_and_parse_back() {
        let spec = superset()[0];
        let name = clip_filename(&spec);
        assert_eq!(name, "clip_0000_sine_350hz_100ms_adsr_fast_am0-0.0_single_dry.wav");
        assert_eq!(parse_clip_filename(&name).unwrap(), spec);

        let mut s = superset()[7_777];
        s.index = 12;
        s.seed = 0;
        let name = clip_filename(&s);
        assert_eq!(parse_clip_filename(&name).unwrap(), s);
    }

    #[test]
    fn malformed_filenames_are_rejected() {
        for bad in [
            "",
            "clip_0000_sine_350hz_100ms_adsr_fast_am0-0.0_single_dry",
            "clip_0000_saw_350hz_100ms_adsr_fast_am0-0.0_single_dry.wav",
            "clip_x_sine_350hz_100ms_adsr_fast_am0-0.0_single_dry.wav",
            "clip_0000_sine_350hz_100ms_adsr_fast_am0-0.0_single_dry_extra.wav",
        ] {
            assert!(parse_clip_filename(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x8594_4171_f739_67e8);
    }

    #[test]
    fn split_fractions_over_the_grid() {
        let all = superset();
        let mut counts = [0usize; 3];
        for s in &all {
            let name = clip_filename(s);
            let split = assign_split(&name);
            assert_eq!(split, assign_split(&name));
            counts[split as usize] += 1;
        }
        let n = all.len() as f64;
        for (c, expected) in counts.iter().zip([0.8, 0.1, 0.1]) {
            assert!((*c as f64 / n - expected).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn split_names_round_trip() {
        for s in [Split::Train, Split::Val, Split::Test] {
            assert_eq!(Split::from_name(s.name()), Some(s));
        }
    }
}
