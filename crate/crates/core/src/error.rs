use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Frequency is non-positive, non-finite or at/above Nyquist.
    InvalidFrequency { hz: f64, nyquist: f64 },
    EmptyBuffer,
    BufferTooShort { needed: usize, got: usize },
    /// The buffer has zero energy where a level or spectrum is required.
    SilentBuffer,
    InvalidConfig(&'static str),
    TargetTooLarge { requested: usize, available: usize },
    InvalidFilename(String),
    DegenerateTrainingSet { classes: usize },
    EmptySplit,
    NoSingleTones,
    /// Full-batch loss went up; carries the offending step for diagnostics.
    LossIncreased { iteration: usize, previous: f64, current: f64 },
    ShapeMismatch { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFrequency { hz, nyquist } => {
                write!(f, "frequency {hz} Hz is outside (0, {nyquist}) Hz")
            }
            Error::EmptyBuffer => f.write_str("buffer is empty"),
            Error::BufferTooShort { needed, got } => {
                write!(f, "buffer has {got} samples, at least {needed} required")
            }
            Error::SilentBuffer => f.write_str("buffer is silent"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::TargetTooLarge { requested, available } => write!(
                f,
                "requested {requested} clips but the grid only has {available}"
            ),
            Error::InvalidFilename(name) => write!(f, "cannot parse clip filename {name:?}"),
            Error::DegenerateTrainingSet { classes } => write!(
                f,
                "training split has {classes} distinct class(es), need at least 2"
            ),
            Error::EmptySplit => f.write_str("split is empty"),
            Error::NoSingleTones => f.write_str("no single-tone clips to evaluate"),
            Error::LossIncreased { iteration, previous, current } => write!(
                f,
                "training loss increased at iteration {iteration}: {previous} -> {current}"
            ),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "expected length {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
