use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("pixel buffer holds {actual} values but {width}x{height} needs {expected}")]
    BufferLength {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("pixel {index} has non-finite intensity {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("pixel {index} has intensity {value}, expected an integer in [0, {max}]")]
    InvalidIntensity { index: usize, value: f64, max: u64 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("image {width}x{height} is smaller than the {side}x{side} kernel")]
    ImageTooSmall {
        width: usize,
        height: usize,
        side: usize,
    },

    #[error("histogram must have at least one level")]
    NoLevels,

    #[error("histogram holds {histogram_total} pixels but the image has {pixel_count}")]
    HistogramMismatch {
        histogram_total: u64,
        pixel_count: u64,
    },

    #[error("histogram has {actual} levels, expected {expected}")]
    LevelMismatch { expected: usize, actual: usize },

    #[error("histogram is all zeros")]
    EmptyHistogram,

    #[error("rank {rank} out of range for a histogram of {total} pixels")]
    RankOutOfRange { rank: u64, total: u64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("SSIM gradient vanished")]
    VanishingGradient,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: byte {offset}: {message}")]
    Format {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("{path}: line {line}: {message}")]
    HistogramFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Format { .. } | Error::HistogramFile { .. } => 3,
            _ => 4,
        }
    }
}
