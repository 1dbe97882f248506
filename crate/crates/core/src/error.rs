use std::io;

use thiserror::Error;

/// Errors produced anywhere in the simulator pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length {length_mm} mm outside travel range [0, {max_mm}] mm")]
    LengthOutOfRange { length_mm: f64, max_mm: f64 },

    #[error("homing timed out after {ticks} ticks without triggering the limit switch")]
    HomingTimeout { ticks: u64 },

    #[error("pixel {pixel} did not settle on count {target} within {ticks} ticks")]
    SettleTimeout { pixel: usize, target: i32, ticks: u64 },

    #[error("exposure cannot be set: {0}")]
    Exposure(String),

    #[error("measurement failed: {0}")]
    Measurement(String),

    #[error("degenerate characteristic: OGCD range {range:.4} is below {min:.4}")]
    DegenerateCharacteristic { range: f64, min: f64 },

    #[error("reference OGCD {reference:.4} exceeds the characteristic maximum {max:.4}")]
    UnreachableReference { reference: f64, max: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("regression undefined: {0}")]
    Regression(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("{0}")]
    Protocol(String),

    #[error("pixel {pixel}: {source}")]
    Pixel {
        pixel: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a pixel id to an error raised while processing that pixel.
    pub fn for_pixel(self, pixel: usize) -> Self {
        match self {
            e @ Error::Pixel { .. } => e,
            e => Error::Pixel {
                pixel,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
