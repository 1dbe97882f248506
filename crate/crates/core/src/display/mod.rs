//! Chaining modules into a display and playing frames through the
//! correspondence tables.

pub mod assets;
mod frame;
mod grid;

pub use frame::{Animation, Frame, MAX_FPS};
pub use grid::{
    assemble, assemble_uncalibrated, pixel_id, Display, FrameReport, GrassModule, PlaybackReport,
    MODULE_COLS, MODULE_ROWS, PIXELS_PER_MODULE, SETTLED_TOLERANCE, TICKS_PER_SECOND,
};
