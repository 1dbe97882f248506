//! Correspondence-table calibration: sample the OGCD characteristic, fit it,
//! and invert it so that OGCD is linear in the 8-bit level.

mod characteristic;
pub mod poly;
mod set;
mod table;

pub use characteristic::{
    noiseless_characteristic, sample_characteristic, sample_lengths, sample_module,
    CharacteristicSample, OgcdCharacteristic, DEFAULT_STEP_MM,
};
pub use set::{calibrate_multi, CalibrationSet, PixelCalibration, FORMAT_VERSION};
pub use table::{
    apply_table, build_table, build_table_clamped, level_target, CorrespondenceTable,
    DEGENERATE_RANGE, LEVELS,
};

use crate::pixel::PixelSim;
use crate::rig::CaptureRig;
use crate::Result;

/// Sample every pixel through the rig and build the set. Metadata
/// (environment, viewpoint, timestamp) is taken from the rig and clock.
pub fn calibrate_pixels(
    pixels: &mut [PixelSim],
    rig: &mut CaptureRig,
    step_mm: f64,
) -> Result<CalibrationSet> {
    let chars = sample_module(pixels, rig, step_mm)?;
    let ids = pixels.iter().map(|p| p.id);
    let mut set = calibrate_multi(ids.zip(chars).collect())?;
    set.environment = rig.environment.name.clone();
    set.viewpoint_deg = rig.camera.viewpoint_angle_deg;
    set.created_unix_s = characteristic::unix_now();
    Ok(set)
}
