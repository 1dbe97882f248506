use serde::{Deserialize, Serialize};

use super::environment::Environment;
use super::image::CropRect;
use crate::{Error, Result};

/// Target developed intensity of the 18% card: the middle of the range.
pub const MID_GRAY_TARGET: f64 = 0.5;

/// Standard deviation of additive sensor noise per image pixel, in raw units.
/// Raw signal scales with illuminance, so dim scenes are noisier once exposed.
pub const READ_NOISE: f64 = 2e-4;

/// Linear camera: developed = exposure * white_balance ⊙ raw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    pub exposure_scalar: f64,
    pub white_balance_gains: [f64; 3],
    pub viewpoint_angle_deg: f64,
    /// One crop per grass pixel, in capture order.
    pub crop_rects: Vec<CropRect>,
    #[serde(default = "default_read_noise")]
    pub read_noise: f64,
}

fn default_read_noise() -> f64 {
    READ_NOISE
}

impl CameraConfig {
    pub fn new(viewpoint_angle_deg: f64, crop_rects: Vec<CropRect>) -> Self {
        Self {
            exposure_scalar: 1.0,
            white_balance_gains: [1.0; 3],
            viewpoint_angle_deg,
            crop_rects,
            read_noise: READ_NOISE,
        }
    }

    pub fn develop(&self, raw: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|c| self.exposure_scalar * self.white_balance_gains[c] * raw[c])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.read_noise >= 0.0) {
            return Err(Error::Invalid(format!(
                "read noise must be non-negative, got {}",
                self.read_noise
            )));
        }
        if !(self.exposure_scalar > 0.0) {
            return Err(Error::Exposure(format!(
                "exposure must be positive, got {}",
                self.exposure_scalar
            )));
        }
        Ok(())
    }
}

/// The color correction board: an 18% and a 50% gray card.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrayCardBoard {
    pub reflectances: [f64; 2],
}

impl Default for GrayCardBoard {
    fn default() -> Self {
        Self {
            reflectances: [0.18, 0.50],
        }
    }
}

impl GrayCardBoard {
    pub fn mid_gray(&self) -> f64 {
        self.reflectances[0]
    }

    pub fn white_balance_card(&self) -> f64 {
        self.reflectances[1]
    }

    /// Raw sensor value of a gray card under `env`.
    pub fn raw(&self, reflectance: f64, env: &Environment) -> [f64; 3] {
        env.irradiance().map(|e| e * reflectance)
    }
}

/// White-balance on the 50% card, then set exposure so the 18% card develops
/// to [`MID_GRAY_TARGET`] on every channel.
pub fn auto_expose(board: &GrayCardBoard, env: &Environment, cam: &CameraConfig) -> Result<CameraConfig> {
    let wb_raw = board.raw(board.white_balance_card(), env);
    if wb_raw.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Exposure(format!(
            "illuminant of {:?} has a dead channel: {:?}",
            env.name, env.illuminant_gains
        )));
    }
    let wb = [wb_raw[1] / wb_raw[0], 1.0, wb_raw[1] / wb_raw[2]];
    let mid = board.raw(board.mid_gray(), env);
    let exposure = MID_GRAY_TARGET / (wb[1] * mid[1]);
    Ok(CameraConfig {
        exposure_scalar: exposure,
        white_balance_gains: wb,
        ..cam.clone()
    })
}
