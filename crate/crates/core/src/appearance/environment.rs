use serde::{Deserialize, Serialize};

use crate::color::{xyz_to_rgb_unclamped, Xyz};
use crate::{Error, Result};

/// Sensor response per lux; maps the 2000 lx reference booth to unit scale.
pub const SENSOR_GAIN_PER_LUX: f64 = 1.0 / 2000.0;

/// A lighting environment: illuminance at the grass surface plus the
/// illuminant color expressed as per-channel gains in linear ProPhoto RGB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub name: String,
    pub illuminance_lx: f64,
    pub color_temperature_k: f64,
    pub illuminant_gains: [f64; 3],
}

impl Environment {
    /// Build an environment whose illuminant sits on the Planckian locus.
    pub fn from_cct(name: &str, illuminance_lx: f64, color_temperature_k: f64) -> Result<Self> {
        if !(illuminance_lx > 0.0) {
            return Err(Error::Invalid(format!(
                "illuminance must be positive, got {illuminance_lx}"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            illuminance_lx,
            color_temperature_k,
            illuminant_gains: planckian_rgb(color_temperature_k)?,
        })
    }

    pub fn iso() -> Self {
        Self::from_cct("iso", 2000.0, 5000.0).expect("preset")
    }

    pub fn classroom() -> Self {
        Self::from_cct("classroom", 404.0, 3564.0).expect("preset")
    }

    pub fn meeting_room() -> Self {
        Self::from_cct("meeting_room", 525.0, 4380.0).expect("preset")
    }

    pub fn dimly_lit() -> Self {
        Self::from_cct("dimly_lit", 113.0, 4059.0).expect("preset")
    }

    pub fn presets() -> Vec<Self> {
        vec![
            Self::iso(),
            Self::classroom(),
            Self::meeting_room(),
            Self::dimly_lit(),
        ]
    }

    pub fn preset(name: &str) -> Option<Self> {
        Self::presets().into_iter().find(|e| e.name == name)
    }

    /// Raw sensor irradiance per channel for a perfect white reflector.
    pub fn irradiance(&self) -> [f64; 3] {
        let s = self.illuminance_lx * SENSOR_GAIN_PER_LUX;
        self.illuminant_gains.map(|g| g * s)
    }
}

/// Chromaticity of a blackbody at `cct` kelvin (Kim et al. cubic fit,
/// valid from 1667 K to 25000 K).
pub fn planckian_xy(cct: f64) -> Result<(f64, f64)> {
    if !(1667.0..=25000.0).contains(&cct) {
        return Err(Error::Invalid(format!(
            "color temperature {cct} K outside 1667..25000 K"
        )));
    }
    let t = cct;
    let x = if t <= 4000.0 {
        -0.266_123_9e9 / t.powi(3) - 0.234_358_9e6 / t.powi(2) + 0.877_695_6e3 / t + 0.179_910
    } else {
        -3.025_846_9e9 / t.powi(3) + 2.107_037_9e6 / t.powi(2) + 0.222_634_7e3 / t + 0.240_390
    };
    let y = if t <= 2222.0 {
        -1.106_381_4 * x.powi(3) - 1.348_110_20 * x.powi(2) + 2.185_558_32 * x - 0.202_196_83
    } else if t <= 4000.0 {
        -0.954_947_6 * x.powi(3) - 1.374_185_93 * x.powi(2) + 2.091_370_15 * x - 0.167_488_67
    } else {
        3.081_758_0 * x.powi(3) - 5.873_386_70 * x.powi(2) + 3.751_129_97 * x - 0.370_014_83
    };
    Ok((x, y))
}

/// Linear ProPhoto RGB of a unit-luminance blackbody illuminant.
pub fn planckian_rgb(cct: f64) -> Result<[f64; 3]> {
    let (x, y) = planckian_xy(cct)?;
    let xyz = Xyz {
        x: x / y,
        y: 1.0,
        z: (1.0 - x - y) / y,
    };
    Ok(xyz_to_rgb_unclamped(xyz))
}
