//! Scene configuration: one TOML file covering everything the simulator
//! needs. Every field has a default, so an empty file is a valid scene (one
//! 2×8 module, default optics, ISO lighting, camera at 0°).
//!
//! ```toml
//! seed = 42
//! step_mm = 1.0
//!
//! [display]
//! modules = 1
//! # pixels = 1          # calibrate a bare list of pixels instead of modules
//!
//! [environment]
//! preset = "iso"        # iso | classroom | meeting_room | dimly_lit
//! # illuminance_lx = 404.0
//! # color_temperature_k = 3564.0
//!
//! [camera]
//! viewpoint_deg = 0.0
//! # crop_rects = [[2, 2, 12, 12], [18, 2, 12, 12]]
//!
//! [optics]              # GrassOptics fields
//! texture_noise = 0.01
//!
//! [perturbation]        # per-pixel jitter; set enabled = false for identical pixels
//! enabled = true
//! onset = 0.10
//!
//! [drivetrain]          # DrivetrainParams fields
//! [gains]               # p, d
//! [settle]              # band_counts, hold_ticks, timeout_ticks
//!
//! [evaluation]
//! meas_viewpoints = [0.0, 30.0, 60.0, 90.0]
//! trials = 10
//!
//! constant_color_pixels = []   # pixel ids whose grass never changes color
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::actuation::{DrivetrainParams, PdGains};
use crate::analysis::EvalPlan;
use crate::appearance::{CropRect, Environment, GrassOptics, Perturbation};
use crate::calibration::DEFAULT_STEP_MM;
use crate::display::{GrassModule, MODULE_COLS, PIXELS_PER_MODULE};
use crate::pixel::{PixelSim, SettleCriterion};
use crate::rig::CaptureRig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisplayConfig {
    pub modules: usize,
    /// Overrides the module layout with a bare row of pixels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixels: Option<usize>,
}

impl Default for DisplayConfig {
    fn default() -> Self {
        Self {
            modules: 1,
            pixels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub preset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub illuminance_lx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color_temperature_k: Option<f64>,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        Self {
            preset: "iso".into(),
            illuminance_lx: None,
            color_temperature_k: None,
        }
    }
}

impl EnvironmentConfig {
    pub fn resolve(&self) -> Result<Environment> {
        let base = Environment::preset(&self.preset).ok_or_else(|| {
            Error::Invalid(format!(
                "unknown environment preset {:?}; have iso, classroom, meeting_room, dimly_lit",
                self.preset
            ))
        })?;
        if self.illuminance_lx.is_none() && self.color_temperature_k.is_none() {
            return Ok(base);
        }
        Environment::from_cct(
            &base.name,
            self.illuminance_lx.unwrap_or(base.illuminance_lx),
            self.color_temperature_k.unwrap_or(base.color_temperature_k),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraSection {
    pub viewpoint_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crop_rects: Option<Vec<[usize; 4]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    pub enabled: bool,
    pub onset: f64,
    pub width: f64,
    pub max_fraction: f64,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        let p = Perturbation::default();
        Self {
            enabled: true,
            onset: p.onset,
            width: p.width,
            max_fraction: p.max_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scene {
    pub seed: u64,
    pub step_mm: f64,
    pub display: DisplayConfig,
    pub environment: EnvironmentConfig,
    pub camera: CameraSection,
    pub optics: GrassOptics,
    pub perturbation: PerturbationConfig,
    pub drivetrain: DrivetrainParams,
    pub gains: PdGains,
    pub settle: SettleCriterion,
    pub evaluation: EvalPlan,
    pub constant_color_pixels: Vec<usize>,
}

impl Default for Scene {
    fn default() -> Self {
        Self {
            seed: 42,
            step_mm: DEFAULT_STEP_MM,
            display: DisplayConfig::default(),
            environment: EnvironmentConfig::default(),
            camera: CameraSection::default(),
            optics: GrassOptics::default(),
            perturbation: PerturbationConfig::default(),
            drivetrain: DrivetrainParams::default(),
            gains: PdGains::default(),
            settle: SettleCriterion::default(),
            evaluation: EvalPlan::default(),
            constant_color_pixels: Vec::new(),
        }
    }
}

impl Scene {
    pub fn from_toml(s: &str) -> Result<Self> {
        let scene: Scene = toml::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.drivetrain.validate()?;
        self.gains.validate()?;
        self.environment.resolve()?;
        if self.display.modules == 0 && self.display.pixels.is_none() {
            return Err(Error::Invalid("display needs at least one module".into()));
        }
        if self.display.pixels == Some(0) {
            return Err(Error::Invalid("pixel count must be positive".into()));
        }
        if let Some(crops) = &self.camera.crop_rects {
            if crops.len() != self.pixel_count() {
                return Err(Error::Invalid(format!(
                    "{} crop rects for {} pixels",
                    crops.len(),
                    self.pixel_count()
                )));
            }
        }
        if self.evaluation.trials == 0 {
            return Err(Error::Invalid("evaluation needs at least one trial".into()));
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.display
            .pixels
            .unwrap_or(self.display.modules * PIXELS_PER_MODULE)
    }

    /// Grid width used for tile layout.
    pub fn columns(&self) -> usize {
        match self.display.pixels {
            Some(n) => n,
            None => self.display.modules * MODULE_COLS,
        }
    }

    /// Optics of one pixel after per-pixel jitter and overrides.
    pub fn pixel_optics(&self, id: usize) -> GrassOptics {
        let mut o = self.optics;
        if self.perturbation.enabled {
            let p = Perturbation {
                onset: self.perturbation.onset,
                width: self.perturbation.width,
                max_fraction: self.perturbation.max_fraction,
            };
            o = o.perturbed(self.seed.wrapping_mul(1_000_003).wrapping_add(id as u64), &p);
        }
        if self.constant_color_pixels.contains(&id) {
            o = o.constant_color();
        }
        o
    }

    pub fn pixels(&self) -> Vec<PixelSim> {
        (0..self.pixel_count())
            .map(|id| PixelSim::new(id, self.pixel_optics(id), self.drivetrain, self.gains))
            .collect()
    }

    pub fn modules(&self) -> Result<Vec<GrassModule>> {
        if self.display.pixels.is_some() {
            return Err(Error::Invalid(
                "scene describes bare pixels, not modules".into(),
            ));
        }
        Ok((0..self.display.modules)
            .map(|m| GrassModule::new(m, m, |id| self.pixel_optics(id), self.drivetrain, self.gains))
            .collect())
    }

    /// Camera set up and normalized for the scene's pixels.
    pub fn rig(&self) -> Result<CaptureRig> {
        let mut rig = CaptureRig::new(
            self.environment.resolve()?,
            self.camera.viewpoint_deg,
            self.pixel_count(),
            self.columns(),
            self.seed,
        )?;
        if let Some(crops) = &self.camera.crop_rects {
            rig.camera.crop_rects = crops
                .iter()
                .map(|c| CropRect::new(c[0], c[1], c[2], c[3]))
                .collect();
        }
        rig.settle = self.settle;
        Ok(rig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default_scene() {
        let s = Scene::from_toml("").unwrap();
        assert_eq!(s, Scene::default());
        assert_eq!(s.pixel_count(), 16);
        assert_eq!(s.columns(), 2);
    }

    #[test]
    fn toml_round_trip() {
        let mut s = Scene::default();
        s.display.pixels = Some(8);
        s.environment.preset = "classroom".into();
        s.constant_color_pixels = vec![3];
        let back = Scene::from_toml(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn overrides_and_errors() {
        let s = Scene::from_toml(
            "[environment]\npreset = \"dimly_lit\"\nilluminance_lx = 50.0\n[display]\npixels = 2\n",
        )
        .unwrap();
        let env = s.environment.resolve().unwrap();
        assert_eq!(env.illuminance_lx, 50.0);
        assert_eq!(env.color_temperature_k, 4059.0);
        assert!(Scene::from_toml("[environment]\npreset = \"mars\"\n").is_err());
        assert!(Scene::from_toml("bogus = 1\n").is_err());
        assert!(Scene::from_toml("[display]\npixels = 2\n[camera]\ncrop_rects = [[0,0,1,1]]\n").is_err());
    }

    #[test]
    fn per_pixel_optics() {
        let s = Scene::default();
        assert_ne!(s.pixel_optics(0), s.pixel_optics(1));
        assert_eq!(s.pixel_optics(1), Scene::default().pixel_optics(1));
        let mut flat = s.clone();
        flat.perturbation.enabled = false;
        assert_eq!(flat.pixel_optics(0), flat.pixel_optics(5));
        assert_eq!(s.modules().unwrap()[0].pixels.len(), 16);
        assert_eq!(s.rig().unwrap().camera.crop_rects.len(), 16);
    }
}
