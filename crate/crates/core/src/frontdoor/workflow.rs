//! The calibrate and evaluate procedures behind the CLI.

use super::config::Scene;
use crate::analysis::{evaluate_module, evaluate_pixel, EvalPlan, Report};
use crate::appearance::Environment;
use crate::calibration::{calibrate_pixels, CalibrationSet};
use crate::{Error, Result};

/// Normalize the camera, sample every pixel and build the set. The scene is
/// embedded in the result.
pub fn calibrate_scene(scene: &Scene) -> Result<CalibrationSet> {
    let mut pixels = scene.pixels();
    let mut rig = scene.rig()?;
    let mut set = calibrate_pixels(&mut pixels, &mut rig, scene.step_mm)?;
    set.config = Some(scene.to_json()?);
    Ok(set)
}

/// Sweep the scene's pixels through a set's tables from each measurement
/// viewpoint. Multi-pixel sets also get the shared-table comparison.
pub fn evaluate_scene(
    scene: &Scene,
    set: &CalibrationSet,
    meas_viewpoints: Option<Vec<f64>>,
    environment: Option<Environment>,
) -> Result<Report> {
    let pixels = scene.pixels();
    if pixels.len() != set.pixels.len() {
        return Err(Error::Assembly(format!(
            "calibration has {} pixels, scene has {}",
            set.pixels.len(),
            pixels.len()
        )));
    }
    let mut rig = scene.rig()?;
    if let Some(env) = environment {
        rig = rig.in_environment(env)?;
    }
    let plan = EvalPlan {
        meas_viewpoints: meas_viewpoints.unwrap_or_else(|| scene.evaluation.meas_viewpoints.clone()),
        ..scene.evaluation.clone()
    };
    let pixel = pixels
        .iter()
        .find(|p| p.id == plan.pixel)
        .ok_or_else(|| Error::Invalid(format!("no pixel {} to evaluate", plan.pixel)))?;
    let mut report = Report {
        rows: evaluate_pixel(pixel, set, &rig, &plan)?,
        multi_pixel: None,
    };
    if pixels.len() > 1 {
        report.multi_pixel = Some(evaluate_module(&pixels, set, &rig, plan.trials)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_pixel_scene() {
        let scene = Scene::from_toml("[display]\npixels = 1\n[evaluation]\ntrials = 2\nmeas_viewpoints = [0.0]\n").unwrap();
        let set = calibrate_scene(&scene).unwrap();
        assert_eq!(set.pixels.len(), 1);
        assert_eq!(set.reference_ogcd, set.pixels[0].characteristic.range());
        assert!(set.config.is_some());
        let report = evaluate_scene(&scene, &set, None, None).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].calibrated_r2 > 0.99);
        assert!(report.multi_pixel.is_none());
    }

    #[test]
    fn degenerate_pixel_is_reported() {
        let scene = Scene::from_toml("[display]\npixels = 3\nconstant_color_pixels = [2]\n");
        // constant_color_pixels sits at top level, so it must come first
        assert!(scene.is_err());
        let scene = Scene::from_toml("constant_color_pixels = [2]\n[display]\npixels = 3\n").unwrap();
        let err = calibrate_scene(&scene).unwrap_err();
        assert!(matches!(err, Error::Pixel { pixel: 2, .. }), "{err}");
    }

    #[test]
    fn mismatched_scene() {
        let one = Scene::from_toml("[display]\npixels = 1\n").unwrap();
        let two = Scene::from_toml("[display]\npixels = 2\n").unwrap();
        let set = calibrate_scene(&one).unwrap();
        assert!(evaluate_scene(&two, &set, None, None).is_err());
    }
}
