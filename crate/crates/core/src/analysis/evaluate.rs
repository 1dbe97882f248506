use serde::{Deserialize, Serialize};

use super::report::{MultiPixelSummary, Report, ReportRow};
use super::sweep::{
    center_and_regress, characteristic_linearity, pooled_regression, run_module_sweep, run_sweep,
    spread_stats, DEFAULT_TRIALS,
};
use crate::calibration::{calibrate_multi, sample_characteristic, CalibrationSet, DEFAULT_STEP_MM};
use crate::pixel::PixelSim;
use crate::rig::CaptureRig;
use crate::{Error, Result};

/// The four viewpoints of the evaluation matrix.
pub const VIEWPOINTS: [f64; 4] = [0.0, 30.0, 60.0, 90.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalPlan {
    pub meas_viewpoints: Vec<f64>,
    pub trials: usize,
    pub step_mm: f64,
    /// Pixel whose sweeps fill the viewpoint matrix.
    pub pixel: usize,
}

impl Default for EvalPlan {
    fn default() -> Self {
        Self {
            meas_viewpoints: VIEWPOINTS.to_vec(),
            trials: DEFAULT_TRIALS,
            step_mm: DEFAULT_STEP_MM,
            pixel: 0,
        }
    }
}

/// Baseline linearity of the uncalibrated characteristic seen from the rig.
pub fn baseline_r2(pixel: &PixelSim, rig: &CaptureRig, step_mm: f64) -> Result<f64> {
    let mut p = pixel.clone();
    let mut r = rig.clone();
    let ch = sample_characteristic(&mut p, &mut r, step_mm)?;
    Ok(characteristic_linearity(&ch)?.r_squared)
}

/// Evaluate one pixel of a calibration set from each measurement viewpoint.
/// `rig` supplies the environment and seed; its viewpoint is replaced.
pub fn evaluate_pixel(
    pixel: &PixelSim,
    set: &CalibrationSet,
    rig: &CaptureRig,
    plan: &EvalPlan,
) -> Result<Vec<ReportRow>> {
    let table = set
        .table(pixel.id)
        .ok_or_else(|| Error::Assembly(format!("no table for pixel {}", pixel.id)))?;
    plan.meas_viewpoints
        .iter()
        .map(|&m| {
            let mut at = rig.at_viewpoint(m)?;
            let baseline = baseline_r2(pixel, &at, plan.step_mm)?;
            let mut p = pixel.clone();
            let ds = run_sweep(&mut p, table, &mut at, set.viewpoint_deg, plan.trials)?;
            Ok(ReportRow {
                calib_viewpoint: set.viewpoint_deg,
                meas_viewpoint: m,
                environment: at.environment.name.clone(),
                baseline_r2: baseline,
                calibrated_r2: center_and_regress(&ds)?.regression.r_squared,
                n_trials: plan.trials,
            })
        })
        .collect()
}

/// Calibrate one pixel from `calib_viewpoint` and return the single-pixel set.
pub fn calibrate_single(
    pixel: &PixelSim,
    rig: &CaptureRig,
    calib_viewpoint: f64,
    step_mm: f64,
) -> Result<CalibrationSet> {
    let mut p = pixel.clone();
    let mut r = rig.at_viewpoint(calib_viewpoint)?;
    let ch = sample_characteristic(&mut p, &mut r, step_mm)?;
    let mut set = calibrate_multi(vec![(pixel.id, ch)])?;
    set.environment = r.environment.name.clone();
    set.viewpoint_deg = calib_viewpoint;
    Ok(set)
}

/// Full calibration-viewpoint by measurement-viewpoint matrix for one pixel.
pub fn evaluate_matrix(
    pixel: &PixelSim,
    rig: &CaptureRig,
    calib_viewpoints: &[f64],
    plan: &EvalPlan,
) -> Result<Report> {
    let mut report = Report::default();
    for &c in calib_viewpoints {
        let set = calibrate_single(pixel, rig, c, plan.step_mm)?;
        report.rows.extend(evaluate_pixel(pixel, &set, rig, plan)?);
    }
    Ok(report)
}

/// Compare per-pixel tables with the reference pixel's table shared by all,
/// sweeping the whole grid from the calibration viewpoint.
pub fn evaluate_module(
    pixels: &[PixelSim],
    set: &CalibrationSet,
    rig: &CaptureRig,
    trials: usize,
) -> Result<MultiPixelSummary> {
    let at = rig.at_viewpoint(set.viewpoint_deg)?;
    let shared_set = set.shared();
    let run = |s: &CalibrationSet| -> Result<_> {
        let mut px = pixels.to_vec();
        let mut r = at.clone();
        let ds = run_module_sweep(&mut px, s, &mut r, trials)?;
        Ok((pooled_regression(&ds)?.r_squared, spread_stats(&ds)?))
    };
    let (shared_r2, shared) = run(&shared_set)?;
    let (per_pixel_r2, per_pixel) = run(set)?;
    Ok(MultiPixelSummary {
        reference_pixel: set.reference_pixel,
        reference_ogcd: set.reference_ogcd,
        shared_r2,
        per_pixel_r2,
        shared,
        per_pixel,
    })
}
